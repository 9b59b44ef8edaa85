#include "commands.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "emrefine/augment.hpp"
#include "emrefine/metrics.hpp"
#include "emrefine/mpp.hpp"
#include "emrefine/parallel.hpp"
#include "emrefine/stack_io.hpp"

namespace emrefine::cli {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& msg) {
    throw Error(ErrorCategory::InvalidArgument, msg);
}

int parse_int(std::string_view text, const std::string& what) {
    int value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) invalid("cannot parse " + what + " from '" + std::string(text) + "'");
    return value;
}

void write_json(const json& doc, const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorCategory::Io, "cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Io, "cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        invalid(path.string() + ": " + e.what());
    }
}

fs::path default_manifest(const fs::path& out) {
    fs::path base = out;
    if (!base.has_filename()) base = base.parent_path();
    return base.string() + ".manifest.json";
}

std::string absolute_string(const fs::path& p) { return fs::absolute(p).lexically_normal().string(); }

// Expands a stack holding one slice per ground-truth index to full depth.
MaskStack align_gt_stack(MaskStack gt, const std::vector<int>& indices, const MaskStack& coarse) {
    if (gt.depth() == coarse.depth()) return gt;
    if (gt.depth() != static_cast<int>(indices.size()) || gt.height() != coarse.height() ||
        gt.width() != coarse.width()) {
        throw Error(ErrorCategory::DimensionMismatch,
                    "ground-truth stack must have the coarse depth or one slice per ground-truth index");
    }
    std::vector<MaskSlice> slices(static_cast<std::size_t>(coarse.depth()),
                                  MaskSlice(coarse.height(), coarse.width(), 0));
    for (std::size_t k = 0; k < indices.size(); ++k) {
        slices[static_cast<std::size_t>(indices[k])] = gt[static_cast<int>(k)];
    }
    return MaskStack(std::move(slices));
}

std::string pair_stem(int slice, int k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d_%03d", slice, k);
    return buf;
}

json counts_json(const ConfusionCounts& c) {
    return {{"iou", iou(c)}, {"dice", dice(c)}, {"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}

}  // namespace

std::vector<int> parse_gt_indices(const std::string& spec, int depth) {
    constexpr std::string_view kAuto = "auto:";
    if (spec.rfind(kAuto, 0) == 0) {
        return select_labeled_slices(depth, parse_int(std::string_view(spec).substr(kAuto.size()), "label count"));
    }
    std::vector<int> indices;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ',');) {
        const auto first = item.find_first_not_of(" \t");
        item = first == std::string::npos ? "" : item.substr(first, item.find_last_not_of(" \t") - first + 1);
        if (item.empty()) invalid("empty entry in index list '" + spec + "'");
        indices.push_back(parse_int(item, "slice index"));
    }
    if (indices.empty()) invalid("no slice indices given");
    return indices;
}

std::vector<int> run_select(int depth, int count) { return select_labeled_slices(depth, count); }

json run_refine(const RefineOptions& opts) {
    const MaskStack coarse = load_mask_stack(opts.coarse);
    const auto indices = parse_gt_indices(opts.gt_indices, coarse.depth());
    const LabelAtlas atlas(coarse.depth(), indices);
    const MaskStack gt = align_gt_stack(load_mask_stack(opts.gt), indices, coarse);

    MppConfig cfg;
    cfg.erosion_n = opts.erosion_n;
    cfg.t_c = opts.tc;
    cfg.max_gap = opts.max_gap;

    MppTrace trace;
    const MaskStack refined = run_mpp(coarse, gt, atlas, cfg, &trace);
    save_stack(refined, opts.out);

    std::size_t coarse_fg = 0;
    for (const auto& s : coarse) coarse_fg += foreground_count(s);
    json manifest = {
        {"command", "refine"},
        {"inputs", {{"coarse", absolute_string(opts.coarse)}, {"gt", absolute_string(opts.gt)}}},
        {"output", absolute_string(opts.out)},
        {"shape", {coarse.depth(), coarse.height(), coarse.width()}},
        {"gt_indices", indices},
        {"config",
         {{"erosion_n", cfg.erosion_n}, {"tc", cfg.t_c}, {"max_gap", resolve_max_gap(cfg, atlas)}}},
        {"foreground",
         {{"coarse", coarse_fg},
          {"phases", {trace.foreground[0], trace.foreground[1], trace.foreground[2], trace.foreground[3]}}}},
    };
    write_json(manifest, opts.manifest.value_or(default_manifest(opts.out)));
    return manifest;
}

json run_augment(const AugmentOptions& opts) {
    if (opts.count < 0) invalid("augmentation count must be >= 0");
    const GrayStack images = load_gray_stack(opts.images);
    const MaskStack masks = load_mask_stack(opts.masks);
    require_same_stack_shape(images, masks, "image vs mask stack");

    std::vector<int> slices;
    if (opts.slices.empty()) {
        for (int z = 0; z < images.depth(); ++z) slices.push_back(z);
    } else {
        slices = parse_gt_indices(opts.slices, images.depth());
        const LabelAtlas check(images.depth(), slices);  // range + ordering validation
    }

    AugmentConfig cfg;
    cfg.flip_rotate = opts.flip_rotate;
    if (opts.piecewise) {
        cfg.piecewise = PiecewiseAffineConfig{opts.sigma_p_min, opts.sigma_p_max, opts.grid, opts.grid, 0};
    } else {
        cfg.piecewise.reset();
    }
    if (opts.elastic) cfg.elastic = ElasticConfig{opts.alpha, opts.sigma_e, 0};

    const auto per_slice = static_cast<std::size_t>(opts.count);
    std::vector<json> entries(slices.size() * per_slice);
    parallel_for(entries.size(), [&](std::size_t i) {
        const int z = slices[i / per_slice];
        const int k = static_cast<int>(i % per_slice);
        const std::uint64_t stream = (static_cast<std::uint64_t>(z) << 32) | static_cast<std::uint32_t>(k);
        const auto pair = augment_pair(images[z], masks[z], cfg, opts.seed, stream);
        const std::string stem = pair_stem(z, k);
        save_png(pair.image, opts.out / (stem + "_image.png"));
        save_png(pair.mask, opts.out / (stem + "_mask.png"));
        entries[i] = {{"slice", z}, {"k", k}, {"code", static_cast<int>(pair.code)},
                      {"image", stem + "_image.png"}, {"mask", stem + "_mask.png"}};
    });

    json manifest = {
        {"command", "augment"},
        {"inputs", {{"images", absolute_string(opts.images)}, {"masks", absolute_string(opts.masks)}}},
        {"output", absolute_string(opts.out)},
        {"config",
         {{"count", opts.count}, {"seed", opts.seed}, {"sigma_p_min", opts.sigma_p_min},
          {"sigma_p_max", opts.sigma_p_max}, {"grid", opts.grid}, {"flip_rotate", opts.flip_rotate},
          {"piecewise", opts.piecewise}, {"elastic", opts.elastic}, {"alpha", opts.alpha},
          {"sigma_e", opts.sigma_e}, {"slices", slices}}},
        {"pairs", entries},
    };
    if (!entries.empty()) write_json(manifest, opts.out / "manifest.json");
    return manifest;
}

json run_prepare(const PrepareOptions& opts) {
    const MaskStack coarse = load_mask_stack(opts.coarse);
    const MaskStack refined = load_mask_stack(opts.refined);
    std::vector<int> indices;
    std::error_code ec;
    if (fs::is_regular_file(opts.atlas, ec)) {
        const json doc = read_json(opts.atlas);
        if (!doc.contains("gt_indices")) invalid(opts.atlas + " has no gt_indices array");
        indices = doc.at("gt_indices").get<std::vector<int>>();
    } else {
        indices = parse_gt_indices(opts.atlas, coarse.depth());
    }
    const LabelAtlas atlas(coarse.depth(), indices, SliceRole::Soft);
    export_training_pairs(coarse, refined, atlas, opts.window_n, opts.out);
    return read_json(opts.out / "manifest.json");
}

json run_evaluate(const EvaluateOptions& opts) {
    const MaskStack pred = load_mask_stack(opts.pred);
    const MaskStack gt = load_mask_stack(opts.gt);
    require_same_stack_shape(pred, gt, "prediction vs ground truth");

    ConfusionCounts total;
    json per_slice = json::array();
    for (int z = 0; z < pred.depth(); ++z) {
        const auto c = confusion(pred[z], gt[z]);
        total += c;
        json entry = counts_json(c);
        entry["slice"] = z;
        per_slice.push_back(std::move(entry));
        if (opts.overlay_dir) {
            const auto rgb = overlay(pred[z], gt[z]);
            const auto* bytes = reinterpret_cast<const std::uint8_t*>(rgb.pixels().data());
            save_rgb_png({bytes, rgb.size() * 3}, rgb.height(), rgb.width(),
                         *opts.overlay_dir / (pair_stem(z, 0).substr(0, 4) + "_overlay.png"));
        }
    }
    json result = counts_json(total);
    result["per_slice"] = std::move(per_slice);
    result["aggregation"] = "micro";
    result["empty_convention"] = "iou = dice = 1 when prediction and ground truth are both empty";
    return result;
}

json run_replay(const fs::path& manifest_path, const std::optional<fs::path>& out) {
    const json m = read_json(manifest_path);
    const std::string command = m.value("command", "");
    try {
        if (command == "refine") {
            RefineOptions opts;
            opts.coarse = m.at("inputs").at("coarse").get<std::string>();
            opts.gt = m.at("inputs").at("gt").get<std::string>();
            std::string list;
            for (int z : m.at("gt_indices")) list += (list.empty() ? "" : ",") + std::to_string(z);
            opts.gt_indices = list;
            opts.erosion_n = m.at("config").at("erosion_n").get<int>();
            opts.tc = m.at("config").at("tc").get<std::size_t>();
            opts.max_gap = m.at("config").at("max_gap").get<int>();
            opts.out = out.value_or(fs::path(m.at("output").get<std::string>()));
            return run_refine(opts);
        }
        if (command == "augment") {
            const json& c = m.at("config");
            AugmentOptions opts;
            opts.images = m.at("inputs").at("images").get<std::string>();
            opts.masks = m.at("inputs").at("masks").get<std::string>();
            opts.out = out.value_or(fs::path(m.at("output").get<std::string>()));
            opts.count = c.at("count");
            opts.seed = c.at("seed");
            opts.sigma_p_min = c.at("sigma_p_min");
            opts.sigma_p_max = c.at("sigma_p_max");
            opts.grid = c.at("grid");
            opts.flip_rotate = c.at("flip_rotate");
            opts.piecewise = c.at("piecewise");
            opts.elastic = c.at("elastic");
            opts.alpha = c.at("alpha");
            opts.sigma_e = c.at("sigma_e");
            std::string list;
            for (int z : c.at("slices")) list += (list.empty() ? "" : ",") + std::to_string(z);
            opts.slices = list;
            return run_augment(opts);
        }
    } catch (const json::exception& e) {
        invalid(manifest_path.string() + ": malformed manifest (" + e.what() + ")");
    }
    invalid(manifest_path.string() + ": cannot replay command '" + command + "'");
}

int exit_code_for(const std::string& category) {
    if (category == category_name(ErrorCategory::InvalidArgument)) return 2;
    if (category == category_name(ErrorCategory::DimensionMismatch)) return 3;
    if (category == category_name(ErrorCategory::Io)) return 4;
    if (category == category_name(ErrorCategory::EmptyInput)) return 5;
    if (category == category_name(ErrorCategory::DegenerateTriangle)) return 6;
    if (category == category_name(ErrorCategory::SamplingFailure)) return 7;
    return 1;
}

}  // namespace emrefine::cli
