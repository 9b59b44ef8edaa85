#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "emrefine/error.hpp"

namespace {

using emrefine::cli::fs::path;

void print_error(std::string_view category, const std::string& message) {
    std::cerr << "error[" << category << "]: " << message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    namespace cli = emrefine::cli;
    CLI::App app{"Sparse-label refinement, augmentation and evaluation for EM image stacks"};
    app.require_subcommand(1);

    // select
    int sel_depth = 0, sel_count = 0;
    auto* select = app.add_subcommand("select", "Print equally spaced labeled-slice indices");
    select->add_option("--depth", sel_depth, "Slices in the stack")->required();
    select->add_option("--count", sel_count, "Slices to label")->required();

    // refine
    cli::RefineOptions refine_opts;
    std::string max_gap = "auto";
    std::string refine_manifest;
    auto* refine = app.add_subcommand("refine", "Refine coarse masks with sparse ground truth");
    refine->add_option("--coarse", refine_opts.coarse, "Coarse mask stack (TIFF or PNG directory)")->required();
    refine->add_option("--gt", refine_opts.gt, "Ground-truth stack: full depth or one slice per index")->required();
    refine->add_option("--gt-indices", refine_opts.gt_indices, "Comma list or auto:<count>")->required();
    refine->add_option("--erosion-n", refine_opts.erosion_n, "Erosion rounds per slice of distance")
        ->capture_default_str()->check(CLI::NonNegativeNumber);
    refine->add_option("--tc", refine_opts.tc, "Minimum component size kept after erosion (pixels)")
        ->capture_default_str();
    refine->add_option("--max-gap", max_gap, "Widest unlabeled run bridged by ground truth, or auto")
        ->capture_default_str();
    refine->add_option("--out", refine_opts.out, "Output stack (.tif or directory)")->required();
    refine->add_option("--manifest", refine_manifest, "Manifest path (default <out>.manifest.json)");

    // augment
    cli::AugmentOptions aug;
    bool no_flip = false, no_piecewise = false;
    auto* augment = app.add_subcommand("augment", "Write augmented image/mask pairs");
    augment->add_option("--images", aug.images, "Grayscale stack")->required();
    augment->add_option("--masks", aug.masks, "Mask stack")->required();
    augment->add_option("--out", aug.out, "Output directory")->required();
    augment->add_option("--count", aug.count, "Augmentations per slice")->capture_default_str();
    augment->add_option("--seed", aug.seed, "Random seed")->capture_default_str();
    augment->add_option("--sigma-p-min", aug.sigma_p_min, "Lower bound of sigma_p")->capture_default_str();
    augment->add_option("--sigma-p-max", aug.sigma_p_max, "Upper bound of sigma_p")->capture_default_str();
    augment->add_option("--grid", aug.grid, "Control points per axis")->capture_default_str();
    augment->add_option("--slices", aug.slices, "Slices to augment (comma list or auto:<count>)");
    augment->add_flag("--no-flip", no_flip, "Disable flip/rotation");
    augment->add_flag("--no-piecewise", no_piecewise, "Disable piecewise affine warping");
    augment->add_flag("--elastic", aug.elastic, "Append elastic deformation");
    augment->add_option("--alpha", aug.alpha, "Elastic intensity")->capture_default_str();
    augment->add_option("--sigma-e", aug.sigma_e, "Elastic smoothing sigma")->capture_default_str();

    // prepare
    cli::PrepareOptions prep;
    auto* prepare = app.add_subcommand("prepare", "Export N-channel training windows");
    prepare->add_option("--coarse", prep.coarse, "Coarse mask stack")->required();
    prepare->add_option("--refined", prep.refined, "Refined mask stack")->required();
    prepare->add_option("--atlas", prep.atlas, "Ground-truth indices or a refine manifest")->required();
    prepare->add_option("--window-n", prep.window_n, "Odd window size")->capture_default_str();
    prepare->add_option("--out", prep.out, "Output directory")->required();

    // evaluate
    cli::EvaluateOptions eval;
    std::string overlay_dir;
    auto* evaluate = app.add_subcommand("evaluate", "IoU/Dice metrics as JSON on stdout");
    evaluate->add_option("--pred", eval.pred, "Predicted mask stack")->required();
    evaluate->add_option("--gt", eval.gt, "Ground-truth mask stack")->required();
    evaluate->add_option("--overlay-dir", overlay_dir, "Write TP/FN/FP overlay PNGs here");

    // replay
    std::string replay_manifest, replay_out;
    auto* replay = app.add_subcommand("replay", "Re-run a refine or augment manifest");
    replay->add_option("manifest", replay_manifest, "Manifest written by refine/augment")->required();
    replay->add_option("--out", replay_out, "Redirect the output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error(emrefine::category_name(emrefine::ErrorCategory::InvalidArgument), e.what());
        return cli::exit_code_for("invalid-argument");
    }

    try {
        if (*select) {
            for (int z : cli::run_select(sel_depth, sel_count)) std::cout << z << '\n';
        } else if (*refine) {
            if (max_gap != "auto") {
                try {
                    refine_opts.max_gap = std::stoi(max_gap);
                } catch (const std::exception&) {
                    throw emrefine::Error(emrefine::ErrorCategory::InvalidArgument,
                                          "--max-gap must be an integer or 'auto'");
                }
            }
            if (!refine_manifest.empty()) refine_opts.manifest = path(refine_manifest);
            std::cout << cli::run_refine(refine_opts).dump(2) << '\n';
        } else if (*augment) {
            aug.flip_rotate = !no_flip;
            aug.piecewise = !no_piecewise;
            std::cout << cli::run_augment(aug).dump(2) << '\n';
        } else if (*prepare) {
            const auto manifest = cli::run_prepare(prep);
            std::cout << manifest.dump(2) << '\n';
        } else if (*evaluate) {
            if (!overlay_dir.empty()) eval.overlay_dir = path(overlay_dir);
            std::cout << cli::run_evaluate(eval).dump(2) << '\n';
        } else if (*replay) {
            std::optional<path> out;
            if (!replay_out.empty()) out = path(replay_out);
            std::cout << cli::run_replay(replay_manifest, out).dump(2) << '\n';
        }
    } catch (const emrefine::Error& e) {
        const std::string category(emrefine::category_name(e.category()));
        print_error(category, e.what());
        return cli::exit_code_for(category);
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 0;
}
