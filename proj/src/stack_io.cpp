#include "emrefine/stack_io.hpp"

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "emrefine/parallel.hpp"

namespace emrefine {

namespace fs = std::filesystem;

namespace {

using Pixels = std::vector<std::uint8_t>;

struct RawSlice {
    int height = 0;
    int width = 0;
    Pixels pixels;
};

[[noreturn]] void io_error(const std::string& msg) { throw Error(ErrorCategory::Io, msg); }

bool has_tiff_extension(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".tif" || ext == ".tiff";
}

bool has_png_extension(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png";
}

std::optional<unsigned long long> numeric_stem(const fs::path& path) {
    const std::string stem = path.stem().string();
    if (stem.empty() || stem.size() > 18 ||
        !std::all_of(stem.begin(), stem.end(), [](unsigned char c) { return std::isdigit(c); })) {
        return std::nullopt;
    }
    return std::stoull(stem);
}

// libtiff reports through global handlers; silence them and surface our own errors.
struct TiffHandlerGuard {
    TIFFErrorHandler old_error = TIFFSetErrorHandler(nullptr);
    TIFFErrorHandler old_warning = TIFFSetWarningHandler(nullptr);
    ~TiffHandlerGuard() {
        TIFFSetErrorHandler(old_error);
        TIFFSetWarningHandler(old_warning);
    }
};

struct TiffCloser {
    void operator()(TIFF* tif) const { TIFFClose(tif); }
};
using TiffHandle = std::unique_ptr<TIFF, TiffCloser>;

std::vector<RawSlice> read_tiff(const fs::path& path) {
    TiffHandlerGuard guard;
    TiffHandle tif(TIFFOpen(path.c_str(), "r"));
    if (!tif) io_error("cannot open TIFF " + path.string());

    std::vector<RawSlice> pages;
    do {
        std::uint32_t width = 0, height = 0;
        std::uint16_t bits = 8, samples = 1, photometric = PHOTOMETRIC_MINISBLACK;
        TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &width);
        TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &height);
        TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bits);
        TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &samples);
        TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PHOTOMETRIC, &photometric);
        if (bits != 8 || samples != 1) {
            io_error(path.string() + ": only 8-bit single-channel TIFF pages are supported");
        }
        if (TIFFIsTiled(tif.get())) io_error(path.string() + ": tiled TIFF is not supported");
        if (width == 0 || height == 0) io_error(path.string() + ": empty TIFF page");

        RawSlice page{static_cast<int>(height), static_cast<int>(width),
                      Pixels(static_cast<std::size_t>(width) * height)};
        for (std::uint32_t row = 0; row < height; ++row) {
            if (TIFFReadScanline(tif.get(), page.pixels.data() + std::size_t{row} * width, row) < 0) {
                io_error(path.string() + ": failed to read scanline " + std::to_string(row));
            }
        }
        if (photometric == PHOTOMETRIC_MINISWHITE) {
            for (auto& v : page.pixels) v = static_cast<std::uint8_t>(255 - v);
        }
        pages.push_back(std::move(page));
    } while (TIFFReadDirectory(tif.get()));
    return pages;
}

void write_tiff(const std::vector<const Pixels*>& pages, int height, int width,
                const fs::path& path) {
    TiffHandlerGuard guard;
    TiffHandle tif(TIFFOpen(path.c_str(), "w"));
    if (!tif) io_error("cannot create TIFF " + path.string());

    const bool deflate = TIFFIsCODECConfigured(COMPRESSION_ADOBE_DEFLATE) != 0;
    const auto n_pages = static_cast<std::uint16_t>(pages.size());
    for (std::uint16_t p = 0; p < n_pages; ++p) {
        TIFF* t = tif.get();
        TIFFSetField(t, TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(width));
        TIFFSetField(t, TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(height));
        TIFFSetField(t, TIFFTAG_BITSPERSAMPLE, std::uint16_t{8});
        TIFFSetField(t, TIFFTAG_SAMPLESPERPIXEL, std::uint16_t{1});
        TIFFSetField(t, TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
        TIFFSetField(t, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
        TIFFSetField(t, TIFFTAG_COMPRESSION, deflate ? COMPRESSION_ADOBE_DEFLATE : COMPRESSION_NONE);
        TIFFSetField(t, TIFFTAG_ROWSPERSTRIP, TIFFDefaultStripSize(t, 0));
        TIFFSetField(t, TIFFTAG_SUBFILETYPE, FILETYPE_PAGE);
        TIFFSetField(t, TIFFTAG_PAGENUMBER, p, n_pages);
        auto* data = const_cast<std::uint8_t*>(pages[p]->data());
        for (int row = 0; row < height; ++row) {
            if (TIFFWriteScanline(t, data + static_cast<std::size_t>(row) * width,
                                  static_cast<std::uint32_t>(row), 0) < 0) {
                io_error(path.string() + ": failed to write scanline");
            }
        }
        if (!TIFFWriteDirectory(t)) io_error(path.string() + ": failed to write TIFF directory");
    }
}

RawSlice read_png(const fs::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        io_error("cannot read PNG " + path.string() + ": " + image.message);
    }
    image.format = PNG_FORMAT_GRAY;
    RawSlice slice{static_cast<int>(image.height), static_cast<int>(image.width),
                   Pixels(PNG_IMAGE_SIZE(image))};
    if (!png_image_finish_read(&image, nullptr, slice.pixels.data(), 0, nullptr)) {
        png_image_free(&image);
        io_error("cannot decode PNG " + path.string() + ": " + image.message);
    }
    return slice;
}

void write_png(const Pixels& pixels, int height, int width, const fs::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr)) {
        io_error("cannot write PNG " + path.string() + ": " + image.message);
    }
}

std::vector<fs::path> list_png_slices(const fs::path& dir) {
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && has_png_extension(entry.path())) {
            files.push_back(entry.path());
        }
    }
    if (ec) io_error("cannot list directory " + dir.string() + ": " + ec.message());

    const bool all_numeric = std::all_of(files.begin(), files.end(),
                                         [](const fs::path& p) { return numeric_stem(p).has_value(); });
    std::sort(files.begin(), files.end(), [all_numeric](const fs::path& a, const fs::path& b) {
        if (all_numeric) {
            const auto na = *numeric_stem(a), nb = *numeric_stem(b);
            if (na != nb) return na < nb;
        }
        return a.filename() < b.filename();
    });
    return files;
}

std::vector<RawSlice> read_raw_stack(const fs::path& path) {
    std::error_code ec;
    if (!fs::exists(path, ec)) io_error("no such file or directory: " + path.string());

    std::vector<RawSlice> slices;
    if (fs::is_directory(path, ec)) {
        const auto files = list_png_slices(path);
        if (files.empty()) {
            throw Error(ErrorCategory::EmptyInput, "no PNG slices in directory " + path.string());
        }
        slices.resize(files.size());
        parallel_for(files.size(), [&](std::size_t i) { slices[i] = read_png(files[i]); });
    } else if (path.extension() == ".png") {
        slices.push_back(read_png(path));
    } else {
        slices = read_tiff(path);
    }

    for (const auto& s : slices) {
        if (s.height != slices.front().height || s.width != slices.front().width) {
            throw Error(ErrorCategory::DimensionMismatch,
                        path.string() + ": slices have differing dimensions (" +
                            std::to_string(slices.front().height) + "x" +
                            std::to_string(slices.front().width) + " vs " +
                            std::to_string(s.height) + "x" + std::to_string(s.width) + ")");
        }
    }
    return slices;
}

std::string slice_file_name(int z, int depth) {
    int digits = 4;
    for (int d = depth - 1; d >= 10000; d /= 10) ++digits;
    std::string name = std::to_string(z);
    return std::string(static_cast<std::size_t>(std::max(0, digits - static_cast<int>(name.size()))), '0') +
           name + ".png";
}

void write_raw_stack(const std::vector<Pixels>& pages, int height, int width,
                     const fs::path& path) {
    if (has_tiff_extension(path)) {
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        std::vector<const Pixels*> refs;
        for (const auto& p : pages) refs.push_back(&p);
        write_tiff(refs, height, width, path);
        return;
    }

    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec) io_error("cannot create directory " + path.string() + ": " + ec.message());
    // Stale numbered slices from an earlier, deeper stack would corrupt a reload.
    for (const auto& old : list_png_slices(path)) {
        if (numeric_stem(old)) fs::remove(old, ec);
    }
    const int depth = static_cast<int>(pages.size());
    parallel_for(pages.size(), [&](std::size_t z) {
        write_png(pages[z], height, width, path / slice_file_name(static_cast<int>(z), depth));
    });
}

template <typename SliceT>
Pixels to_file_pixels(const SliceT& slice, std::uint8_t scale) {
    Pixels out(slice.pixels().begin(), slice.pixels().end());
    if (scale != 1) {
        for (auto& v : out) v = static_cast<std::uint8_t>(v * scale);
    }
    return out;
}

}  // namespace

std::string_view role_name(SliceRole role) noexcept {
    switch (role) {
    case SliceRole::GroundTruth: return "gt";
    case SliceRole::Coarse: return "coarse";
    case SliceRole::Soft: return "soft";
    }
    return "unknown";
}

LabelAtlas::LabelAtlas(int depth, std::vector<int> gt_indices, SliceRole other_role)
    : depth_(depth), gt_indices_(std::move(gt_indices)),
      roles_(static_cast<std::size_t>(std::max(depth, 0)), other_role) {
    if (depth < 1) throw Error(ErrorCategory::InvalidArgument, "atlas depth must be >= 1");
    if (other_role == SliceRole::GroundTruth) {
        throw Error(ErrorCategory::InvalidArgument, "non-GT slices cannot carry the GroundTruth role");
    }
    for (std::size_t k = 0; k < gt_indices_.size(); ++k) {
        const int z = gt_indices_[k];
        if (z < 0 || z >= depth) {
            throw Error(ErrorCategory::InvalidArgument,
                        "ground-truth index " + std::to_string(z) + " outside [0, " +
                            std::to_string(depth) + ")");
        }
        if (k > 0 && z <= gt_indices_[k - 1]) {
            throw Error(ErrorCategory::InvalidArgument,
                        "ground-truth indices must be strictly increasing");
        }
        roles_[static_cast<std::size_t>(z)] = SliceRole::GroundTruth;
    }
}

GrayStack load_gray_stack(const fs::path& path) {
    auto raw = read_raw_stack(path);
    std::vector<GraySlice> slices;
    slices.reserve(raw.size());
    for (auto& r : raw) slices.emplace_back(r.height, r.width, std::move(r.pixels));
    return GrayStack(std::move(slices));
}

MaskStack load_mask_stack(const fs::path& path) {
    auto raw = read_raw_stack(path);
    std::vector<MaskSlice> slices;
    slices.reserve(raw.size());
    for (auto& r : raw) {
        for (auto& v : r.pixels) v = v > 127 ? 1 : 0;
        slices.emplace_back(r.height, r.width, std::move(r.pixels));
    }
    return MaskStack(std::move(slices));
}

void save_stack(const GrayStack& stack, const fs::path& path) {
    if (stack.depth() == 0) throw Error(ErrorCategory::EmptyInput, "cannot save an empty stack");
    std::vector<Pixels> pages;
    for (const auto& s : stack) pages.push_back(to_file_pixels(s, 1));
    write_raw_stack(pages, stack.height(), stack.width(), path);
}

void save_stack(const MaskStack& stack, const fs::path& path) {
    if (stack.depth() == 0) throw Error(ErrorCategory::EmptyInput, "cannot save an empty stack");
    std::vector<Pixels> pages;
    for (const auto& s : stack) {
        validate_mask(s);
        pages.push_back(to_file_pixels(s, 255));
    }
    write_raw_stack(pages, stack.height(), stack.width(), path);
}

void save_png(const GraySlice& slice, const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_png(to_file_pixels(slice, 1), slice.height(), slice.width(), path);
}

void save_png(const MaskSlice& slice, const fs::path& path) {
    validate_mask(slice);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_png(to_file_pixels(slice, 255), slice.height(), slice.width(), path);
}

void save_rgb_png(std::span<const std::uint8_t> rgb, int height, int width, const fs::path& path) {
    if (rgb.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * 3) {
        throw Error(ErrorCategory::DimensionMismatch, "RGB buffer does not match image size");
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.c_str(), 0, rgb.data(), 0, nullptr)) {
        io_error("cannot write PNG " + path.string() + ": " + image.message);
    }
}

std::vector<int> select_labeled_slices(int depth, int count) {
    if (count < 1 || depth < 1 || count > depth) {
        throw Error(ErrorCategory::InvalidArgument,
                    "need 1 <= count <= depth, got count=" + std::to_string(count) +
                        " depth=" + std::to_string(depth));
    }
    const int stride = depth / count;
    // Leftover slices are split across both ends; an odd leftover goes to the front.
    const int slack = depth - (count - 1) * stride - 1;
    const int offset = (slack + 1) / 2;
    std::vector<int> indices(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) indices[static_cast<std::size_t>(k)] = offset + k * stride;
    return indices;
}

void export_training_pairs(const MaskStack& coarse, const MaskStack& refined,
                           const LabelAtlas& atlas, int n, const fs::path& dir) {
    require_same_stack_shape(coarse, refined, "coarse vs refined stack");
    if (atlas.depth() != coarse.depth()) {
        throw Error(ErrorCategory::DimensionMismatch,
                    "atlas depth " + std::to_string(atlas.depth()) + " vs stack depth " +
                        std::to_string(coarse.depth()));
    }
    if (n < 1 || n % 2 == 0) {
        throw Error(ErrorCategory::InvalidArgument,
                    "window size must be odd and >= 1, got " + std::to_string(n));
    }

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) io_error("cannot create directory " + dir.string() + ": " + ec.message());

    const int depth = coarse.depth();
    auto stem = [depth](int z) {
        const std::string file = slice_file_name(z, depth);
        return "pair_" + file.substr(0, file.size() - 4);
    };

    parallel_for(static_cast<std::size_t>(depth), [&](std::size_t i) {
        const int z = static_cast<int>(i);
        const auto window = assemble_window(coarse, z, n);
        std::vector<Pixels> channels;
        for (const auto& c : window.channels) channels.push_back(to_file_pixels(c, 255));
        std::vector<const Pixels*> refs;
        for (const auto& c : channels) refs.push_back(&c);
        write_tiff(refs, coarse.height(), coarse.width(), dir / (stem(z) + "_input.tif"));
        write_png(to_file_pixels(refined[z], 255), coarse.height(), coarse.width(),
                  dir / (stem(z) + "_target.png"));
    });

    nlohmann::json manifest;
    manifest["n_channels"] = n;
    manifest["depth"] = depth;
    manifest["height"] = coarse.height();
    manifest["width"] = coarse.width();
    auto& pairs = manifest["pairs"] = nlohmann::json::array();
    for (int z = 0; z < depth; ++z) {
        pairs.push_back({{"center", z},
                         {"input", stem(z) + "_input.tif"},
                         {"target", stem(z) + "_target.png"},
                         {"role", atlas.is_gt(z) ? "gt" : "soft"}});
    }
    std::ofstream out(dir / "manifest.json");
    if (!out) io_error("cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
}

}  // namespace emrefine
