#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "emrefine/stack.hpp"

namespace emrefine {

enum class SliceRole { GroundTruth, Coarse, Soft };

std::string_view role_name(SliceRole role) noexcept;

/// Per-slice role assignment plus the sorted ground-truth index set.
class LabelAtlas {
public:
    /// Slices listed in gt_indices are GroundTruth; every other slice gets
    /// `other_role`. Throws InvalidArgument unless gt_indices is strictly
    /// increasing and inside [0, depth).
    LabelAtlas(int depth, std::vector<int> gt_indices,
               SliceRole other_role = SliceRole::Coarse);

    int depth() const noexcept { return depth_; }
    const std::vector<int>& gt_indices() const noexcept { return gt_indices_; }
    SliceRole role(int z) const { return roles_.at(static_cast<std::size_t>(z)); }
    bool is_gt(int z) const { return role(z) == SliceRole::GroundTruth; }

private:
    int depth_;
    std::vector<int> gt_indices_;
    std::vector<SliceRole> roles_;
};

/// N adjacent planes centered on one slice, nearest-padded at the stack ends.
template <typename SliceT>
struct SliceWindow {
    int center = 0;
    std::vector<SliceT> channels;

    int n_channels() const noexcept { return static_cast<int>(channels.size()); }
};

/// Loads a multi-page 8-bit TIFF, a single PNG as a one-slice stack, or a
/// directory of PNG slices ordered by filename.
GrayStack load_gray_stack(const std::filesystem::path& path);

/// Same sources as load_gray_stack; pixels > 127 become 1, everything else 0.
MaskStack load_mask_stack(const std::filesystem::path& path);

/// Writes a multi-page TIFF when the path ends in .tif/.tiff, otherwise a
/// directory of zero-padded PNG slices (0000.png, 0001.png, ...).
void save_stack(const GrayStack& stack, const std::filesystem::path& path);

/// As above; mask voxels are written as 0/255.
void save_stack(const MaskStack& stack, const std::filesystem::path& path);

/// Single-slice PNG writers; masks are written as 0/255.
void save_png(const GraySlice& slice, const std::filesystem::path& path);
void save_png(const MaskSlice& slice, const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG from interleaved row-major pixels (3 bytes each).
void save_rgb_png(std::span<const std::uint8_t> rgb, int height, int width,
                  const std::filesystem::path& path);

/// `count` equally spaced slice indices centered in a stack of `depth` slices.
std::vector<int> select_labeled_slices(int depth, int count);

/// Slice index feeding channel k of an n-channel window centered at `center`.
constexpr int window_source_index(int center, int n, int k, int depth) noexcept {
    const int z = center - (n - 1) / 2 + k;
    return z < 0 ? 0 : (z >= depth ? depth - 1 : z);
}

template <typename SliceT>
SliceWindow<SliceT> assemble_window(const Stack<SliceT>& stack, int center, int n) {
    if (n < 1 || n % 2 == 0) {
        throw Error(ErrorCategory::InvalidArgument,
                    "window size must be odd and >= 1, got " + std::to_string(n));
    }
    if (center < 0 || center >= stack.depth()) {
        throw Error(ErrorCategory::InvalidArgument,
                    "window center " + std::to_string(center) + " outside stack of depth " +
                        std::to_string(stack.depth()));
    }
    SliceWindow<SliceT> window;
    window.center = center;
    window.channels.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        window.channels.push_back(stack[window_source_index(center, n, k, stack.depth())]);
    }
    return window;
}

/// Writes one (n-channel coarse window, refined target) pair per slice into
/// `dir`, plus manifest.json describing every pair and its target role.
/// Inputs are multi-page TIFFs, targets single PNGs.
void export_training_pairs(const MaskStack& coarse, const MaskStack& refined,
                           const LabelAtlas& atlas, int n,
                           const std::filesystem::path& dir);

}  // namespace emrefine
