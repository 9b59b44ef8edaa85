#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "emrefine/plane.hpp"

namespace emrefine {

struct LabelTag {};
using LabelPlane = Plane<std::int32_t, LabelTag>;

/// 8-connected component labeling of a binary slice.
struct ComponentLabeling {
    LabelPlane labels;              ///< 0 = background, components 1..count
    int count = 0;
    std::vector<std::size_t> sizes; ///< sizes[c] = pixels with label c; sizes[0] is the background

    std::size_t size_of(int label) const { return sizes.at(static_cast<std::size_t>(label)); }
};

/// Erosion with the 3x3 all-ones kernel repeated `times` times. Pixels outside
/// the slice count as background, so foreground touching the border shrinks.
MaskSlice erode(const MaskSlice& slice, int times);

MaskSlice unite(const MaskSlice& a, const MaskSlice& b);
MaskSlice intersect(const MaskSlice& a, const MaskSlice& b);
MaskSlice complement(const MaskSlice& a);

std::size_t foreground_count(const MaskSlice& slice) noexcept;

/// Labels are assigned in raster order of each component's first pixel.
ComponentLabeling connected_components(const MaskSlice& slice);

/// Clears every 8-connected component smaller than `min_size` pixels.
MaskSlice remove_small_components(const MaskSlice& slice, std::size_t min_size);

}  // namespace emrefine
