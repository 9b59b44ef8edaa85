#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "emrefine/morphology.hpp"
#include "emrefine/stack.hpp"
#include "emrefine/stack_io.hpp"

namespace emrefine {

/// Morphological post-processing parameters.
struct MppConfig {
    /// Erosion rounds per slice of distance to the nearest ground truth.
    int erosion_n = 3;
    /// Components of the eroded ground truth smaller than this are dropped.
    std::size_t t_c = 64;
    /// Largest run of unlabeled slices bridged by the ground-truth continuity
    /// pass; each bracketing slice must lie within max_gap + 1 slices.
    /// Unset means the widest interval between consecutive ground-truth slices.
    std::optional<int> max_gap;
};

/// max_gap after applying the default for this atlas.
int resolve_max_gap(const MppConfig& cfg, const LabelAtlas& atlas);

/// coarse ∪ remove_small_components(erode(gt, n·distance), t_c).
MaskSlice foreground_union_step(const MaskSlice& coarse, const MaskSlice& gt, int distance,
                                const MppConfig& cfg);

/// a ∩ (left ∪ right): drops pixels present in neither neighbor.
MaskSlice continuity_intersect_step(const MaskSlice& a, const MaskSlice& left,
                                    const MaskSlice& right);

/// a ∪ (left ∩ right): fills pixels present in both neighbors.
MaskSlice continuity_union_step(const MaskSlice& a, const MaskSlice& left,
                                const MaskSlice& right);

/// Stack snapshots after each of the four phases, plus their foreground totals.
struct MppTrace {
    std::array<MaskStack, 4> phases;
    std::array<std::size_t, 4> foreground{};
};

/// Refines a coarse stack into soft labels:
///   1. ground-truth slices replace their coarse slices;
///   2. every other slice is united with the eroded nearest ground truth
///      (ties toward the lower index), erosion rounds = n·|i−j|;
///   3. slices bracketed by ground truth on both sides within max_gap + 1
///      get the continuity intersect then union step against that pair;
///   4. every non-GT slice with two neighbors repeats step 3 against its
///      immediate neighbors, read from the frozen phase-3 result.
/// Ground-truth slices of the output equal `gt` exactly.
MaskStack run_mpp(const MaskStack& coarse, const MaskStack& gt, const LabelAtlas& atlas,
                  const MppConfig& cfg, MppTrace* trace = nullptr);

}  // namespace emrefine
