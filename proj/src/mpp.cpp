#include "emrefine/mpp.hpp"

#include <algorithm>
#include <string>

#include "emrefine/parallel.hpp"

namespace emrefine {

namespace {

// Nearest ground-truth index strictly below / above z, if any.
std::optional<int> gt_below(const std::vector<int>& gt, int z) {
    auto it = std::lower_bound(gt.begin(), gt.end(), z);
    if (it == gt.begin()) return std::nullopt;
    return *std::prev(it);
}

std::optional<int> gt_above(const std::vector<int>& gt, int z) {
    auto it = std::upper_bound(gt.begin(), gt.end(), z);
    if (it == gt.end()) return std::nullopt;
    return *it;
}

std::size_t stack_foreground(const MaskStack& s) {
    std::size_t total = 0;
    for (const auto& slice : s) total += foreground_count(slice);
    return total;
}

void validate(const MaskStack& coarse, const MaskStack& gt, const LabelAtlas& atlas,
              const MppConfig& cfg) {
    require_same_stack_shape(coarse, gt, "coarse vs ground-truth stack");
    if (atlas.depth() != coarse.depth()) {
        throw Error(ErrorCategory::DimensionMismatch,
                    "atlas depth " + std::to_string(atlas.depth()) + " vs stack depth " +
                        std::to_string(coarse.depth()));
    }
    if (atlas.gt_indices().empty()) {
        throw Error(ErrorCategory::InvalidArgument, "refinement needs at least one ground-truth slice");
    }
    if (cfg.erosion_n < 0) throw Error(ErrorCategory::InvalidArgument, "erosion n must be >= 0");
    if (cfg.max_gap && *cfg.max_gap < 1) {
        throw Error(ErrorCategory::InvalidArgument, "max gap must be >= 1");
    }
}

}  // namespace

int resolve_max_gap(const MppConfig& cfg, const LabelAtlas& atlas) {
    if (cfg.max_gap) return *cfg.max_gap;
    const auto& gt = atlas.gt_indices();
    int widest = 1;
    for (std::size_t k = 1; k < gt.size(); ++k) widest = std::max(widest, gt[k] - gt[k - 1]);
    return widest;
}

MaskSlice foreground_union_step(const MaskSlice& coarse, const MaskSlice& gt, int distance,
                                const MppConfig& cfg) {
    require_same_shape(coarse, gt, "foreground union");
    if (distance < 1) throw Error(ErrorCategory::InvalidArgument, "slice distance must be >= 1");
    const MaskSlice core = remove_small_components(erode(gt, cfg.erosion_n * distance), cfg.t_c);
    return unite(coarse, core);
}

MaskSlice continuity_intersect_step(const MaskSlice& a, const MaskSlice& left,
                                    const MaskSlice& right) {
    return intersect(a, unite(left, right));
}

MaskSlice continuity_union_step(const MaskSlice& a, const MaskSlice& left,
                                const MaskSlice& right) {
    return unite(a, intersect(left, right));
}

MaskStack run_mpp(const MaskStack& coarse, const MaskStack& gt, const LabelAtlas& atlas,
                  const MppConfig& cfg, MppTrace* trace) {
    validate(coarse, gt, atlas, cfg);
    const auto& gt_idx = atlas.gt_indices();
    const int depth = coarse.depth();
    const int reach = resolve_max_gap(cfg, atlas) + 1;
    const auto all_slices = static_cast<std::size_t>(depth);

    // Phase 1: ground truth passes through verbatim.
    MaskStack s = coarse;
    for (int z : gt_idx) s[z] = gt[z];
    if (trace) trace->phases[0] = s;

    // Phase 2: union with the eroded nearest ground truth.
    {
        const MaskStack before = s;
        parallel_for(all_slices, [&](std::size_t i) {
            const int z = static_cast<int>(i);
            if (atlas.is_gt(z)) return;
            const auto lo = gt_below(gt_idx, z), hi = gt_above(gt_idx, z);
            int nearest = lo ? *lo : *hi;
            if (lo && hi && *hi - z < z - *lo) nearest = *hi;
            s[z] = foreground_union_step(before[z], gt[nearest], std::abs(z - nearest), cfg);
        });
    }
    if (trace) trace->phases[1] = s;

    // Phase 3: continuity against the bracketing ground-truth pair.
    {
        const MaskStack before = s;
        parallel_for(all_slices, [&](std::size_t i) {
            const int z = static_cast<int>(i);
            if (atlas.is_gt(z)) return;
            const auto lo = gt_below(gt_idx, z), hi = gt_above(gt_idx, z);
            if (!lo || !hi || z - *lo > reach || *hi - z > reach) return;
            const auto& left = gt[*lo];
            const auto& right = gt[*hi];
            s[z] = continuity_union_step(continuity_intersect_step(before[z], left, right), left,
                                         right);
        });
    }
    if (trace) trace->phases[2] = s;

    // Phase 4: continuity against immediate neighbors of the phase-3 stack.
    {
        const MaskStack before = s;
        parallel_for(all_slices, [&](std::size_t i) {
            const int z = static_cast<int>(i);
            if (atlas.is_gt(z) || z == 0 || z == depth - 1) return;
            const auto& left = before[z - 1];
            const auto& right = before[z + 1];
            s[z] = continuity_union_step(continuity_intersect_step(before[z], left, right), left,
                                         right);
        });
    }
    if (trace) {
        trace->phases[3] = s;
        for (std::size_t p = 0; p < 4; ++p) trace->foreground[p] = stack_foreground(trace->phases[p]);
    }
    return s;
}

}  // namespace emrefine
