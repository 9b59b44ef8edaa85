#include "emrefine/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace emrefine {

ConfusionCounts confusion(const MaskSlice& pred, const MaskSlice& gt) {
    require_same_shape(pred, gt, "confusion");
    std::array<std::uint64_t, 4> bins{};  // index = 2·pred + gt
    const auto p = pred.pixels(), g = gt.pixels();
    for (std::size_t i = 0; i < p.size(); ++i) ++bins[static_cast<std::size_t>(2 * p[i] + g[i])];
    return {bins[3], bins[2], bins[1], bins[0]};
}

ConfusionCounts confusion(const MaskStack& pred, const MaskStack& gt) {
    require_same_stack_shape(pred, gt, "confusion");
    ConfusionCounts total;
    for (int z = 0; z < pred.depth(); ++z) total += confusion(pred[z], gt[z]);
    return total;
}

double iou(const ConfusionCounts& c) noexcept {
    const std::uint64_t denom = c.tp + c.fp + c.fn;
    return denom == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double dice(const ConfusionCounts& c) noexcept {
    const std::uint64_t denom = 2 * c.tp + c.fp + c.fn;
    return denom == 0 ? 1.0 : static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

RgbImage overlay(const MaskSlice& pred, const MaskSlice& gt) {
    require_same_shape(pred, gt, "overlay");
    static constexpr std::array<Rgb, 4> palette{kTrueNegativeColor, kFalseNegativeColor,
                                                kFalsePositiveColor, kTruePositiveColor};
    RgbImage out(pred.height(), pred.width());
    const auto p = pred.pixels(), g = gt.pixels();
    auto o = out.pixels();
    for (std::size_t i = 0; i < p.size(); ++i) o[i] = palette[static_cast<std::size_t>(2 * p[i] + g[i])];
    return out;
}

ProbMap rot8_average(std::span<const ProbMap> maps, std::span<const Dihedral> codes) {
    if (maps.size() != 8 || codes.size() != 8) {
        throw Error(ErrorCategory::InvalidArgument, "rotation ensemble needs exactly 8 maps and codes");
    }
    std::array<int, 8> slot;
    slot.fill(-1);
    for (std::size_t k = 0; k < 8; ++k) {
        auto& s = slot[static_cast<std::size_t>(codes[k])];
        if (s >= 0) throw Error(ErrorCategory::InvalidArgument, "duplicate dihedral code in ensemble");
        s = static_cast<int>(k);
    }

    std::array<ProbMap, 8> restored;
    for (std::size_t c = 0; c < 8; ++c) {
        const auto k = static_cast<std::size_t>(slot[c]);
        const auto px = maps[k].pixels();
        if (std::any_of(px.begin(), px.end(), [](double v) { return !(v >= 0.0 && v <= 1.0); })) {
            throw Error(ErrorCategory::InvalidArgument, "probability map values must lie in [0, 1]");
        }
        restored[c] = flip_rotate(maps[k], inverse(static_cast<Dihedral>(c)));
        if (!restored[c].same_shape(restored[0])) {
            throw Error(ErrorCategory::DimensionMismatch,
                        "ensemble maps differ in size after inverse transform");
        }
    }

    ProbMap out(restored[0].height(), restored[0].width());
    auto o = out.pixels();
    for (std::size_t i = 0; i < o.size(); ++i) {
        auto v = [&](std::size_t c) { return restored[c].pixels()[i]; };
        const double sum = ((v(0) + v(1)) + (v(2) + v(3))) + ((v(4) + v(5)) + (v(6) + v(7)));
        o[i] = std::clamp(sum / 8.0, 0.0, 1.0);
    }
    return out;
}

MaskSlice binarize(const ProbMap& map, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw Error(ErrorCategory::InvalidArgument, "threshold must lie in [0, 1]");
    }
    MaskSlice out(map.height(), map.width());
    std::transform(map.pixels().begin(), map.pixels().end(), out.pixels().begin(),
                   [threshold](double v) { return static_cast<std::uint8_t>(v >= threshold); });
    return out;
}

}  // namespace emrefine
