#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "emrefine/augment.hpp"
#include "emrefine/stack.hpp"

namespace emrefine {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Pixelwise counts with foreground (1) as the positive class.
ConfusionCounts confusion(const MaskSlice& pred, const MaskSlice& gt);
/// Micro-average: counts summed over every voxel.
ConfusionCounts confusion(const MaskStack& pred, const MaskStack& gt);

/// tp / (tp + fp + fn); 1.0 when both masks are empty.
double iou(const ConfusionCounts& c) noexcept;
/// 2tp / (2tp + fp + fn); 1.0 when both masks are empty.
double dice(const ConfusionCounts& c) noexcept;

struct RgbTag {};
using Rgb = std::array<std::uint8_t, 3>;
using RgbImage = Plane<Rgb, RgbTag>;

inline constexpr Rgb kTruePositiveColor{0, 255, 0};
inline constexpr Rgb kFalseNegativeColor{255, 0, 0};
inline constexpr Rgb kFalsePositiveColor{0, 0, 255};
inline constexpr Rgb kTrueNegativeColor{0, 0, 0};

/// TP green, FN red, FP blue, TN black.
RgbImage overlay(const MaskSlice& pred, const MaskSlice& gt);

/// Averages eight predictions made on dihedrally transformed inputs after
/// mapping each back with the inverse of its code. The sum runs in code
/// order as a balanced tree, so the result does not depend on argument
/// order and eight equal maps average to themselves exactly.
ProbMap rot8_average(std::span<const ProbMap> maps, std::span<const Dihedral> codes);

/// 1 where value >= threshold.
MaskSlice binarize(const ProbMap& map, double threshold = 0.5);

}  // namespace emrefine
