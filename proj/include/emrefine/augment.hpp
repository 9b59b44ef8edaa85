#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "emrefine/plane.hpp"

namespace emrefine {

enum class Interp { Bilinear, Nearest };

// ---------------------------------------------------------------------------
// Sampling

/// Samples `src` at real coordinates (x, y), clamped to the image edge.
/// Integer pixel types are rounded to nearest after bilinear interpolation.
template <typename P>
typename P::value_type sample_clamped(const P& src, double x, double y, Interp interp);

// ---------------------------------------------------------------------------
// Elastic deformation

struct DisplacementField {
    int height = 0;
    int width = 0;
    std::vector<double> dx;  ///< row-major, pixels
    std::vector<double> dy;
};

struct ElasticConfig {
    double alpha = 40.0;    ///< deformation intensity
    double sigma_e = 5.0;   ///< Gaussian smoothing std in pixels
    std::uint64_t seed = 0;
};

/// Normalized 1D Gaussian taps for std `sigma`, radius ceil(3·sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Uniform(−1, 1) noise per pixel for dx then dy (raster order), smoothed by
/// a separable normalized Gaussian with reflective borders, scaled by alpha.
DisplacementField sample_elastic_field(int height, int width, const ElasticConfig& cfg);

/// Pull-back warp: output(x, y) = src(x + dx(x, y), y + dy(x, y)).
template <typename P>
P warp_displacement(const P& src, const DisplacementField& field, Interp interp);

// ---------------------------------------------------------------------------
// Piecewise affine transformation

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

/// u = a1·x + a2·y + c1, v = b1·x + b2·y + c2.
struct AffineParams {
    double a1 = 1.0, a2 = 0.0, b1 = 0.0, b2 = 1.0, c1 = 0.0, c2 = 0.0;

    Point2 apply(Point2 p) const noexcept {
        return {a1 * p.x + a2 * p.y + c1, b1 * p.x + b2 * p.y + c2};
    }
    double determinant() const noexcept { return a1 * b2 - a2 * b1; }
    friend bool operator==(const AffineParams&, const AffineParams&) = default;
};

using Triangle = std::array<int, 3>;

/// Affine map sending each dst vertex onto the matching src vertex, i.e. the
/// pull-back used to fetch source pixels for destination coordinates.
/// Throws DegenerateTriangle when dst is collinear.
AffineParams solve_affine(const std::array<Point2, 3>& src, const std::array<Point2, 3>& dst);

/// Delaunay triangulation (Bowyer-Watson). Triangles have positive signed
/// area, are listed in lexicographic order, and cocircular quads are split
/// along the diagonal joining their min(x−y) and max(x−y) corners, i.e. the
/// lower-left to upper-right diagonal in image coordinates.
std::vector<Triangle> delaunay_triangulate(const std::vector<Point2>& points);

struct PiecewiseAffineConfig {
    double sigma_p_min = 0.01;
    double sigma_p_max = 0.05;
    int grid_rows = 2;
    int grid_cols = 2;
    std::uint64_t seed = 0;
};

struct PiecewiseWarp {
    int height = 0;
    int width = 0;
    double sigma_p = 0.0;
    std::vector<Point2> src_points;
    std::vector<Point2> dst_points;
    std::vector<Triangle> triangles;     ///< over dst_points
    std::vector<AffineParams> params;    ///< one per triangle, dst -> src
};

/// Regular control grid displaced by image-size·N(0, sigma_p) per axis, with
/// sigma_p ~ U[sigma_p_min, sigma_p_max]. Draws yielding a triangle under
/// 1 px² are rejected; 16 consecutive rejections throw SamplingFailure.
PiecewiseWarp sample_piecewise_warp(int height, int width, const PiecewiseAffineConfig& cfg);

/// Index of the first triangle containing each output pixel, or -1.
std::vector<int> triangle_owner_map(const PiecewiseWarp& warp);

/// Each output pixel is pulled through the affine map of the lowest-indexed
/// dst triangle containing it; pixels outside every triangle are sampled in place.
template <typename P>
P warp_piecewise(const P& src, const PiecewiseWarp& warp, Interp interp);

// ---------------------------------------------------------------------------
// Dihedral symmetries of the square

/// Horizontal flip (codes 4..7) followed by (code % 4) quarter turns
/// counter-clockwise.
enum class Dihedral : std::uint8_t {
    Identity = 0,
    Rot90,
    Rot180,
    Rot270,
    Flip,
    FlipRot90,
    FlipRot180,
    FlipRot270,
};

inline constexpr std::array<Dihedral, 8> kAllDihedral = {
    Dihedral::Identity, Dihedral::Rot90,     Dihedral::Rot180,     Dihedral::Rot270,
    Dihedral::Flip,     Dihedral::FlipRot90, Dihedral::FlipRot180, Dihedral::FlipRot270,
};

constexpr Dihedral inverse(Dihedral code) noexcept {
    const auto c = static_cast<std::uint8_t>(code);
    return c >= 4 ? code : static_cast<Dihedral>((4 - c) % 4);
}

template <typename P>
P flip_rotate(const P& src, Dihedral code);

// ---------------------------------------------------------------------------
// Joint image/mask augmentation

struct AugmentConfig {
    bool flip_rotate = true;
    std::optional<PiecewiseAffineConfig> piecewise = PiecewiseAffineConfig{};
    std::optional<ElasticConfig> elastic;  ///< off by default
};

struct AugmentedPair {
    GraySlice image;
    MaskSlice mask;
    Dihedral code = Dihedral::Identity;
};

/// Draws one transform chain (dihedral code, then piecewise affine, then
/// elastic when enabled) from Rng(seed, stream) and applies it to the image
/// (bilinear) and the mask (nearest). Seeds inside `cfg` are ignored.
AugmentedPair augment_pair(const GraySlice& image, const MaskSlice& mask,
                           const AugmentConfig& cfg, std::uint64_t seed,
                           std::uint64_t stream = 0);

}  // namespace emrefine
