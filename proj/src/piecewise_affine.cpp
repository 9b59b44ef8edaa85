#include <algorithm>
#include <cmath>
#include <string>

#include "emrefine/augment.hpp"
#include "emrefine/rng.hpp"

namespace emrefine {

namespace {

constexpr int kMaxSampleAttempts = 16;
constexpr double kMinTriangleArea = 1.0;
constexpr double kMaxVertexResidual = 1e-9;

double det2(double a, double b, double c, double d) { return a * d - b * c; }

double triangle_area(const Point2& a, const Point2& b, const Point2& c) {
    return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

std::vector<Point2> control_grid(int height, int width, int rows, int cols) {
    std::vector<Point2> pts;
    pts.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            pts.push_back({static_cast<double>(c) * (width - 1) / (cols - 1),
                           static_cast<double>(r) * (height - 1) / (rows - 1)});
        }
    }
    return pts;
}

}  // namespace

AffineParams solve_affine(const std::array<Point2, 3>& src, const std::array<Point2, 3>& dst) {
    // Edge vectors relative to vertex 0; the linear part M solves M·D = S.
    const double d00 = dst[1].x - dst[0].x, d01 = dst[2].x - dst[0].x;
    const double d10 = dst[1].y - dst[0].y, d11 = dst[2].y - dst[0].y;
    const double s00 = src[1].x - src[0].x, s01 = src[2].x - src[0].x;
    const double s10 = src[1].y - src[0].y, s11 = src[2].y - src[0].y;

    const double det = det2(d00, d01, d10, d11);
    const double scale = std::max({std::abs(d00), std::abs(d01), std::abs(d10), std::abs(d11)});
    if (det == 0.0 || std::abs(det) <= 1e-12 * scale * scale) {
        throw Error(ErrorCategory::DegenerateTriangle, "destination triangle is collinear");
    }

    // M = S·adj(D)/det. The numerators reuse det2 so that S == D gives the
    // identity exactly.
    AffineParams p;
    p.a1 = det2(s00, s01, d10, d11) / det;
    p.a2 = det2(s01, s00, d01, d00) / det;
    p.b1 = det2(s10, s11, d10, d11) / det;
    p.b2 = det2(s11, s10, d01, d00) / det;
    p.c1 = src[0].x - (p.a1 * dst[0].x + p.a2 * dst[0].y);
    p.c2 = src[0].y - (p.b1 * dst[0].x + p.b2 * dst[0].y);
    return p;
}

PiecewiseWarp sample_piecewise_warp(int height, int width, const PiecewiseAffineConfig& cfg) {
    if (height < 1 || width < 1) {
        throw Error(ErrorCategory::InvalidArgument, "piecewise warp needs a non-empty image");
    }
    if (!(cfg.sigma_p_min >= 0.0) || !(cfg.sigma_p_min <= cfg.sigma_p_max) ||
        !std::isfinite(cfg.sigma_p_max)) {
        throw Error(ErrorCategory::InvalidArgument, "need 0 <= sigma_p_min <= sigma_p_max");
    }
    if (cfg.grid_rows < 2 || cfg.grid_cols < 2) {
        throw Error(ErrorCategory::InvalidArgument, "control grid needs at least 2x2 points");
    }

    const auto src = control_grid(height, width, cfg.grid_rows, cfg.grid_cols);
    Rng rng(cfg.seed);
    for (int attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
        const double sigma_p = cfg.sigma_p_min == cfg.sigma_p_max
                                   ? cfg.sigma_p_min
                                   : rng.uniform(cfg.sigma_p_min, cfg.sigma_p_max);
        // Displacement step = image size along each axis.
        std::vector<Point2> dst = src;
        for (auto& p : dst) {
            p.x += width * sigma_p * rng.normal();
            p.y += height * sigma_p * rng.normal();
        }

        PiecewiseWarp warp{height, width, sigma_p, src, dst, {}, {}};
        try {
            warp.triangles = delaunay_triangulate(dst);
        } catch (const Error&) {
            continue;
        }
        const bool degenerate = std::any_of(warp.triangles.begin(), warp.triangles.end(), [&](const Triangle& t) {
            return triangle_area(dst[t[0]], dst[t[1]], dst[t[2]]) < kMinTriangleArea ||
                   triangle_area(src[t[0]], src[t[1]], src[t[2]]) < kMinTriangleArea;
        });
        if (degenerate || warp.triangles.empty()) continue;

        for (const auto& t : warp.triangles) {
            const std::array<Point2, 3> s{src[t[0]], src[t[1]], src[t[2]]};
            const std::array<Point2, 3> d{dst[t[0]], dst[t[1]], dst[t[2]]};
            const AffineParams params = solve_affine(s, d);
            for (int k = 0; k < 3; ++k) {
                const Point2 mapped = params.apply(d[k]);
                if (std::abs(mapped.x - s[k].x) >= kMaxVertexResidual ||
                    std::abs(mapped.y - s[k].y) >= kMaxVertexResidual) {
                    throw Error(ErrorCategory::DegenerateTriangle,
                                "affine fit residual exceeds tolerance");
                }
            }
            warp.params.push_back(params);
        }
        return warp;
    }
    throw Error(ErrorCategory::SamplingFailure,
                std::to_string(kMaxSampleAttempts) + " consecutive degenerate piecewise-affine draws");
}

}  // namespace emrefine
