#include <algorithm>
#include <cmath>
#include <type_traits>

#include "emrefine/augment.hpp"

namespace emrefine {

namespace {

constexpr double kEdgeTolerance = 1e-9;

double clamp_coord(double v, int size) {
    if (!(v > 0.0)) return 0.0;  // also maps NaN to the edge
    const double hi = static_cast<double>(size - 1);
    return v > hi ? hi : v;
}

template <typename T>
T from_real(double v) {
    if constexpr (std::is_integral_v<T>) {
        return static_cast<T>(std::lround(v));
    } else {
        return static_cast<T>(v);
    }
}

bool contains(const Point2& a, const Point2& b, const Point2& c, double x, double y) {
    auto edge = [](const Point2& p, const Point2& q, double px, double py) {
        return (q.x - p.x) * (py - p.y) - (q.y - p.y) * (px - p.x);
    };
    const double e0 = edge(a, b, x, y), e1 = edge(b, c, x, y), e2 = edge(c, a, x, y);
    const double area2 = edge(a, b, c.x, c.y);
    const double tol = kEdgeTolerance * std::abs(area2);
    if (area2 > 0) return e0 >= -tol && e1 >= -tol && e2 >= -tol;
    return e0 <= tol && e1 <= tol && e2 <= tol;
}

template <typename P>
P rotate_ccw(const P& src) {
    const int h = src.height(), w = src.width();
    P out(w, h);
    for (int i = 0; i < w; ++i) {
        for (int j = 0; j < h; ++j) out(i, j) = src(j, w - 1 - i);
    }
    return out;
}

template <typename P>
P mirror_horizontal(const P& src) {
    P out(src.height(), src.width());
    for (int y = 0; y < src.height(); ++y) {
        for (int x = 0; x < src.width(); ++x) out(y, x) = src(y, src.width() - 1 - x);
    }
    return out;
}

}  // namespace

template <typename P>
typename P::value_type sample_clamped(const P& src, double x, double y, Interp interp) {
    using T = typename P::value_type;
    x = clamp_coord(x, src.width());
    y = clamp_coord(y, src.height());
    if (interp == Interp::Nearest) {
        return src(static_cast<int>(std::floor(y + 0.5)), static_cast<int>(std::floor(x + 0.5)));
    }
    const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, src.width() - 1), y1 = std::min(y0 + 1, src.height() - 1);
    const double fx = x - x0, fy = y - y0;
    const double top = static_cast<double>(src(y0, x0)) * (1.0 - fx) + static_cast<double>(src(y0, x1)) * fx;
    const double bottom = static_cast<double>(src(y1, x0)) * (1.0 - fx) + static_cast<double>(src(y1, x1)) * fx;
    return from_real<T>(top * (1.0 - fy) + bottom * fy);
}

template <typename P>
P warp_displacement(const P& src, const DisplacementField& field, Interp interp) {
    if (src.height() != field.height || src.width() != field.width) {
        throw Error(ErrorCategory::DimensionMismatch, "displacement field does not match image size");
    }
    P out(src.height(), src.width());
    std::size_t i = 0;
    for (int y = 0; y < src.height(); ++y) {
        for (int x = 0; x < src.width(); ++x, ++i) {
            out(y, x) = sample_clamped(src, x + field.dx[i], y + field.dy[i], interp);
        }
    }
    return out;
}

std::vector<int> triangle_owner_map(const PiecewiseWarp& warp) {
    const int h = warp.height, w = warp.width;
    std::vector<int> owner(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), -1);
    for (std::size_t t = 0; t < warp.triangles.size(); ++t) {
        const auto& tri = warp.triangles[t];
        const Point2& a = warp.dst_points[static_cast<std::size_t>(tri[0])];
        const Point2& b = warp.dst_points[static_cast<std::size_t>(tri[1])];
        const Point2& c = warp.dst_points[static_cast<std::size_t>(tri[2])];
        const int x_lo = std::max(0, static_cast<int>(std::floor(std::min({a.x, b.x, c.x}))));
        const int x_hi = std::min(w - 1, static_cast<int>(std::ceil(std::max({a.x, b.x, c.x}))));
        const int y_lo = std::max(0, static_cast<int>(std::floor(std::min({a.y, b.y, c.y}))));
        const int y_hi = std::min(h - 1, static_cast<int>(std::ceil(std::max({a.y, b.y, c.y}))));
        for (int y = y_lo; y <= y_hi; ++y) {
            for (int x = x_lo; x <= x_hi; ++x) {
                auto& o = owner[static_cast<std::size_t>(y) * w + x];
                if (o < 0 && contains(a, b, c, x, y)) o = static_cast<int>(t);
            }
        }
    }
    return owner;
}

template <typename P>
P warp_piecewise(const P& src, const PiecewiseWarp& warp, Interp interp) {
    if (src.height() != warp.height || src.width() != warp.width) {
        throw Error(ErrorCategory::DimensionMismatch, "piecewise warp was built for another image size");
    }
    const auto owner = triangle_owner_map(warp);
    P out(src.height(), src.width());
    std::size_t i = 0;
    for (int y = 0; y < src.height(); ++y) {
        for (int x = 0; x < src.width(); ++x, ++i) {
            Point2 from{static_cast<double>(x), static_cast<double>(y)};
            if (owner[i] >= 0) from = warp.params[static_cast<std::size_t>(owner[i])].apply(from);
            out(y, x) = sample_clamped(src, from.x, from.y, interp);
        }
    }
    return out;
}

template <typename P>
P flip_rotate(const P& src, Dihedral code) {
    const auto c = static_cast<std::uint8_t>(code);
    P out = c >= 4 ? mirror_horizontal(src) : src;
    for (int r = 0; r < c % 4; ++r) out = rotate_ccw(out);
    return out;
}

#define EMREFINE_INSTANTIATE_WARPS(P)                                                           \
    template P::value_type sample_clamped<P>(const P&, double, double, Interp);                \
    template P warp_displacement<P>(const P&, const DisplacementField&, Interp);              \
    template P warp_piecewise<P>(const P&, const PiecewiseWarp&, Interp);                     \
    template P flip_rotate<P>(const P&, Dihedral);

EMREFINE_INSTANTIATE_WARPS(GraySlice)
EMREFINE_INSTANTIATE_WARPS(MaskSlice)
EMREFINE_INSTANTIATE_WARPS(ProbMap)

#undef EMREFINE_INSTANTIATE_WARPS

}  // namespace emrefine
