#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "emrefine/augment.hpp"

namespace emrefine {

namespace {

double orient(const Point2& a, const Point2& b, const Point2& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// > 0 when d lies strictly inside the circumcircle of the positively
// oriented triangle (a, b, c).
double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

Triangle oriented(int a, int b, int c, const std::vector<Point2>& pts) {
    return orient(pts[a], pts[b], pts[c]) > 0 ? Triangle{a, b, c} : Triangle{a, c, b};
}

// Rotates so the smallest index leads, keeping orientation.
Triangle canonical(Triangle t) {
    const auto lead = std::min_element(t.begin(), t.end()) - t.begin();
    std::rotate(t.begin(), t.begin() + lead, t.end());
    return t;
}

using Edge = std::pair<int, int>;

Edge undirected(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// Flips cocircular diagonals onto the min(x−y) / max(x−y) corners. Flipping
// a cocircular edge keeps the triangulation Delaunay.
void canonicalize_cocircular(std::vector<Triangle>& tris, const std::vector<Point2>& pts,
                             double tolerance) {
    for (bool changed = true; changed;) {
        changed = false;
        std::map<Edge, std::vector<std::size_t>> owners;
        for (std::size_t t = 0; t < tris.size(); ++t) {
            for (int e = 0; e < 3; ++e) owners[undirected(tris[t][e], tris[t][(e + 1) % 3])].push_back(t);
        }
        for (const auto& [edge, ts] : owners) {
            if (ts.size() != 2) continue;
            const Triangle& t1 = tris[ts[0]];
            const Triangle& t2 = tris[ts[1]];
            auto opposite = [&](const Triangle& t) {
                for (int v : t) {
                    if (v != edge.first && v != edge.second) return v;
                }
                return -1;
            };
            const int c = opposite(t1), d = opposite(t2);
            if (std::abs(incircle(pts[t1[0]], pts[t1[1]], pts[t1[2]], pts[d])) > tolerance) continue;

            const std::array<int, 4> quad{edge.first, edge.second, c, d};
            auto key = [&](int v) { return pts[v].x - pts[v].y; };
            const int lo = *std::min_element(quad.begin(), quad.end(), [&](int a, int b) { return key(a) < key(b); });
            const int hi = *std::max_element(quad.begin(), quad.end(), [&](int a, int b) { return key(a) < key(b); });
            if (undirected(lo, hi) != undirected(c, d)) continue;
            // Both new triangles must be proper for the flip to be valid.
            if (orient(pts[c], pts[d], pts[edge.first]) == 0 || orient(pts[c], pts[d], pts[edge.second]) == 0) continue;

            const auto i1 = ts[0], i2 = ts[1];
            tris[i1] = oriented(c, d, edge.first, pts);
            tris[i2] = oriented(c, d, edge.second, pts);
            changed = true;
            break;
        }
    }
}

}  // namespace

std::vector<Triangle> delaunay_triangulate(const std::vector<Point2>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 3) throw Error(ErrorCategory::InvalidArgument, "triangulation needs at least 3 points");

    double min_x = points[0].x, max_x = points[0].x, min_y = points[0].y, max_y = points[0].y;
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw Error(ErrorCategory::InvalidArgument, "triangulation points must be finite");
        }
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double span = std::max({max_x - min_x, max_y - min_y, 1.0});
    const double cx = 0.5 * (min_x + max_x), cy = 0.5 * (min_y + max_y);

    // Super triangle. Hull slivers flatter than ~1/100 rad can be lost to it;
    // warp_piecewise samples uncovered pixels in place.
    std::vector<Point2> pts = points;
    const double far = 100.0 * span;
    pts.push_back({cx - far, cy - far});
    pts.push_back({cx + far, cy - far});
    pts.push_back({cx, cy + far});
    std::vector<Triangle> tris{oriented(n, n + 1, n + 2, pts)};

    for (int p = 0; p < n; ++p) {
        std::vector<Triangle> keep, bad;
        for (const auto& t : tris) {
            (incircle(pts[t[0]], pts[t[1]], pts[t[2]], pts[p]) > 0 ? bad : keep).push_back(t);
        }
        // Cavity boundary: directed edges of bad triangles not shared with another bad one.
        std::map<Edge, int> edge_count;
        for (const auto& t : bad) {
            for (int e = 0; e < 3; ++e) ++edge_count[undirected(t[e], t[(e + 1) % 3])];
        }
        for (const auto& t : bad) {
            for (int e = 0; e < 3; ++e) {
                const int a = t[e], b = t[(e + 1) % 3];
                if (edge_count[undirected(a, b)] == 1 && orient(pts[a], pts[b], pts[p]) > 0) {
                    keep.push_back({a, b, p});
                }
            }
        }
        tris = std::move(keep);
    }

    std::vector<Triangle> result;
    for (const auto& t : tris) {
        if (t[0] < n && t[1] < n && t[2] < n) result.push_back(t);
    }
    const double tolerance = 1e-9 * span * span * span * span;
    canonicalize_cocircular(result, points, tolerance);
    for (auto& t : result) t = canonical(t);
    std::sort(result.begin(), result.end());
    return result;
}

}  // namespace emrefine
