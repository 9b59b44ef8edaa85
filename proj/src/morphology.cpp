#include "emrefine/morphology.hpp"

#include <algorithm>
#include <numeric>

namespace emrefine {

namespace {

// Union-find over provisional labels; the root is always the smaller label.
class DisjointSet {
public:
    std::int32_t make() {
        parent_.push_back(static_cast<std::int32_t>(parent_.size()));
        return parent_.back();
    }

    std::int32_t find(std::int32_t x) {
        std::int32_t root = x;
        while (parent_[root] != root) root = parent_[root];
        while (parent_[x] != root) {
            const std::int32_t next = parent_[x];
            parent_[x] = root;
            x = next;
        }
        return root;
    }

    void join(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) std::swap(a, b);
        parent_[a] = b;
    }

    std::size_t size() const noexcept { return parent_.size(); }

private:
    std::vector<std::int32_t> parent_;
};

// One pass of a (2r+1)-wide all-ones erosion along rows (dx=1) or columns.
MaskSlice erode_1d(const MaskSlice& in, int radius, bool along_rows) {
    const int h = in.height(), w = in.width();
    MaskSlice out(h, w, 0);
    const int lines = along_rows ? h : w;
    const int len = along_rows ? w : h;
    std::vector<int> prefix(static_cast<std::size_t>(len) + 1);
    for (int line = 0; line < lines; ++line) {
        for (int i = 0; i < len; ++i) {
            const std::uint8_t v = along_rows ? in(line, i) : in(i, line);
            prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + v;
        }
        for (int i = radius; i + radius < len; ++i) {
            const int ones = prefix[static_cast<std::size_t>(i + radius + 1)] -
                             prefix[static_cast<std::size_t>(i - radius)];
            if (ones == 2 * radius + 1) {
                (along_rows ? out(line, i) : out(i, line)) = 1;
            }
        }
    }
    return out;
}

}  // namespace

MaskSlice erode(const MaskSlice& slice, int times) {
    if (times < 0) throw Error(ErrorCategory::InvalidArgument, "erosion count must be >= 0");
    if (times == 0) return slice;
    // k rounds of the 3x3 kernel with a background border equal one erosion by
    // the (2k+1)x(2k+1) square, which is separable.
    return erode_1d(erode_1d(slice, times, true), times, false);
}

MaskSlice unite(const MaskSlice& a, const MaskSlice& b) {
    require_same_shape(a, b, "union");
    MaskSlice out(a.height(), a.width());
    std::transform(a.pixels().begin(), a.pixels().end(), b.pixels().begin(),
                   out.pixels().begin(), [](std::uint8_t x, std::uint8_t y) { return x | y; });
    return out;
}

MaskSlice intersect(const MaskSlice& a, const MaskSlice& b) {
    require_same_shape(a, b, "intersection");
    MaskSlice out(a.height(), a.width());
    std::transform(a.pixels().begin(), a.pixels().end(), b.pixels().begin(),
                   out.pixels().begin(), [](std::uint8_t x, std::uint8_t y) { return x & y; });
    return out;
}

MaskSlice complement(const MaskSlice& a) {
    MaskSlice out(a.height(), a.width());
    std::transform(a.pixels().begin(), a.pixels().end(), out.pixels().begin(),
                   [](std::uint8_t x) { return static_cast<std::uint8_t>(x ^ 1); });
    return out;
}

std::size_t foreground_count(const MaskSlice& slice) noexcept {
    return static_cast<std::size_t>(std::count(slice.pixels().begin(), slice.pixels().end(), 1));
}

ComponentLabeling connected_components(const MaskSlice& slice) {
    const int h = slice.height(), w = slice.width();
    LabelPlane provisional(h, w, 0);
    DisjointSet sets;
    sets.make();  // label 0 = background

    // First pass: provisional labels from the already-visited 8-neighbors
    // (W, NW, N, NE), recording equivalences.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!slice(y, x)) continue;
            std::int32_t label = 0;
            auto visit = [&](int ny, int nx) {
                if (ny < 0 || nx < 0 || nx >= w) return;
                const std::int32_t l = provisional(ny, nx);
                if (l == 0) return;
                if (label == 0) {
                    label = l;
                } else {
                    sets.join(label, l);
                }
            };
            visit(y, x - 1);
            visit(y - 1, x - 1);
            visit(y - 1, x);
            visit(y - 1, x + 1);
            provisional(y, x) = label != 0 ? label : sets.make();
        }
    }

    // Second pass: resolve roots and renumber in raster order of first pixel.
    std::vector<std::int32_t> final_label(sets.size(), 0);
    ComponentLabeling result{LabelPlane(h, w, 0), 0, {0}};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::int32_t p = provisional(y, x);
            if (p == 0) {
                ++result.sizes[0];
                continue;
            }
            const std::int32_t root = sets.find(p);
            auto& f = final_label[static_cast<std::size_t>(root)];
            if (f == 0) {
                f = ++result.count;
                result.sizes.push_back(0);
            }
            result.labels(y, x) = f;
            ++result.sizes[static_cast<std::size_t>(f)];
        }
    }
    return result;
}

MaskSlice remove_small_components(const MaskSlice& slice, std::size_t min_size) {
    if (min_size == 0) return slice;
    const auto cc = connected_components(slice);
    MaskSlice out(slice.height(), slice.width(), 0);
    const auto labels = cc.labels.pixels();
    auto px = out.pixels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto l = static_cast<std::size_t>(labels[i]);
        if (l != 0 && cc.sizes[l] >= min_size) px[i] = 1;
    }
    return out;
}

}  // namespace emrefine
