#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "emrefine/plane.hpp"

namespace emrefine {

/// A z-ordered stack of equally sized slices.
template <typename SliceT>
class Stack {
public:
    using slice_type = SliceT;

    Stack() = default;
    Stack(int depth, int height, int width)
        : slices_(static_cast<std::size_t>(depth), SliceT(height, width)) {}
    explicit Stack(std::vector<SliceT> slices) : slices_(std::move(slices)) {
        for (const auto& s : slices_) {
            if (!s.same_shape(slices_.front())) {
                throw Error(ErrorCategory::DimensionMismatch,
                            "stack slices have differing dimensions");
            }
        }
    }

    int depth() const noexcept { return static_cast<int>(slices_.size()); }
    int height() const noexcept { return slices_.empty() ? 0 : slices_.front().height(); }
    int width() const noexcept { return slices_.empty() ? 0 : slices_.front().width(); }

    SliceT& operator[](int z) { return slices_[static_cast<std::size_t>(z)]; }
    const SliceT& operator[](int z) const { return slices_[static_cast<std::size_t>(z)]; }

    auto begin() const noexcept { return slices_.begin(); }
    auto end() const noexcept { return slices_.end(); }
    const std::vector<SliceT>& slices() const noexcept { return slices_; }

    bool same_shape(const auto& other) const noexcept {
        return depth() == other.depth() && height() == other.height() &&
               width() == other.width();
    }

    friend bool operator==(const Stack&, const Stack&) = default;

private:
    std::vector<SliceT> slices_;
};

using GrayStack = Stack<GraySlice>;
using MaskStack = Stack<MaskSlice>;

template <typename S>
void require_same_stack_shape(const S& a, const auto& b, const char* what) {
    if (!a.same_shape(b)) {
        throw Error(ErrorCategory::DimensionMismatch,
                    std::string(what) + ": " + std::to_string(a.depth()) + "x" +
                        std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                        " vs " + std::to_string(b.depth()) + "x" +
                        std::to_string(b.height()) + "x" + std::to_string(b.width()));
    }
}

}  // namespace emrefine
