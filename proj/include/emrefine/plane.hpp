#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "emrefine/error.hpp"

namespace emrefine {

struct GrayTag {};
struct MaskTag {};
struct ProbTag {};

/// Dense row-major 2D plane. The tag keeps grayscale, binary and probability
/// planes from being mixed up even when they share a pixel type.
template <typename T, typename Tag>
class Plane {
public:
    using value_type = T;

    Plane() = default;
    Plane(int height, int width, T fill = T{})
        : height_(height), width_(width),
          pixels_(checked_size(height, width), fill) {}
    Plane(int height, int width, std::vector<T> pixels)
        : height_(height), width_(width), pixels_(std::move(pixels)) {
        if (pixels_.size() != checked_size(height, width)) {
            throw Error(ErrorCategory::DimensionMismatch,
                        "pixel buffer size does not match plane dimensions");
        }
    }

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }

    T& operator()(int y, int x) noexcept { return pixels_[index(y, x)]; }
    const T& operator()(int y, int x) const noexcept { return pixels_[index(y, x)]; }

    std::span<T> pixels() noexcept { return pixels_; }
    std::span<const T> pixels() const noexcept { return pixels_; }

    bool same_shape(const auto& other) const noexcept {
        return height_ == other.height() && width_ == other.width();
    }

    friend bool operator==(const Plane&, const Plane&) = default;

private:
    static std::size_t checked_size(int height, int width) {
        if (height < 0 || width < 0) {
            throw Error(ErrorCategory::InvalidArgument, "negative plane dimensions");
        }
        return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }
    std::size_t index(int y, int x) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<T> pixels_;
};

/// 8-bit grayscale image slice.
using GraySlice = Plane<std::uint8_t, GrayTag>;
/// Binary slice; every pixel is exactly 0 or 1.
using MaskSlice = Plane<std::uint8_t, MaskTag>;
/// Per-pixel foreground probability in [0, 1].
using ProbMap = Plane<double, ProbTag>;

template <typename P>
void require_same_shape(const P& a, const auto& b, const char* what) {
    if (!a.same_shape(b)) {
        throw Error(ErrorCategory::DimensionMismatch,
                    std::string(what) + ": " + std::to_string(a.height()) + "x" +
                        std::to_string(a.width()) + " vs " +
                        std::to_string(b.height()) + "x" + std::to_string(b.width()));
    }
}

/// Throws InvalidArgument unless every pixel is 0 or 1.
void validate_mask(const MaskSlice& slice);

}  // namespace emrefine
