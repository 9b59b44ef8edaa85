#include "emrefine/plane.hpp"

#include <algorithm>

namespace emrefine {

void validate_mask(const MaskSlice& slice) {
    const auto px = slice.pixels();
    if (std::any_of(px.begin(), px.end(), [](std::uint8_t v) { return v > 1; })) {
        throw Error(ErrorCategory::InvalidArgument, "mask slice holds values other than 0/1");
    }
}

}  // namespace emrefine
