#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace emrefine {

/// Machine-readable failure classes. The CLI prints the category name and
/// maps every category to a nonzero exit code.
enum class ErrorCategory {
    InvalidArgument,
    DimensionMismatch,
    Io,
    EmptyInput,
    DegenerateTriangle,
    SamplingFailure,
};

constexpr std::string_view category_name(ErrorCategory c) noexcept {
    switch (c) {
    case ErrorCategory::InvalidArgument: return "invalid-argument";
    case ErrorCategory::DimensionMismatch: return "dimension-mismatch";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::EmptyInput: return "empty-input";
    case ErrorCategory::DegenerateTriangle: return "degenerate-triangle";
    case ErrorCategory::SamplingFailure: return "sampling-failure";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

}  // namespace emrefine
