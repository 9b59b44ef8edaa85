#include <cmath>

#include "emrefine/augment.hpp"
#include "emrefine/rng.hpp"

namespace emrefine {

namespace {

// Half-sample symmetric reflection: ... c b a | a b c ... | c b a ...
int reflect_index(int i, int n) {
    const int period = 2 * n;
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - 1 - m;
}

std::vector<double> convolve_separable(const std::vector<double>& in, int height, int width,
                                       const std::vector<double>& taps) {
    const int radius = static_cast<int>(taps.size() / 2);
    std::vector<double> tmp(in.size()), out(in.size());
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += taps[static_cast<std::size_t>(k + radius)] *
                       in[static_cast<std::size_t>(y) * width + reflect_index(x + k, width)];
            }
            tmp[static_cast<std::size_t>(y) * width + x] = acc;
        }
    }
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += taps[static_cast<std::size_t>(k + radius)] *
                       tmp[static_cast<std::size_t>(reflect_index(y + k, height)) * width + x];
            }
            out[static_cast<std::size_t>(y) * width + x] = acc;
        }
    }
    return out;
}

}  // namespace

std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorCategory::InvalidArgument, "Gaussian sigma must be positive and finite");
    }
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        const double v = std::exp(-0.5 * (k * k) / (sigma * sigma));
        taps[static_cast<std::size_t>(k + radius)] = v;
        total += v;
    }
    for (auto& t : taps) t /= total;
    return taps;
}

DisplacementField sample_elastic_field(int height, int width, const ElasticConfig& cfg) {
    if (height < 1 || width < 1) {
        throw Error(ErrorCategory::InvalidArgument, "displacement field needs a non-empty image");
    }
    if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha)) {
        throw Error(ErrorCategory::InvalidArgument, "elastic alpha must be finite and >= 0");
    }
    const auto taps = gaussian_kernel(cfg.sigma_e);

    const auto n = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    Rng rng(cfg.seed);
    std::vector<double> noise_x(n), noise_y(n);
    for (auto& v : noise_x) v = rng.uniform(-1.0, 1.0);
    for (auto& v : noise_y) v = rng.uniform(-1.0, 1.0);

    DisplacementField field{height, width, convolve_separable(noise_x, height, width, taps),
                            convolve_separable(noise_y, height, width, taps)};
    for (auto& v : field.dx) v *= cfg.alpha;
    for (auto& v : field.dy) v *= cfg.alpha;
    return field;
}

}  // namespace emrefine
