#include "emrefine/augment.hpp"
#include "emrefine/rng.hpp"

namespace emrefine {

AugmentedPair augment_pair(const GraySlice& image, const MaskSlice& mask, const AugmentConfig& cfg,
                           std::uint64_t seed, std::uint64_t stream) {
    require_same_shape(image, mask, "augment image vs mask");
    Rng rng(seed, stream);

    AugmentedPair out{image, mask, Dihedral::Identity};
    if (cfg.flip_rotate) {
        out.code = static_cast<Dihedral>(rng.uniform_int(0, 7));
        out.image = flip_rotate(out.image, out.code);
        out.mask = flip_rotate(out.mask, out.code);
    }
    if (cfg.piecewise) {
        PiecewiseAffineConfig pw = *cfg.piecewise;
        pw.seed = rng.next_u64();
        const auto warp = sample_piecewise_warp(out.image.height(), out.image.width(), pw);
        out.image = warp_piecewise(out.image, warp, Interp::Bilinear);
        out.mask = warp_piecewise(out.mask, warp, Interp::Nearest);
    }
    if (cfg.elastic) {
        ElasticConfig el = *cfg.elastic;
        el.seed = rng.next_u64();
        const auto field = sample_elastic_field(out.image.height(), out.image.width(), el);
        out.image = warp_displacement(out.image, field, Interp::Bilinear);
        out.mask = warp_displacement(out.mask, field, Interp::Nearest);
    }
    return out;
}

}  // namespace emrefine
