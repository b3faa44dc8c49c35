#pragma once

#include <cstdint>

#include "binnet/rng.hpp"
#include "binnet/tensor.hpp"

namespace binnet {

struct AugmentConfig {
    double rotation_max_deg = 15.0;
    double zoom_lo = 0.9;
    double zoom_hi = 1.1;
    double translate_max_frac = 0.1; // fraction of width/height
    double hflip_prob = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

// One concrete draw. dx/dy are pixel offsets.
struct TransformParams {
    double angle_deg = 0.0;
    double scale = 1.0;
    double dx = 0.0;
    double dy = 0.0;
    bool hflip = false;
};

// Composed affine map, applied in the order flip, rotate about center, scale
// about center, translate. Sampling is bilinear; out-of-bounds samples take
// the nearest in-bounds pixel. Identity parameters reproduce the input
// bitwise.
Tensor apply_transform(const Tensor& image, const TransformParams& params);

// Draws angle ~ U(-max,max), scale ~ U(lo,hi), dx,dy ~ U(-t,t),
// flip ~ Bernoulli(p) from the given stream, in that order.
TransformParams draw_transform(const AugmentConfig& config, std::int64_t height,
                               std::int64_t width, Rng& rng);

Tensor random_augment(const Tensor& image, const AugmentConfig& config, Rng& rng);

} // namespace binnet
