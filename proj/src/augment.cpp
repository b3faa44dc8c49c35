#include "binnet/augment.hpp"

#include <algorithm>
#include <cmath>

#include "binnet/errors.hpp"

namespace binnet {

void AugmentConfig::validate() const {
    if (zoom_lo <= 0 || zoom_hi <= 0 || zoom_lo > zoom_hi)
        throw config_error("augment zoom range must satisfy 0 < lo <= hi");
    if (hflip_prob < 0 || hflip_prob > 1)
        throw config_error("augment hflip probability must be in [0,1]");
    if (rotation_max_deg < 0)
        throw config_error("augment rotation_max_deg must be >= 0");
    if (translate_max_frac < 0)
        throw config_error("augment translate_max_frac must be >= 0");
}

Tensor apply_transform(const Tensor& image, const TransformParams& params) {
    if (image.rank() != 3) throw dimension_error("apply_transform expects [C,H,W]");
    if (params.scale <= 0) throw param_error("transform scale must be positive");

    const std::int64_t channels = image.dim(0), h = image.dim(1), w = image.dim(2);
    const double cy = static_cast<double>(h - 1) / 2.0;
    const double cx = static_cast<double>(w - 1) / 2.0;
    const double theta = params.angle_deg * std::acos(-1.0) / 180.0;
    const double cos_t = std::cos(theta), sin_t = std::sin(theta);
    const double inv_scale = 1.0 / params.scale;

    Tensor out({channels, h, w});
    for (std::int64_t oy = 0; oy < h; ++oy) {
        for (std::int64_t ox = 0; ox < w; ++ox) {
            // invert the composed map: translate^-1, scale^-1, rotate^-1, flip^-1
            double x = static_cast<double>(ox) - params.dx;
            double y = static_cast<double>(oy) - params.dy;
            x = (x - cx) * inv_scale;
            y = (y - cy) * inv_scale;
            const double rx = cos_t * x + sin_t * y;
            const double ry = -sin_t * x + cos_t * y;
            x = rx + cx;
            y = ry + cy;
            if (params.hflip) x = static_cast<double>(w - 1) - x;

            // nearest fill: clamp the sample point into the image
            x = std::clamp(x, 0.0, static_cast<double>(w - 1));
            y = std::clamp(y, 0.0, static_cast<double>(h - 1));
            const auto x0 = static_cast<std::int64_t>(std::floor(x));
            const auto y0 = static_cast<std::int64_t>(std::floor(y));
            const std::int64_t x1 = std::min(x0 + 1, w - 1);
            const std::int64_t y1 = std::min(y0 + 1, h - 1);
            const double fx = x - static_cast<double>(x0);
            const double fy = y - static_cast<double>(y0);

            for (std::int64_t c = 0; c < channels; ++c) {
                const float* plane = image.data() + c * h * w;
                const double top = (1.0 - fx) * plane[y0 * w + x0] + fx * plane[y0 * w + x1];
                const double bot = (1.0 - fx) * plane[y1 * w + x0] + fx * plane[y1 * w + x1];
                const double v = (1.0 - fy) * top + fy * bot;
                out[(c * h + oy) * w + ox] = static_cast<float>(std::clamp(v, 0.0, 1.0));
            }
        }
    }
    return out;
}

TransformParams draw_transform(const AugmentConfig& config, std::int64_t height,
                               std::int64_t width, Rng& rng) {
    TransformParams p;
    p.angle_deg = rng.uniform(-config.rotation_max_deg, config.rotation_max_deg);
    p.scale = rng.uniform(config.zoom_lo, config.zoom_hi);
    const double tx = config.translate_max_frac * static_cast<double>(width);
    const double ty = config.translate_max_frac * static_cast<double>(height);
    p.dx = rng.uniform(-tx, tx);
    p.dy = rng.uniform(-ty, ty);
    p.hflip = rng.bernoulli(config.hflip_prob);
    return p;
}

Tensor random_augment(const Tensor& image, const AugmentConfig& config, Rng& rng) {
    config.validate();
    const TransformParams p = draw_transform(config, image.dim(1), image.dim(2), rng);
    return apply_transform(image, p);
}

} // namespace binnet
