#include "binnet/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "binnet/dataset.hpp"
#include "binnet/errors.hpp"

namespace binnet {

Heatmap grad_cam(const Network& net, const Tensor& image, int target_class) {
    if (image.rank() != 3 || image.dim(0) != net.input_shape[0] ||
        image.dim(1) != net.input_shape[1] || image.dim(2) != net.input_shape[2])
        throw dimension_error("grad_cam image shape " + shape_str(image.shape()) +
                              " does not match network input");
    if (target_class < 0 ||
        static_cast<std::size_t>(target_class) >= net.class_labels.size())
        throw label_error("target class " + std::to_string(target_class) +
                          " outside catalog");

    Tensor batch = image.reshaped({1, image.dim(0), image.dim(1), image.dim(2)});
    auto graph = forward_graph(net, batch, /*want_all_grads=*/true);
    if (!graph.last_conv_activation)
        throw unsupported_architecture_error(
            "localization requires at least one conv block");

    const std::int64_t classes = graph.logits->value.dim(1);
    Tensor onehot = Tensor::zeros({1, classes});
    onehot[target_class] = 1.0f;
    backward(weighted_sum(graph.logits, onehot));

    const auto& act = graph.last_conv_activation->value; // [1,K,h,w]
    const auto& act_grad = graph.last_conv_activation->grad;
    const std::int64_t k_maps = act.dim(1), h = act.dim(2), w = act.dim(3);

    // channel weights: spatial mean of the gradient per map
    std::vector<double> weights(static_cast<std::size_t>(k_maps), 0.0);
    for (std::int64_t k = 0; k < k_maps; ++k) {
        double acc = 0;
        for (std::int64_t i = 0; i < h * w; ++i) acc += act_grad[k * h * w + i];
        weights[static_cast<std::size_t>(k)] = acc / static_cast<double>(h * w);
    }

    Tensor cam({1, h, w});
    for (std::int64_t i = 0; i < h * w; ++i) {
        double acc = 0;
        for (std::int64_t k = 0; k < k_maps; ++k)
            acc += weights[static_cast<std::size_t>(k)] * act[k * h * w + i];
        cam[i] = acc > 0 ? static_cast<float>(acc) : 0.0f;
    }

    Tensor upsampled = resize_bilinear(cam, net.input_shape[1], net.input_shape[2]);
    float peak = 0;
    for (std::int64_t i = 0; i < upsampled.size(); ++i) peak = std::max(peak, upsampled[i]);
    if (peak > 0)
        for (std::int64_t i = 0; i < upsampled.size(); ++i) upsampled[i] /= peak;

    Heatmap hm;
    hm.values = upsampled.reshaped({net.input_shape[1], net.input_shape[2]});
    hm.target_class = target_class;
    hm.probability = softmax_row(graph.logits->value.data(), classes)[static_cast<std::size_t>(target_class)];
    return hm;
}

std::string format_caption(const Caption& caption) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "Prediction/Actual Loss/Probability: %s/%s %.2f/%.2f\n"
                  "prediction=%s\nactual=%s\nloss=%.6f\nprobability=%.6f\n",
                  caption.predicted.c_str(), caption.actual.c_str(), caption.loss,
                  caption.probability, caption.predicted.c_str(), caption.actual.c_str(),
                  caption.loss, caption.probability);
    return buf;
}

void render_annotated(const Tensor& image, const Heatmap& heatmap, const Caption& caption,
                      const std::string& image_path, const std::string& caption_path) {
    if (image.rank() != 3 || image.dim(0) != 3)
        throw dimension_error("render_annotated expects a [3,H,W] image");
    const std::int64_t h = image.dim(1), w = image.dim(2);
    if (heatmap.values.shape() != Shape{h, w})
        throw dimension_error("heatmap is not aligned to the image dims");

    // alpha = 0.5*heat per pixel; overlay color is pure red
    Tensor blended({3, h, w});
    for (std::int64_t y = 0; y < h; ++y)
        for (std::int64_t x = 0; x < w; ++x) {
            const float alpha = 0.5f * heatmap.values[y * w + x];
            for (std::int64_t c = 0; c < 3; ++c) {
                const float base = image[(c * h + y) * w + x];
                const float overlay = c == 0 ? 1.0f : 0.0f;
                blended[(c * h + y) * w + x] = (1.0f - alpha) * base + alpha * overlay;
            }
        }
    write_ppm(image_path, blended);

    std::ofstream out(caption_path, std::ios::trunc);
    if (!out) throw io_error("cannot write caption file: " + caption_path);
    out << format_caption(caption);
    if (!out) throw io_error("caption write failed: " + caption_path);
}

} // namespace binnet
