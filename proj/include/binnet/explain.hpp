#pragma once

#include <string>

#include "binnet/nn.hpp"
#include "binnet/tensor.hpp"

namespace binnet {

// Max-normalized non-negative localization map aligned to the input image.
struct Heatmap {
    Tensor values; // [H,W] in [0,1]; all-zero when no evidence
    int target_class = 0;
    double probability = 0; // softmax probability of target_class
};

// Gradient-weighted activation map: gradients of the target-class logit with
// respect to the deepest conv block's post-relu maps are channel-averaged
// into weights; the map is relu(sum_k w_k A_k), bilinearly upsampled to the
// input dims and max-normalized (skipped when identically zero).
Heatmap grad_cam(const Network& net, const Tensor& image, int target_class);

struct Caption {
    std::string predicted;
    std::string actual;
    double loss = 0;
    double probability = 0;
};

// Writes a P6 PPM of the image blended toward pure red with per-pixel alpha
// 0.5*heatmap, plus a sidecar caption text file.
void render_annotated(const Tensor& image, const Heatmap& heatmap, const Caption& caption,
                      const std::string& image_path, const std::string& caption_path);

std::string format_caption(const Caption& caption);

} // namespace binnet
