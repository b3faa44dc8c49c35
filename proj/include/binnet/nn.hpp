#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "binnet/tensor.hpp"

namespace binnet {

enum class GroupKind : std::uint8_t { conv_block = 0, dense_head = 1 };

// One freezable unit: a conv block (conv3x3 + relu + maxpool2) or the dense
// classifier head (flatten + dense). depth_index 0 is closest to the input.
struct LayerGroup {
    std::string name;
    int depth_index = 0;
    GroupKind kind = GroupKind::conv_block;
    bool frozen = false;
    std::vector<Tensor> params; // conv: {weight [F,C,3,3], bias [F]}; head: {weight [D,K], bias [K]}
};

struct Network {
    std::string architecture_id;
    std::array<std::int64_t, 3> input_shape{}; // C,H,W
    std::vector<std::string> class_labels;
    std::vector<LayerGroup> groups; // ordered by depth_index, contiguous from 0

    int max_depth() const { return static_cast<int>(groups.size()) - 1; }
    const LayerGroup& head() const { return groups.back(); }
    LayerGroup& head() { return groups.back(); }
};

// Known architectures: "cnn-small" (2 conv blocks + head) and "cnn-medium"
// (4 conv blocks + head). Conv blocks use 3x3 kernels, stride 1, padding 1,
// followed by relu and 2x2/2 max pooling.
Network build_network(const std::string& architecture_id,
                      const std::array<std::int64_t, 3>& input_shape,
                      const std::vector<std::string>& class_labels,
                      std::uint64_t seed);

// Live autodiff graph for one batch. Parameter nodes are aligned with
// net.groups / group.params so the trainer can map gradients back.
struct ForwardGraph {
    VarF logits;
    VarF last_conv_activation; // post-relu map of the deepest conv block
    std::vector<std::vector<VarF>> group_params;
};

// want_all_grads forces gradient tracking on frozen groups too (used by the
// localization pass); training leaves frozen groups untracked.
ForwardGraph forward_graph(const Network& net, const Tensor& batch,
                           bool want_all_grads = false);

// Logit values only.
Tensor forward(const Network& net, const Tensor& batch);

// Swaps the classifier head for a freshly initialized one sized to the new
// label list. Every other group is left bitwise untouched.
void replace_head(Network& net, const std::vector<std::string>& class_labels,
                  std::uint64_t seed);

// Sets the frozen flag on all groups with depth in [depth_from, depth_to].
void set_frozen(Network& net, int depth_from, int depth_to, bool frozen);

// Convenience for stage-1 pre-training.
void freeze_all_but_head(Network& net);

// Binary checkpoint, magic "WNET" version 1, little-endian throughout.
// Byte layout is documented in docs/checkpoint-format.md.
void save_checkpoint(const Network& net, const std::string& path,
                     const std::string& history_csv = "");
Network load_checkpoint(const std::string& path, std::string* history_csv = nullptr);

void save_checkpoint(const Network& net, std::ostream& out,
                     const std::string& history_csv);
Network load_checkpoint(std::istream& in, std::string* history_csv);

// Row-major softmax of one logit row.
std::vector<double> softmax_row(const float* logits, std::int64_t count);

} // namespace binnet
