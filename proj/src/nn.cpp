#include "binnet/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "binnet/errors.hpp"
#include "binnet/rng.hpp"

namespace binnet {

namespace {

constexpr char kMagic[4] = {'W', 'N', 'E', 'T'};
constexpr std::uint32_t kVersion = 1;

// fan-in-scaled uniform init: U(-sqrt(6/fan_in), +sqrt(6/fan_in)).
Tensor init_uniform(const Shape& shape, std::int64_t fan_in, Rng& rng) {
    Tensor t(shape);
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (std::int64_t i = 0; i < t.size(); ++i)
        t[i] = static_cast<float>(rng.uniform(-bound, bound));
    return t;
}

struct ConvSpec {
    int filters;
};

std::vector<ConvSpec> conv_specs(const std::string& architecture_id) {
    if (architecture_id == "cnn-small") return {{16}, {32}};
    if (architecture_id == "cnn-medium") return {{16}, {32}, {64}, {64}};
    throw config_error("unknown architecture '" + architecture_id +
                       "' (expected cnn-small or cnn-medium)");
}

// Spatial dims after the conv stack; conv3x3 pad 1 preserves H,W and each
// pool halves them (floor).
std::array<std::int64_t, 3> stack_output_shape(const std::vector<ConvSpec>& specs,
                                               const std::array<std::int64_t, 3>& input) {
    std::int64_t c = input[0], h = input[1], w = input[2];
    for (const auto& spec : specs) {
        if (h < 2 || w < 2)
            throw config_error("input " + std::to_string(input[1]) + "x" +
                               std::to_string(input[2]) +
                               " too small for the conv stack");
        c = spec.filters;
        h /= 2;
        w /= 2;
    }
    return {c, h, w};
}

LayerGroup make_head(std::int64_t flat_dim, std::int64_t n_classes, int depth,
                     std::uint64_t seed) {
    Rng rng(Rng::derive(seed, 0x48454144ULL + static_cast<std::uint64_t>(depth)));
    LayerGroup head;
    head.name = "head";
    head.depth_index = depth;
    head.kind = GroupKind::dense_head;
    head.params.push_back(init_uniform({flat_dim, n_classes}, flat_dim, rng));
    head.params.push_back(Tensor::zeros({n_classes}));
    return head;
}

void write_bytes(std::ostream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out) throw io_error("checkpoint write failed");
}

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    write_bytes(out, b, 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    write_u32(out, static_cast<std::uint32_t>(v));
    write_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void write_str(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    write_bytes(out, s.data(), s.size());
}

void write_f32_payload(std::ostream& out, const Tensor& t) {
    for (std::int64_t i = 0; i < t.size(); ++i) {
        std::uint32_t bits;
        float v = t[i];
        std::memcpy(&bits, &v, 4);
        write_u32(out, bits);
    }
}

void read_bytes(std::istream& in, void* p, std::size_t n, const char* what) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw corruption_error(std::string("checkpoint truncated while reading ") + what);
}

std::uint32_t read_u32(std::istream& in, const char* what) {
    unsigned char b[4];
    read_bytes(in, b, 4, what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t read_u64(std::istream& in, const char* what) {
    std::uint64_t lo = read_u32(in, what);
    std::uint64_t hi = read_u32(in, what);
    return lo | (hi << 32);
}

std::string read_str(std::istream& in, const char* what) {
    std::uint32_t n = read_u32(in, what);
    if (n > (1u << 20)) throw corruption_error(std::string("implausible string length in ") + what);
    std::string s(n, '\0');
    if (n) read_bytes(in, s.data(), n, what);
    return s;
}

} // namespace

Network build_network(const std::string& architecture_id,
                      const std::array<std::int64_t, 3>& input_shape,
                      const std::vector<std::string>& class_labels,
                      std::uint64_t seed) {
    if (class_labels.empty()) throw config_error("class label list is empty");
    for (auto d : input_shape)
        if (d < 1) throw config_error("input shape dims must be positive");

    const auto specs = conv_specs(architecture_id);
    const auto out_shape = stack_output_shape(specs, input_shape);

    Network net;
    net.architecture_id = architecture_id;
    net.input_shape = input_shape;
    net.class_labels = class_labels;

    std::int64_t in_channels = input_shape[0];
    for (std::size_t i = 0; i < specs.size(); ++i) {
        Rng rng(Rng::derive(seed, i));
        LayerGroup g;
        g.name = "conv" + std::to_string(i);
        g.depth_index = static_cast<int>(i);
        g.kind = GroupKind::conv_block;
        const std::int64_t fan_in = in_channels * 3 * 3;
        g.params.push_back(init_uniform({specs[i].filters, in_channels, 3, 3}, fan_in, rng));
        g.params.push_back(Tensor::zeros({specs[i].filters}));
        net.groups.push_back(std::move(g));
        in_channels = specs[i].filters;
    }

    const std::int64_t flat_dim = out_shape[0] * out_shape[1] * out_shape[2];
    net.groups.push_back(make_head(flat_dim, static_cast<std::int64_t>(class_labels.size()),
                                   static_cast<int>(specs.size()), seed));
    return net;
}

ForwardGraph forward_graph(const Network& net, const Tensor& batch, bool want_all_grads) {
    if (batch.rank() != 4 || batch.dim(1) != net.input_shape[0] ||
        batch.dim(2) != net.input_shape[1] || batch.dim(3) != net.input_shape[2])
        throw dimension_error("batch shape " + shape_str(batch.shape()) +
                              " does not match network input [N," +
                              std::to_string(net.input_shape[0]) + "," +
                              std::to_string(net.input_shape[1]) + "," +
                              std::to_string(net.input_shape[2]) + "]");

    ForwardGraph fg;
    VarF x = constant(batch);
    for (const auto& g : net.groups) {
        const bool track = want_all_grads || !g.frozen;
        std::vector<VarF> pvars;
        pvars.reserve(g.params.size());
        for (const auto& p : g.params)
            pvars.push_back(track ? parameter(p) : constant(p));

        if (g.kind == GroupKind::conv_block) {
            x = relu(conv2d(x, pvars[0], pvars[1], 1, 1));
            fg.last_conv_activation = x;
            x = maxpool2d(x, 2, 2);
        } else {
            x = dense(flatten(x), pvars[0], pvars[1]);
        }
        fg.group_params.push_back(std::move(pvars));
    }
    fg.logits = x;
    return fg;
}

Tensor forward(const Network& net, const Tensor& batch) {
    return forward_graph(net, batch).logits->value;
}

void replace_head(Network& net, const std::vector<std::string>& class_labels,
                  std::uint64_t seed) {
    if (class_labels.empty()) throw config_error("replace_head: class label list is empty");
    if (net.groups.empty() || net.head().kind != GroupKind::dense_head)
        throw unsupported_architecture_error("network has no dense head to replace");
    const std::int64_t flat_dim = net.head().params[0].dim(0);
    const int depth = net.head().depth_index;
    net.groups.back() = make_head(flat_dim, static_cast<std::int64_t>(class_labels.size()),
                                  depth, seed);
    net.class_labels = class_labels;
}

void set_frozen(Network& net, int depth_from, int depth_to, bool frozen) {
    if (depth_from < 0 || depth_to > net.max_depth() || depth_from > depth_to)
        throw config_error("freeze range [" + std::to_string(depth_from) + "," +
                           std::to_string(depth_to) + "] outside depths [0," +
                           std::to_string(net.max_depth()) + "]");
    for (auto& g : net.groups)
        if (g.depth_index >= depth_from && g.depth_index <= depth_to) g.frozen = frozen;
}

void freeze_all_but_head(Network& net) {
    if (net.groups.size() < 2)
        throw config_error("network needs at least 2 groups for head-only training");
    set_frozen(net, 0, net.max_depth() - 1, true);
    net.head().frozen = false;
}

void save_checkpoint(const Network& net, std::ostream& out, const std::string& history_csv) {
    write_bytes(out, kMagic, 4);
    write_u32(out, kVersion);
    write_str(out, net.architecture_id);
    write_u32(out, static_cast<std::uint32_t>(net.class_labels.size()));
    for (const auto& l : net.class_labels) write_str(out, l);
    for (auto d : net.input_shape) write_u32(out, static_cast<std::uint32_t>(d));
    write_u32(out, static_cast<std::uint32_t>(net.groups.size()));
    for (const auto& g : net.groups) {
        write_str(out, g.name);
        write_u32(out, static_cast<std::uint32_t>(g.depth_index));
        const unsigned char flags[2] = {static_cast<unsigned char>(g.frozen ? 1 : 0),
                                        static_cast<unsigned char>(g.kind)};
        write_bytes(out, flags, 2);
        write_u32(out, static_cast<std::uint32_t>(g.params.size()));
        for (const auto& p : g.params) {
            write_u32(out, static_cast<std::uint32_t>(p.rank()));
            for (auto d : p.shape()) write_u32(out, static_cast<std::uint32_t>(d));
            write_f32_payload(out, p);
        }
    }
    const unsigned char has_history = history_csv.empty() ? 0 : 1;
    write_bytes(out, &has_history, 1);
    if (has_history) {
        write_u64(out, history_csv.size());
        write_bytes(out, history_csv.data(), history_csv.size());
    }
}

void save_checkpoint(const Network& net, const std::string& path,
                     const std::string& history_csv) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open checkpoint for writing: " + path);
    save_checkpoint(net, out, history_csv);
    out.flush();
    if (!out) throw io_error("checkpoint write failed: " + path);
}

Network load_checkpoint(std::istream& in, std::string* history_csv) {
    char magic[4];
    read_bytes(in, magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw format_error("not a checkpoint file (bad magic)");
    const std::uint32_t version = read_u32(in, "version");
    if (version != kVersion)
        throw format_error("unsupported checkpoint version " + std::to_string(version));

    Network net;
    net.architecture_id = read_str(in, "architecture id");
    const std::uint32_t n_labels = read_u32(in, "label count");
    if (n_labels == 0 || n_labels > 4096) throw corruption_error("implausible label count");
    net.class_labels.reserve(n_labels);
    for (std::uint32_t i = 0; i < n_labels; ++i)
        net.class_labels.push_back(read_str(in, "label"));
    for (auto& d : net.input_shape) d = read_u32(in, "input shape");

    const std::uint32_t n_groups = read_u32(in, "group count");
    if (n_groups == 0 || n_groups > 256) throw corruption_error("implausible group count");
    for (std::uint32_t gi = 0; gi < n_groups; ++gi) {
        LayerGroup g;
        g.name = read_str(in, "group name");
        g.depth_index = static_cast<int>(read_u32(in, "depth index"));
        unsigned char flags[2];
        read_bytes(in, flags, 2, "group flags");
        if (flags[0] > 1 || flags[1] > 1) throw corruption_error("invalid group flags");
        g.frozen = flags[0] != 0;
        g.kind = static_cast<GroupKind>(flags[1]);
        const std::uint32_t n_params = read_u32(in, "param count");
        if (n_params > 64) throw corruption_error("implausible param count");
        for (std::uint32_t pi = 0; pi < n_params; ++pi) {
            const std::uint32_t ndim = read_u32(in, "param rank");
            if (ndim == 0 || ndim > 8) throw corruption_error("implausible param rank");
            Shape shape(ndim);
            for (auto& d : shape) {
                d = read_u32(in, "param dim");
                if (d <= 0 || d > (1 << 24)) throw corruption_error("implausible param dim");
            }
            Tensor t(shape);
            for (std::int64_t i = 0; i < t.size(); ++i) {
                const std::uint32_t bits = read_u32(in, "param payload");
                float v;
                std::memcpy(&v, &bits, 4);
                t[i] = v;
            }
            g.params.push_back(std::move(t));
        }
        net.groups.push_back(std::move(g));
    }

    unsigned char has_history;
    read_bytes(in, &has_history, 1, "history flag");
    std::string history;
    if (has_history == 1) {
        const std::uint64_t n = read_u64(in, "history length");
        if (n > (1ull << 30)) throw corruption_error("implausible history length");
        history.resize(n);
        if (n) read_bytes(in, history.data(), n, "history payload");
    } else if (has_history != 0) {
        throw corruption_error("invalid history flag");
    }
    if (history_csv) *history_csv = std::move(history);

    for (std::size_t i = 0; i < net.groups.size(); ++i)
        if (net.groups[i].depth_index != static_cast<int>(i))
            throw corruption_error("group depth indices not contiguous");
    return net;
}

Network load_checkpoint(const std::string& path, std::string* history_csv) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open checkpoint: " + path);
    return load_checkpoint(in, history_csv);
}

std::vector<double> softmax_row(const float* logits, std::int64_t count) {
    std::vector<double> p(static_cast<std::size_t>(count));
    double m = logits[0];
    for (std::int64_t i = 1; i < count; ++i) m = std::max(m, static_cast<double>(logits[i]));
    double s = 0;
    for (std::int64_t i = 0; i < count; ++i) {
        p[static_cast<std::size_t>(i)] = std::exp(static_cast<double>(logits[i]) - m);
        s += p[static_cast<std::size_t>(i)];
    }
    for (auto& v : p) v /= s;
    return p;
}

} // namespace binnet
