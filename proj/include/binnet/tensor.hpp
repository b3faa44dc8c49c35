#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "binnet/errors.hpp"

namespace binnet {

using Shape = std::vector<std::int64_t>;

inline std::int64_t shape_numel(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::int64_t{1},
                           std::multiplies<>());
}

inline std::string shape_str(const Shape& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

// Dense row-major n-dimensional array. Element (i0,...,ik) lives at
// sum(i_j * stride_j) with strides derived from the shape.
template <typename T>
class TensorT {
public:
    TensorT() = default;

    explicit TensorT(Shape shape)
        : shape_(std::move(shape)), data_(check_numel(shape_), T{0}) {}

    TensorT(Shape shape, std::vector<T> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (shape_numel(shape_) != static_cast<std::int64_t>(data_.size()))
            throw dimension_error("tensor data length " + std::to_string(data_.size()) +
                                  " does not match shape " + shape_str(shape_));
    }

    static TensorT zeros(Shape shape) { return TensorT(std::move(shape)); }

    static TensorT full(Shape shape, T value) {
        TensorT t(std::move(shape));
        std::fill(t.data_.begin(), t.data_.end(), value);
        return t;
    }

    const Shape& shape() const { return shape_; }
    std::int64_t dim(std::size_t i) const { return shape_[i]; }
    std::size_t rank() const { return shape_.size(); }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& vec() { return data_; }
    const std::vector<T>& vec() const { return data_; }

    T& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    const T& operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

    bool same_shape(const TensorT& other) const { return shape_ == other.shape_; }

    void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

    TensorT reshaped(Shape shape) const {
        if (shape_numel(shape) != size())
            throw dimension_error("reshape " + shape_str(shape_) + " -> " +
                                  shape_str(shape) + " changes element count");
        return TensorT(std::move(shape), data_);
    }

private:
    static std::size_t check_numel(const Shape& shape) {
        for (auto d : shape)
            if (d <= 0) throw dimension_error("non-positive dimension in " + shape_str(shape));
        return static_cast<std::size_t>(shape_numel(shape));
    }

    Shape shape_;
    std::vector<T> data_;
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

// ---------------------------------------------------------------------------
// Reverse-mode automatic differentiation.
//
// Every operation below builds a graph node eagerly; nodes own their inputs,
// so the graph for a forward pass stays alive as long as its output. backward()
// walks the nodes in reverse topological order and accumulates gradients into
// every node that requires them. Single-threaded per graph by contract.
// ---------------------------------------------------------------------------

template <typename T>
struct Node {
    TensorT<T> value;
    TensorT<T> grad; // allocated lazily by backward()
    bool requires_grad = false;
    bool trainable = false; // parameter leaf
    std::vector<std::shared_ptr<Node>> inputs;
    std::function<void()> backward_fn;
    const char* op = "leaf";

    void ensure_zero_grad() {
        if (grad.same_shape(value) && !grad.empty())
            grad.fill(T{0});
        else
            grad = TensorT<T>::zeros(value.shape());
    }
};

template <typename T>
using Var = std::shared_ptr<Node<T>>;

using VarF = Var<float>;
using VarD = Var<double>;

template <typename T>
Var<T> constant(TensorT<T> value) {
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(value);
    return n;
}

template <typename T>
Var<T> parameter(TensorT<T> value) {
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(value);
    n->requires_grad = true;
    n->trainable = true;
    return n;
}

namespace detail {

template <typename T>
Var<T> make_op(TensorT<T> value, std::vector<Var<T>> inputs, const char* op) {
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(value);
    n->inputs = std::move(inputs);
    n->op = op;
    for (const auto& in : n->inputs)
        if (in->requires_grad) n->requires_grad = true;
    return n;
}

} // namespace detail

// out[n,f,oh,ow] = bias[f] + sum_{c,kh,kw} in[n,c,oh*s-p+kh,ow*s-p+kw] * w[f,c,kh,kw]
// with zero padding. Output spatial dims follow the usual floor rule.
template <typename T>
Var<T> conv2d(const Var<T>& input, const Var<T>& kernel, const Var<T>& bias,
              int stride, int padding) {
    if (input->value.rank() != 4 || kernel->value.rank() != 4)
        throw dimension_error("conv2d expects 4-d input and kernel, got " +
                              shape_str(input->value.shape()) + " and " +
                              shape_str(kernel->value.shape()));
    if (stride < 1) throw param_error("conv2d stride must be positive");
    if (padding < 0) throw param_error("conv2d padding must be non-negative");
    const std::int64_t N = input->value.dim(0), C = input->value.dim(1);
    const std::int64_t H = input->value.dim(2), W = input->value.dim(3);
    const std::int64_t F = kernel->value.dim(0), KC = kernel->value.dim(1);
    const std::int64_t KH = kernel->value.dim(2), KW = kernel->value.dim(3);
    if (KC != C)
        throw dimension_error("conv2d kernel channels " + std::to_string(KC) +
                              " do not match input channels " + std::to_string(C));
    if (bias->value.shape() != Shape{F})
        throw dimension_error("conv2d bias must have shape [" + std::to_string(F) + "]");
    const std::int64_t HP = H + 2 * padding, WP = W + 2 * padding;
    if (KH > HP || KW > WP)
        throw dimension_error("conv2d kernel " + std::to_string(KH) + "x" + std::to_string(KW) +
                              " larger than padded input " + std::to_string(HP) + "x" +
                              std::to_string(WP));
    const std::int64_t HO = (HP - KH) / stride + 1;
    const std::int64_t WO = (WP - KW) / stride + 1;

    // Zero-padded copy of the input; keeps the inner loops branch-free.
    auto padded = std::make_shared<std::vector<T>>(
        static_cast<std::size_t>(N * C * HP * WP), T{0});
    {
        const T* src = input->value.data();
        T* dst = padded->data();
        for (std::int64_t n = 0; n < N; ++n)
            for (std::int64_t c = 0; c < C; ++c)
                for (std::int64_t y = 0; y < H; ++y)
                    std::copy_n(src + ((n * C + c) * H + y) * W, W,
                                dst + ((n * C + c) * HP + y + padding) * WP + padding);
    }

    TensorT<T> out({N, F, HO, WO});
    {
        T* o = out.data();
        const T* w = kernel->value.data();
        const T* b = bias->value.data();
        const T* pad = padded->data();
        for (std::int64_t n = 0; n < N; ++n)
            for (std::int64_t f = 0; f < F; ++f) {
                T* oplane = o + (n * F + f) * HO * WO;
                std::fill_n(oplane, HO * WO, b[f]);
                for (std::int64_t c = 0; c < C; ++c)
                    for (std::int64_t kh = 0; kh < KH; ++kh)
                        for (std::int64_t kw = 0; kw < KW; ++kw) {
                            const T wv = w[((f * C + c) * KH + kh) * KW + kw];
                            for (std::int64_t oh = 0; oh < HO; ++oh) {
                                const T* prow =
                                    pad + ((n * C + c) * HP + oh * stride + kh) * WP + kw;
                                T* orow = oplane + oh * WO;
                                for (std::int64_t ow = 0; ow < WO; ++ow)
                                    orow[ow] += wv * prow[ow * stride];
                            }
                        }
            }
    }

    auto node = detail::make_op<T>(std::move(out), {input, kernel, bias}, "conv2d");
    Node<T>* self = node.get();
    Node<T>* in = input.get();
    Node<T>* kn = kernel.get();
    Node<T>* bn = bias.get();
    node->backward_fn = [=]() {
        const T* go = self->grad.data();
        const T* pad = padded->data();
        const T* w = kn->value.data();
        if (bn->requires_grad) {
            T* db = bn->grad.data();
            for (std::int64_t n = 0; n < N; ++n)
                for (std::int64_t f = 0; f < F; ++f) {
                    const T* gplane = go + (n * F + f) * HO * WO;
                    T acc{0};
                    for (std::int64_t i = 0; i < HO * WO; ++i) acc += gplane[i];
                    db[f] += acc;
                }
        }
        if (kn->requires_grad) {
            T* dw = kn->grad.data();
            for (std::int64_t n = 0; n < N; ++n)
                for (std::int64_t f = 0; f < F; ++f)
                    for (std::int64_t c = 0; c < C; ++c)
                        for (std::int64_t kh = 0; kh < KH; ++kh)
                            for (std::int64_t kw = 0; kw < KW; ++kw) {
                                T acc{0};
                                for (std::int64_t oh = 0; oh < HO; ++oh) {
                                    const T* prow =
                                        pad + ((n * C + c) * HP + oh * stride + kh) * WP + kw;
                                    const T* grow = go + ((n * F + f) * HO + oh) * WO;
                                    for (std::int64_t ow = 0; ow < WO; ++ow)
                                        acc += prow[ow * stride] * grow[ow];
                                }
                                dw[((f * C + c) * KH + kh) * KW + kw] += acc;
                            }
        }
        if (in->requires_grad) {
            std::vector<T> dpad(static_cast<std::size_t>(N * C * HP * WP), T{0});
            for (std::int64_t n = 0; n < N; ++n)
                for (std::int64_t f = 0; f < F; ++f)
                    for (std::int64_t c = 0; c < C; ++c)
                        for (std::int64_t kh = 0; kh < KH; ++kh)
                            for (std::int64_t kw = 0; kw < KW; ++kw) {
                                const T wv = w[((f * C + c) * KH + kh) * KW + kw];
                                for (std::int64_t oh = 0; oh < HO; ++oh) {
                                    T* prow =
                                        dpad.data() +
                                        ((n * C + c) * HP + oh * stride + kh) * WP + kw;
                                    const T* grow = go + ((n * F + f) * HO + oh) * WO;
                                    for (std::int64_t ow = 0; ow < WO; ++ow)
                                        prow[ow * stride] += wv * grow[ow];
                                }
                            }
            T* dx = in->grad.data();
            for (std::int64_t n = 0; n < N; ++n)
                for (std::int64_t c = 0; c < C; ++c)
                    for (std::int64_t y = 0; y < H; ++y) {
                        const T* srow = dpad.data() + ((n * C + c) * HP + y + padding) * WP + padding;
                        T* drow = dx + ((n * C + c) * H + y) * W;
                        for (std::int64_t x = 0; x < W; ++x) drow[x] += srow[x];
                    }
        }
    };
    return node;
}

// Max over each window; gradient routes to the first (row-major) maximal
// element of the window.
template <typename T>
Var<T> maxpool2d(const Var<T>& input, int window, int stride) {
    if (input->value.rank() != 4)
        throw dimension_error("maxpool2d expects 4-d input, got " +
                              shape_str(input->value.shape()));
    if (window < 1 || stride < 1) throw param_error("maxpool2d window/stride must be positive");
    const std::int64_t N = input->value.dim(0), C = input->value.dim(1);
    const std::int64_t H = input->value.dim(2), W = input->value.dim(3);
    if (window > H || window > W)
        throw dimension_error("maxpool2d window " + std::to_string(window) +
                              " larger than spatial dims " + std::to_string(H) + "x" +
                              std::to_string(W));
    const std::int64_t HO = (H - window) / stride + 1;
    const std::int64_t WO = (W - window) / stride + 1;

    TensorT<T> out({N, C, HO, WO});
    auto argmax = std::make_shared<std::vector<std::int64_t>>(
        static_cast<std::size_t>(out.size()));
    {
        const T* x = input->value.data();
        T* o = out.data();
        std::int64_t oi = 0;
        for (std::int64_t n = 0; n < N; ++n)
            for (std::int64_t c = 0; c < C; ++c) {
                const T* plane = x + (n * C + c) * H * W;
                const std::int64_t base = (n * C + c) * H * W;
                for (std::int64_t oh = 0; oh < HO; ++oh)
                    for (std::int64_t ow = 0; ow < WO; ++ow, ++oi) {
                        T best = plane[oh * stride * W + ow * stride];
                        std::int64_t besti = oh * stride * W + ow * stride;
                        for (std::int64_t ky = 0; ky < window; ++ky)
                            for (std::int64_t kx = 0; kx < window; ++kx) {
                                const std::int64_t idx =
                                    (oh * stride + ky) * W + ow * stride + kx;
                                if (plane[idx] > best) {
                                    best = plane[idx];
                                    besti = idx;
                                }
                            }
                        o[oi] = best;
                        (*argmax)[static_cast<std::size_t>(oi)] = base + besti;
                    }
            }
    }

    auto node = detail::make_op<T>(std::move(out), {input}, "maxpool2d");
    Node<T>* self = node.get();
    Node<T>* in = input.get();
    node->backward_fn = [=]() {
        if (!in->requires_grad) return;
        const T* go = self->grad.data();
        T* dx = in->grad.data();
        for (std::size_t i = 0; i < argmax->size(); ++i)
            dx[(*argmax)[i]] += go[i];
    };
    return node;
}

// Elementwise max(0, x). Subgradient at 0 is 0.
template <typename T>
Var<T> relu(const Var<T>& input) {
    TensorT<T> out(input->value.shape());
    const T* x = input->value.data();
    T* o = out.data();
    for (std::int64_t i = 0; i < out.size(); ++i) o[i] = x[i] > T{0} ? x[i] : T{0};

    auto node = detail::make_op<T>(std::move(out), {input}, "relu");
    Node<T>* self = node.get();
    Node<T>* in = input.get();
    node->backward_fn = [=]() {
        if (!in->requires_grad) return;
        const T* go = self->grad.data();
        const T* xv = in->value.data();
        T* dx = in->grad.data();
        for (std::int64_t i = 0; i < self->value.size(); ++i)
            if (xv[i] > T{0}) dx[i] += go[i];
    };
    return node;
}

// out = input @ weight + bias, input [N,D], weight [D,K], bias [K].
template <typename T>
Var<T> dense(const Var<T>& input, const Var<T>& weight, const Var<T>& bias) {
    if (input->value.rank() != 2 || weight->value.rank() != 2)
        throw dimension_error("dense expects 2-d input and weight, got " +
                              shape_str(input->value.shape()) + " and " +
                              shape_str(weight->value.shape()));
    const std::int64_t N = input->value.dim(0), D = input->value.dim(1);
    const std::int64_t WD = weight->value.dim(0), K = weight->value.dim(1);
    if (WD != D)
        throw dimension_error("dense inner dims disagree: input " +
                              shape_str(input->value.shape()) + " vs weight " +
                              shape_str(weight->value.shape()));
    if (bias->value.shape() != Shape{K})
        throw dimension_error("dense bias must have shape [" + std::to_string(K) + "]");

    TensorT<T> out({N, K});
    {
        const T* x = input->value.data();
        const T* w = weight->value.data();
        const T* b = bias->value.data();
        T* o = out.data();
        for (std::int64_t n = 0; n < N; ++n) {
            T* orow = o + n * K;
            std::copy_n(b, K, orow);
            for (std::int64_t d = 0; d < D; ++d) {
                const T xv = x[n * D + d];
                const T* wrow = w + d * K;
                for (std::int64_t k = 0; k < K; ++k) orow[k] += xv * wrow[k];
            }
        }
    }

    auto node = detail::make_op<T>(std::move(out), {input, weight, bias}, "dense");
    Node<T>* self = node.get();
    Node<T>* in = input.get();
    Node<T>* wn = weight.get();
    Node<T>* bn = bias.get();
    node->backward_fn = [=]() {
        const T* go = self->grad.data();
        if (bn->requires_grad) {
            T* db = bn->grad.data();
            for (std::int64_t n = 0; n < N; ++n)
                for (std::int64_t k = 0; k < K; ++k) db[k] += go[n * K + k];
        }
        if (wn->requires_grad) {
            T* dw = wn->grad.data();
            const T* x = in->value.data();
            for (std::int64_t n = 0; n < N; ++n)
                for (std::int64_t d = 0; d < D; ++d) {
                    const T xv = x[n * D + d];
                    const T* grow = go + n * K;
                    T* dwrow = dw + d * K;
                    for (std::int64_t k = 0; k < K; ++k) dwrow[k] += xv * grow[k];
                }
        }
        if (in->requires_grad) {
            T* dx = in->grad.data();
            const T* w = wn->value.data();
            for (std::int64_t n = 0; n < N; ++n)
                for (std::int64_t d = 0; d < D; ++d) {
                    const T* wrow = w + d * K;
                    const T* grow = go + n * K;
                    T acc{0};
                    for (std::int64_t k = 0; k < K; ++k) acc += wrow[k] * grow[k];
                    dx[n * D + d] += acc;
                }
        }
    };
    return node;
}

// [N,...] -> [N, prod(rest)]. Row-major, so this is a pure reshape.
template <typename T>
Var<T> flatten(const Var<T>& input) {
    if (input->value.rank() < 2)
        throw dimension_error("flatten expects rank >= 2, got " +
                              shape_str(input->value.shape()));
    const std::int64_t N = input->value.dim(0);
    const std::int64_t D = input->value.size() / N;
    auto node = detail::make_op<T>(input->value.reshaped({N, D}), {input}, "flatten");
    Node<T>* self = node.get();
    Node<T>* in = input.get();
    node->backward_fn = [=]() {
        if (!in->requires_grad) return;
        const T* go = self->grad.data();
        T* dx = in->grad.data();
        for (std::int64_t i = 0; i < self->value.size(); ++i) dx[i] += go[i];
    };
    return node;
}

// Elementwise sum of two same-shape tensors.
template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
    if (!a->value.same_shape(b->value))
        throw dimension_error("add shapes disagree: " + shape_str(a->value.shape()) +
                              " vs " + shape_str(b->value.shape()));
    TensorT<T> out(a->value.shape());
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] = a->value[i] + b->value[i];
    auto node = detail::make_op<T>(std::move(out), {a, b}, "add");
    Node<T>* self = node.get();
    Node<T>* an = a.get();
    Node<T>* bn = b.get();
    node->backward_fn = [=]() {
        const T* go = self->grad.data();
        if (an->requires_grad)
            for (std::int64_t i = 0; i < self->value.size(); ++i) an->grad[i] += go[i];
        if (bn->requires_grad)
            for (std::int64_t i = 0; i < self->value.size(); ++i) bn->grad[i] += go[i];
    };
    return node;
}

// Multiply by a scalar constant.
template <typename T>
Var<T> scale(const Var<T>& a, T factor) {
    TensorT<T> out(a->value.shape());
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] = a->value[i] * factor;
    auto node = detail::make_op<T>(std::move(out), {a}, "scale");
    Node<T>* self = node.get();
    Node<T>* an = a.get();
    node->backward_fn = [=]() {
        if (!an->requires_grad) return;
        const T* go = self->grad.data();
        for (std::int64_t i = 0; i < self->value.size(); ++i) an->grad[i] += go[i] * factor;
    };
    return node;
}

// Scalar dot(input, weights) with constant weights. sum(x) is weighted_sum
// with all-ones weights; a one-hot weight picks out a single element.
template <typename T>
Var<T> weighted_sum(const Var<T>& input, TensorT<T> weights) {
    if (!input->value.same_shape(weights))
        throw dimension_error("weighted_sum weights shape " + shape_str(weights.shape()) +
                              " does not match input " + shape_str(input->value.shape()));
    T acc{0};
    for (std::int64_t i = 0; i < weights.size(); ++i) acc += input->value[i] * weights[i];
    auto w = std::make_shared<TensorT<T>>(std::move(weights));
    auto node = detail::make_op<T>(TensorT<T>({1}, {acc}), {input}, "weighted_sum");
    Node<T>* self = node.get();
    Node<T>* in = input.get();
    node->backward_fn = [=]() {
        if (!in->requires_grad) return;
        const T g = self->grad[0];
        for (std::int64_t i = 0; i < w->size(); ++i) in->grad[i] += g * (*w)[i];
    };
    return node;
}

template <typename T>
Var<T> sum(const Var<T>& input) {
    return weighted_sum(input, TensorT<T>::full(input->value.shape(), T{1}));
}

template <typename T>
struct SoftmaxLoss {
    Var<T> loss;              // scalar: mean cross-entropy over the batch
    TensorT<T> probabilities; // [N,C], rows sum to 1
};

// Numerically stabilized softmax (max subtraction) followed by mean negative
// log-likelihood of the true classes.
template <typename T>
SoftmaxLoss<T> softmax_cross_entropy(const Var<T>& logits, const std::vector<int>& labels) {
    if (logits->value.rank() != 2)
        throw dimension_error("softmax_cross_entropy expects 2-d logits, got " +
                              shape_str(logits->value.shape()));
    const std::int64_t N = logits->value.dim(0), C = logits->value.dim(1);
    if (static_cast<std::int64_t>(labels.size()) != N)
        throw label_error("label count " + std::to_string(labels.size()) +
                          " does not match batch size " + std::to_string(N));
    for (int l : labels)
        if (l < 0 || l >= C)
            throw label_error("label " + std::to_string(l) + " outside [0," +
                              std::to_string(C) + ")");

    auto probs = std::make_shared<TensorT<T>>(Shape{N, C});
    T loss_acc{0};
    {
        const T* x = logits->value.data();
        T* p = probs->data();
        for (std::int64_t n = 0; n < N; ++n) {
            const T* row = x + n * C;
            T m = row[0];
            for (std::int64_t c = 1; c < C; ++c) m = std::max(m, row[c]);
            T s{0};
            for (std::int64_t c = 0; c < C; ++c) {
                p[n * C + c] = std::exp(row[c] - m);
                s += p[n * C + c];
            }
            for (std::int64_t c = 0; c < C; ++c) p[n * C + c] /= s;
            loss_acc += std::log(s) - (row[labels[static_cast<std::size_t>(n)]] - m);
        }
    }
    const T loss_value = loss_acc / static_cast<T>(N);

    auto node = detail::make_op<T>(TensorT<T>({1}, {loss_value}), {logits},
                                   "softmax_cross_entropy");
    auto labels_copy = std::make_shared<std::vector<int>>(labels);
    Node<T>* self = node.get();
    Node<T>* in = logits.get();
    node->backward_fn = [=]() {
        if (!in->requires_grad) return;
        const T g = self->grad[0] / static_cast<T>(N);
        const T* p = probs->data();
        T* dx = in->grad.data();
        for (std::int64_t n = 0; n < N; ++n)
            for (std::int64_t c = 0; c < C; ++c) {
                T d = p[n * C + c];
                if (c == (*labels_copy)[static_cast<std::size_t>(n)]) d -= T{1};
                dx[n * C + c] += g * d;
            }
    };
    return {node, *probs};
}

// Runs the chain rule from a scalar loss back to every node that requires
// gradients. Gradients are freshly zeroed on each call.
template <typename T>
void backward(const Var<T>& loss) {
    if (!loss || loss->value.empty())
        throw state_error("backward called before a forward pass produced a loss");
    if (loss->value.size() != 1)
        throw state_error("backward requires a scalar loss, got " +
                          shape_str(loss->value.shape()));
    if (!loss->requires_grad)
        throw state_error("loss does not depend on any gradient-tracked tensor");

    // Iterative post-order DFS; creation order of inputs fixes the traversal,
    // so gradient accumulation order is deterministic.
    std::vector<Node<T>*> order;
    std::unordered_set<Node<T>*> visited;
    std::vector<std::pair<Node<T>*, std::size_t>> stack;
    stack.emplace_back(loss.get(), 0);
    visited.insert(loss.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->inputs.size()) {
            Node<T>* child = node->inputs[next++].get();
            if (child->requires_grad && visited.insert(child).second)
                stack.emplace_back(child, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    for (Node<T>* n : order) n->ensure_zero_grad();
    loss->grad[0] = T{1};
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if ((*it)->backward_fn) (*it)->backward_fn();
}

} // namespace binnet
