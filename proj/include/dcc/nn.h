#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dcc/param_store.h"
#include "dcc/tensor.h"

namespace dcc::nn {

template <typename T>
T sigmoid(T z) {
    return T(1) / (T(1) + std::exp(-z));
}

/// y = x W + b with x:[n], W:[n x m], b:[m].
template <typename T>
TensorT<T> affine(const TensorT<T>& x, const TensorT<T>& W, const TensorT<T>& b) {
    if (x.ndim() != 1 || W.ndim() != 2 || x.shape[0] != W.rows()) throw_shape_error("affine", x.shape, W.shape);
    if (b.ndim() != 1 || b.shape[0] != W.cols()) throw_shape_error("affine bias", b.shape, W.shape);
    const size_t n = W.rows(), m = W.cols();
    TensorT<T> y = b;
    for (size_t i = 0; i < n; ++i) {
        const T xi = x[i];
        const T* wrow = W.data.data() + i * m;
        for (size_t j = 0; j < m; ++j) y[j] += xi * wrow[j];
    }
    return y;
}

/// Accumulates dW += outer(x, dy) and db += dy; returns dx = W dy.
template <typename T>
TensorT<T> affine_backward(const TensorT<T>& x, const TensorT<T>& W, const TensorT<T>& dy,
                           TensorT<T>& dW, TensorT<T>& db) {
    const size_t n = W.rows(), m = W.cols();
    if (dy.numel() != m) throw_shape_error("affine_backward", dy.shape, W.shape);
    TensorT<T> dx({n});
    for (size_t i = 0; i < n; ++i) {
        const T xi = x[i];
        const T* wrow = W.data.data() + i * m;
        T* dwrow = dW.data.data() + i * m;
        T acc = T(0);
        for (size_t j = 0; j < m; ++j) {
            acc += wrow[j] * dy[j];
            dwrow[j] += xi * dy[j];
        }
        dx[i] = acc;
    }
    for (size_t j = 0; j < m; ++j) db[j] += dy[j];
    return dx;
}

/// Max-subtracted softmax; output is nonnegative and sums to 1.
template <typename T>
TensorT<T> softmax(const TensorT<T>& z) {
    if (z.numel() == 0) throw std::invalid_argument("softmax: empty input");
    TensorT<T> p = z;
    T m = *std::max_element(z.data.begin(), z.data.end());
    T sum = T(0);
    for (auto& v : p.data) {
        v = std::exp(v - m);
        sum += v;
    }
    for (auto& v : p.data) v /= sum;
    return p;
}

template <typename T>
struct LossGrad {
    T loss;
    TensorT<T> dlogits;
};

/// Mean multi-label sigmoid cross-entropy, computed in the stable
/// max(z,0) - z*t + log1p(exp(-|z|)) form. Gradient is (sigmoid(z) - t) / m.
template <typename T>
LossGrad<T> sigmoid_cross_entropy(const TensorT<T>& logits, const TensorT<T>& targets) {
    if (!logits.same_shape(targets)) throw_shape_error("sigmoid_cross_entropy", logits.shape, targets.shape);
    const size_t m = logits.numel();
    if (m == 0) throw std::invalid_argument("sigmoid_cross_entropy: empty input");
    for (T t : targets.data) {
        if (t != T(0) && t != T(1)) throw std::invalid_argument("sigmoid_cross_entropy: targets must be 0 or 1");
    }
    T loss = T(0);
    TensorT<T> grad(logits.shape);
    for (size_t i = 0; i < m; ++i) {
        const T z = logits[i], t = targets[i];
        loss += std::max(z, T(0)) - z * t + std::log1p(std::exp(-std::abs(z)));
        grad[i] = (sigmoid(z) - t) / static_cast<T>(m);
    }
    return {loss / static_cast<T>(m), std::move(grad)};
}

/// loss = -log softmax(logits)[target]; gradient = softmax(logits) - onehot.
template <typename T>
LossGrad<T> softmax_cross_entropy(const TensorT<T>& logits, size_t target) {
    if (target >= logits.numel()) {
        throw std::invalid_argument("softmax_cross_entropy: target index " + std::to_string(target) +
                                    " out of range for " + std::to_string(logits.numel()) + " classes");
    }
    T m = *std::max_element(logits.data.begin(), logits.data.end());
    T sum = T(0);
    for (T v : logits.data) sum += std::exp(v - m);
    T loss = -(logits[target] - m - std::log(sum));
    TensorT<T> grad = softmax(logits);
    grad[target] -= T(1);
    return {loss, std::move(grad)};
}

// ---------------------------------------------------------------------------
// LSTM cell. Parameter names under `prefix`: Wi Ui bi / Wf Uf bf / Wo Uo bo /
// Wg Ug bg, with W*: [E x H], U*: [H x H], b*: [H].
//
//   i = sigmoid(x Wi + h Ui + bi)      f = sigmoid(x Wf + h Uf + bf)
//   o = sigmoid(x Wo + h Uo + bo)      g = tanh   (x Wg + h Ug + bg)
//   c' = f . c + i . g                 h' = o . tanh(c')
// ---------------------------------------------------------------------------

template <typename T>
struct LstmCache {
    TensorT<T> x, h_prev, c_prev;
    TensorT<T> i, f, o, g;
    TensorT<T> c, tanh_c, h;
};

template <typename T>
LstmCache<T> lstm_forward(const ParamStoreT<T>& store, const std::string& prefix, const TensorT<T>& x,
                          const TensorT<T>& h_prev, const TensorT<T>& c_prev) {
    const TensorT<T>& Wi = store.at(prefix + "Wi");
    const size_t H = Wi.cols();
    if (x.numel() != Wi.rows()) throw_shape_error("lstm_forward input", x.shape, Wi.shape);
    if (h_prev.numel() != H || c_prev.numel() != H) throw_shape_error("lstm_forward state", h_prev.shape, {H});

    auto gate = [&](const char* w, const char* u, const char* b) {
        TensorT<T> pre = affine(x, store.at(prefix + w), store.at(prefix + b));
        const TensorT<T>& U = store.at(prefix + u);
        for (size_t r = 0; r < H; ++r) {
            const T hr = h_prev[r];
            const T* urow = U.data.data() + r * H;
            for (size_t j = 0; j < H; ++j) pre[j] += hr * urow[j];
        }
        return pre;
    };

    LstmCache<T> cache;
    cache.x = x;
    cache.h_prev = h_prev;
    cache.c_prev = c_prev;
    cache.i = gate("Wi", "Ui", "bi");
    cache.f = gate("Wf", "Uf", "bf");
    cache.o = gate("Wo", "Uo", "bo");
    cache.g = gate("Wg", "Ug", "bg");
    for (auto& v : cache.i.data) v = sigmoid(v);
    for (auto& v : cache.f.data) v = sigmoid(v);
    for (auto& v : cache.o.data) v = sigmoid(v);
    for (auto& v : cache.g.data) v = std::tanh(v);

    cache.c = TensorT<T>({H});
    cache.tanh_c = TensorT<T>({H});
    cache.h = TensorT<T>({H});
    for (size_t j = 0; j < H; ++j) {
        cache.c[j] = cache.f[j] * c_prev[j] + cache.i[j] * cache.g[j];
        cache.tanh_c[j] = std::tanh(cache.c[j]);
        cache.h[j] = cache.o[j] * cache.tanh_c[j];
    }
    return cache;
}

/// Backward through one cell. dh/dc are gradients on h' and c'; parameter
/// gradients accumulate into `grads`, and dx/dh_prev/dc_prev are written out
/// for the chain (any may be null).
template <typename T>
void lstm_backward(const ParamStoreT<T>& store, const std::string& prefix, const LstmCache<T>& cache,
                   const TensorT<T>& dh, const TensorT<T>& dc_in, NamedTensors<T>& grads,
                   TensorT<T>* dx_out, TensorT<T>* dh_prev_out, TensorT<T>* dc_prev_out) {
    const size_t H = cache.h.numel();
    const size_t E = cache.x.numel();

    TensorT<T> dc({H}), dpre_i({H}), dpre_f({H}), dpre_o({H}), dpre_g({H});
    for (size_t j = 0; j < H; ++j) {
        const T tc = cache.tanh_c[j];
        dpre_o[j] = dh[j] * tc * cache.o[j] * (T(1) - cache.o[j]);
        dc[j] = dc_in.numel() ? dc_in[j] : T(0);
        dc[j] += dh[j] * cache.o[j] * (T(1) - tc * tc);
        dpre_f[j] = dc[j] * cache.c_prev[j] * cache.f[j] * (T(1) - cache.f[j]);
        dpre_i[j] = dc[j] * cache.g[j] * cache.i[j] * (T(1) - cache.i[j]);
        dpre_g[j] = dc[j] * cache.i[j] * (T(1) - cache.g[j] * cache.g[j]);
    }

    TensorT<T> dx({E}), dh_prev({H});
    auto backprop_gate = [&](const char* w, const char* u, const char* b, const TensorT<T>& dpre) {
        const TensorT<T>& W = store.at(prefix + w);
        const TensorT<T>& U = store.at(prefix + u);
        TensorT<T>& dW = grad_slot(grads, prefix + w, W.shape);
        TensorT<T>& dU = grad_slot(grads, prefix + u, U.shape);
        TensorT<T>& db = grad_slot(grads, prefix + b, {H});
        for (size_t r = 0; r < E; ++r) {
            const T xr = cache.x[r];
            const T* wrow = W.data.data() + r * H;
            T* dwrow = dW.data.data() + r * H;
            T acc = T(0);
            for (size_t j = 0; j < H; ++j) {
                acc += wrow[j] * dpre[j];
                dwrow[j] += xr * dpre[j];
            }
            dx[r] += acc;
        }
        for (size_t r = 0; r < H; ++r) {
            const T hr = cache.h_prev[r];
            const T* urow = U.data.data() + r * H;
            T* durow = dU.data.data() + r * H;
            T acc = T(0);
            for (size_t j = 0; j < H; ++j) {
                acc += urow[j] * dpre[j];
                durow[j] += hr * dpre[j];
            }
            dh_prev[r] += acc;
        }
        for (size_t j = 0; j < H; ++j) db[j] += dpre[j];
    };
    backprop_gate("Wi", "Ui", "bi", dpre_i);
    backprop_gate("Wf", "Uf", "bf", dpre_f);
    backprop_gate("Wo", "Uo", "bo", dpre_o);
    backprop_gate("Wg", "Ug", "bg", dpre_g);

    if (dx_out) *dx_out = std::move(dx);
    if (dh_prev_out) *dh_prev_out = std::move(dh_prev);
    if (dc_prev_out) {
        *dc_prev_out = TensorT<T>({H});
        for (size_t j = 0; j < H; ++j) (*dc_prev_out)[j] = dc[j] * cache.f[j];
    }
}

/// Registers the 12 LSTM parameter tensors under `prefix`, uniform init in
/// [-init_range, init_range] with the forget-gate bias set to forget_bias.
template <typename T, typename RngT>
void add_lstm_params(ParamStoreT<T>& store, const std::string& prefix, size_t input_dim, size_t hidden_dim,
                     RngT& rng, double init_range, double forget_bias) {
    const char* gates[4] = {"i", "f", "o", "g"};
    for (const char* g : gates) {
        TensorT<T> W({input_dim, hidden_dim}), U({hidden_dim, hidden_dim}), b({hidden_dim});
        fill_uniform(W, rng, -init_range, init_range);
        fill_uniform(U, rng, -init_range, init_range);
        if (g[0] == 'f') {
            for (auto& v : b.data) v = static_cast<T>(forget_bias);
        }
        store.add(prefix + "W" + g, std::move(W));
        store.add(prefix + "U" + g, std::move(U));
        store.add(prefix + "b" + g, std::move(b));
    }
}

} // namespace dcc::nn
