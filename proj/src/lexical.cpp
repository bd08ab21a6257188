#include "dcc/lexical.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dcc/nn.h"
#include "dcc/rng.h"

namespace dcc {

LexicalParams init_lexical(const ConceptSet& concepts, size_t feature_dim, size_t hidden, uint64_t seed) {
    if (concepts.size() == 0) throw std::invalid_argument("init_lexical: empty concept set");
    if (feature_dim == 0) throw std::invalid_argument("init_lexical: feature_dim must be positive");
    LexicalParams params;
    params.concepts = concepts;
    params.feature_dim = feature_dim;
    params.hidden = hidden;
    const size_t C = concepts.size();
    Rng rng(seed);
    if (hidden > 0) {
        Tensor w1({feature_dim, hidden});
        fill_uniform(w1, rng, -0.08, 0.08);
        params.store.add("lex.W1", std::move(w1));
        params.store.add("lex.b1", Tensor({hidden}));
        Tensor w({hidden, C});
        fill_uniform(w, rng, -0.08, 0.08);
        params.store.add("lex.W", std::move(w));
    } else {
        params.store.add("lex.W", Tensor({feature_dim, C}));
    }
    params.store.add("lex.b", Tensor({C}));
    return params;
}

Tensor mean_pool_frames(const std::vector<Tensor>& frames) {
    if (frames.empty()) throw std::invalid_argument("mean_pool_frames: empty frame list");
    const size_t F = frames[0].numel();
    Tensor out({F});
    for (const auto& frame : frames) {
        if (frame.numel() != F) throw_shape_error("mean_pool_frames", frame.shape, frames[0].shape);
        for (size_t i = 0; i < F; ++i) out[i] += frame[i];
    }
    for (auto& v : out.data) v /= static_cast<float>(frames.size());
    return out;
}

Tensor predict_concepts(const Tensor& features, const ParamStore& store, size_t hidden) {
    Tensor logits;
    if (hidden > 0) {
        Tensor h = nn::affine(features, store.at("lex.W1"), store.at("lex.b1"));
        for (auto& v : h.data) v = std::tanh(v);
        logits = nn::affine(h, store.at("lex.W"), store.at("lex.b"));
    } else {
        logits = nn::affine(features, store.at("lex.W"), store.at("lex.b"));
    }
    for (auto& v : logits.data) v = nn::sigmoid(v);
    return logits;
}

Tensor predict_concepts(const Tensor& features, const LexicalParams& params) {
    if (features.numel() != params.feature_dim) {
        throw_shape_error("predict_concepts", features.shape, {params.feature_dim});
    }
    return predict_concepts(features, params.store, params.hidden);
}

void train_lexical(LexicalParams& params, const std::vector<LexicalExample>& examples,
                   const LexicalTrainConfig& cfg, std::vector<double>* epoch_losses) {
    if (examples.empty()) throw std::invalid_argument("train_lexical: empty training set");
    const size_t C = params.concepts.size();
    for (const auto& ex : examples) {
        if (ex.features.numel() != params.feature_dim) {
            throw_shape_error("train_lexical features", ex.features.shape, {params.feature_dim});
        }
        if (ex.labels.size() != C) throw std::invalid_argument("train_lexical: label length mismatch");
    }

    Rng rng(cfg.seed);
    std::vector<size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);

    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (size_t idx : order) {
            const auto& ex = examples[idx];
            Tensor targets({C}, std::vector<float>(ex.labels));
            NamedTensors<float> grads;
            float loss;
            if (params.hidden > 0) {
                const Tensor& w1 = params.store.at("lex.W1");
                Tensor pre = nn::affine(ex.features, w1, params.store.at("lex.b1"));
                Tensor h = pre;
                for (auto& v : h.data) v = std::tanh(v);
                const Tensor& w = params.store.at("lex.W");
                auto lg = nn::sigmoid_cross_entropy(nn::affine(h, w, params.store.at("lex.b")), targets);
                loss = lg.loss;
                Tensor dh = nn::affine_backward(h, w, lg.dlogits, grad_slot(grads, "lex.W", w.shape),
                                                grad_slot(grads, "lex.b", {C}));
                for (size_t i = 0; i < dh.numel(); ++i) dh[i] *= 1.0f - h[i] * h[i];
                nn::affine_backward(ex.features, w1, dh, grad_slot(grads, "lex.W1", w1.shape),
                                    grad_slot(grads, "lex.b1", {params.hidden}));
            } else {
                const Tensor& w = params.store.at("lex.W");
                auto lg = nn::sigmoid_cross_entropy(nn::affine(ex.features, w, params.store.at("lex.b")),
                                                    targets);
                loss = lg.loss;
                nn::affine_backward(ex.features, w, lg.dlogits, grad_slot(grads, "lex.W", w.shape),
                                    grad_slot(grads, "lex.b", {C}));
            }
            epoch_loss += loss;
            sgd_step(params.store, grads, cfg.lr);
        }
        if (epoch_losses) epoch_losses->push_back(epoch_loss / static_cast<double>(examples.size()));
    }
}

} // namespace dcc
