#pragma once

#include <cstdint>
#include <vector>

#include "dcc/param_store.h"
#include "dcc/tensor.h"
#include "dcc/vocab.h"

namespace dcc {

/// Multi-label concept classifier over precomputed feature vectors.
/// Parameters live under "lex.W" [F x C] and "lex.b" [C]; when hidden > 0 a
/// tanh layer "lex.W1" [F x hidden], "lex.b1" [hidden] is inserted and
/// "lex.W" becomes [hidden x C].
struct LexicalParams {
    ParamStore store;
    ConceptSet concepts;
    size_t feature_dim = 0;
    size_t hidden = 0;
};

LexicalParams init_lexical(const ConceptSet& concepts, size_t feature_dim, size_t hidden, uint64_t seed);

/// Element-wise mean over equal-length frame feature vectors.
Tensor mean_pool_frames(const std::vector<Tensor>& frames);

/// Per-concept probabilities in [0,1]^C (independent sigmoids).
Tensor predict_concepts(const Tensor& features, const LexicalParams& params);

/// Same forward pass against any store holding the lex.* tensors (used by the
/// caption model, which embeds a frozen copy of the classifier).
Tensor predict_concepts(const Tensor& features, const ParamStore& store, size_t hidden);

struct LexicalExample {
    Tensor features;           // already mean-pooled for video
    std::vector<float> labels; // length C, values in {0,1}
};

struct LexicalTrainConfig {
    size_t epochs = 12;
    float lr = 0.5f;
    uint64_t seed = 2;
};

/// SGD on mean sigmoid cross-entropy, one update per example, shuffled per
/// epoch. Deterministic given seed.
void train_lexical(LexicalParams& params, const std::vector<LexicalExample>& examples,
                   const LexicalTrainConfig& cfg, std::vector<double>* epoch_losses = nullptr);

} // namespace dcc
