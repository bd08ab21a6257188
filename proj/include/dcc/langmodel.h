#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcc/nn.h"
#include "dcc/param_store.h"
#include "dcc/text.h"
#include "dcc/vocab.h"

namespace dcc {

/// Recurrent hidden/cell pair, zero-initialized at sequence start.
struct LstmState {
    Tensor h, c;

    static LstmState zero(size_t hidden_dim) { return {Tensor({hidden_dim}), Tensor({hidden_dim})}; }
};

/// Embedding -> LSTM -> prediction layer, trained on unpaired text. Tensor
/// names: "lm.embed" [V x E], "lm.lstm.{Wi,Ui,bi,Wf,Uf,bf,Wo,Uo,bo,Wg,Ug,bg}",
/// "lm.pred.W" [(E+H) x V], "lm.pred.b" [V].
struct LanguageModelParams {
    ParamStore store;
    Vocabulary vocab;
    size_t embed_dim = 0;
    size_t hidden_dim = 0;

    size_t vocab_size() const { return vocab.size(); }
};

LanguageModelParams init_language_model(const Vocabulary& vocab, size_t embed_dim, size_t hidden_dim,
                                        uint64_t seed);

/// One LSTM step; returns the output and the new state.
std::pair<Tensor, LstmState> lstm_step(const Tensor& x, const LstmState& state,
                                       const LanguageModelParams& params);

/// Embeds prev_word, steps the LSTM, and returns the language features
/// [embedding || lstm output] of length E+H plus the updated state.
std::pair<Tensor, LstmState> language_features(int prev_word, const LstmState& state,
                                               const LanguageModelParams& params);

/// Same, against any store holding the lm.* tensors (the caption model embeds
/// a frozen copy of the language model).
std::pair<Tensor, LstmState> language_features(int prev_word, const LstmState& state,
                                               const ParamStore& store, size_t embed_dim,
                                               size_t hidden_dim, size_t vocab_size);

/// softmax(f_L . pred.W + pred.b) over the vocabulary.
Tensor lm_next_distribution(const Tensor& features, const LanguageModelParams& params);

struct LmTrainConfig {
    size_t embed_dim = 32;
    size_t hidden_dim = 64;
    size_t epochs = 10;
    float lr = 0.15f;
    float clip = 5.0f;
    uint64_t seed = 3;
};

/// Teacher-forced training: per sentence, prepend BOS, append EOS, minimize
/// the mean next-token softmax cross-entropy by backprop through time, one
/// SGD update per sentence. Deterministic given seed.
LanguageModelParams train_language_model(const std::vector<TokenList>& sentences, const Vocabulary& vocab,
                                         const LmTrainConfig& cfg, std::vector<double>* epoch_losses = nullptr);

/// exp(total cross-entropy / total predicted tokens) over the corpus.
double lm_perplexity(const LanguageModelParams& params, const std::vector<TokenList>& sentences);

/// Mean next-token cross-entropy of an index sequence through the embedding,
/// LSTM, and prediction layers; accumulates parameter gradients when `grads`
/// is given. Shared by training (float) and the finite-difference checks
/// (double).
template <typename T>
double sequence_xent(const ParamStoreT<T>& store, size_t embed_dim, size_t hidden_dim,
                     const std::vector<int>& seq, NamedTensors<T>* grads = nullptr) {
    if (seq.size() < 2) throw std::invalid_argument("sequence_xent: need at least two tokens");
    const TensorT<T>& embed = store.at("lm.embed");
    const TensorT<T>& pred_w = store.at("lm.pred.W");
    const TensorT<T>& pred_b = store.at("lm.pred.b");
    const size_t E = embed_dim, H = hidden_dim;
    const size_t steps = seq.size() - 1;

    std::vector<nn::LstmCache<T>> caches(steps);
    std::vector<TensorT<T>> feats(steps), dlogits(steps);
    TensorT<T> h({H}), c({H});
    double total = 0.0;
    for (size_t t = 0; t < steps; ++t) {
        TensorT<T> x({E});
        const T* row = embed.data.data() + static_cast<size_t>(seq[t]) * E;
        for (size_t i = 0; i < E; ++i) x[i] = row[i];
        caches[t] = nn::lstm_forward(store, "lm.lstm.", x, h, c);
        h = caches[t].h;
        c = caches[t].c;
        TensorT<T> fl({E + H});
        for (size_t i = 0; i < E; ++i) fl[i] = x[i];
        for (size_t i = 0; i < H; ++i) fl[E + i] = h[i];
        auto lg = nn::softmax_cross_entropy(nn::affine(fl, pred_w, pred_b), static_cast<size_t>(seq[t + 1]));
        total += static_cast<double>(lg.loss);
        feats[t] = std::move(fl);
        dlogits[t] = std::move(lg.dlogits);
    }
    const double mean_loss = total / static_cast<double>(steps);
    if (!grads) return mean_loss;

    TensorT<T>& d_embed = grad_slot(*grads, "lm.embed", embed.shape);
    TensorT<T>& d_pred_w = grad_slot(*grads, "lm.pred.W", pred_w.shape);
    TensorT<T>& d_pred_b = grad_slot(*grads, "lm.pred.b", pred_b.shape);
    TensorT<T> dh_next, dc_next;
    const T inv_steps = T(1) / static_cast<T>(steps);
    for (size_t t = steps; t-- > 0;) {
        for (auto& v : dlogits[t].data) v *= inv_steps;
        TensorT<T> dfl = nn::affine_backward(feats[t], pred_w, dlogits[t], d_pred_w, d_pred_b);
        TensorT<T> dh({H});
        for (size_t i = 0; i < H; ++i) dh[i] = dfl[E + i] + (dh_next.numel() ? dh_next[i] : T(0));
        TensorT<T> dx_lstm;
        nn::lstm_backward(store, "lm.lstm.", caches[t], dh, dc_next, *grads, &dx_lstm, &dh_next, &dc_next);
        T* drow = d_embed.data.data() + static_cast<size_t>(seq[t]) * E;
        for (size_t i = 0; i < E; ++i) drow[i] += dfl[i] + dx_lstm[i];
    }
    return mean_loss;
}

} // namespace dcc
