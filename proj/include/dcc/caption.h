#pragma once

#include <cstdint>
#include <vector>

#include "dcc/dataset.h"
#include "dcc/langmodel.h"
#include "dcc/lexical.h"
#include "dcc/param_store.h"
#include "dcc/vocab.h"

namespace dcc {

/// The multimodal caption model: p_w = softmax(f_I W_I + f_L W_L + b), built
/// over a frozen classifier and a frozen language model. "cap.WL_language"
/// and "cap.b_language" snapshot the prediction weights as they were before
/// caption training and are never mutated afterwards.
///
/// Tensor names: "cap.WI" [C x V], "cap.WL" [(E+H) x V], "cap.b" [V],
/// "cap.WL_language", "cap.b_language", plus the embedded "lm.*" and "lex.*"
/// groups.
struct CaptionModel {
    ParamStore store;
    Vocabulary vocab;
    ConceptSet concepts;
    size_t embed_dim = 0;
    size_t hidden_dim = 0;
    size_t feature_dim = 0;
    size_t lex_hidden = 0;

    size_t concept_count() const { return concepts.size(); }
    size_t vocab_size() const { return vocab.size(); }
};

/// W_L and b start as exact copies of the language model's prediction layer,
/// W_I starts at zero, and the language snapshot is frozen alongside.
CaptionModel init_caption_model(const LanguageModelParams& lm, const LexicalParams& lex);

/// f_I W_I + f_L W_L + b. Shared by the float path and the double-precision
/// gradient checks.
template <typename T>
TensorT<T> multimodal_logits(const TensorT<T>& f_i, const TensorT<T>& w_i, const TensorT<T>& f_l,
                             const TensorT<T>& w_l, const TensorT<T>& b) {
    if (f_i.numel() != w_i.rows()) throw_shape_error("multimodal image term", f_i.shape, w_i.shape);
    if (f_l.numel() != w_l.rows()) throw_shape_error("multimodal language term", f_l.shape, w_l.shape);
    TensorT<T> logits = nn::affine(f_i, w_i, b);
    const size_t V = w_l.cols();
    for (size_t r = 0; r < w_l.rows(); ++r) {
        const T fr = f_l[r];
        const T* row = w_l.data.data() + r * V;
        for (size_t j = 0; j < V; ++j) logits[j] += fr * row[j];
    }
    return logits;
}

/// Next-word distribution over the vocabulary; sums to 1.
Tensor multimodal_forward(const Tensor& f_i, const Tensor& f_l, const CaptionModel& model);

enum class Regime { kDirect, kDelta };

struct CaptionTrainConfig {
    Regime regime = Regime::kDirect;
    size_t epochs = 16;
    float lr = 0.25f;
    float clip = 5.0f;
    uint64_t seed = 4;
};

/// Teacher-forced training of the multimodal unit on paired data; f_I comes
/// from the frozen classifier once per example, f_L from the frozen language
/// model. Direct regime trains {W_I, W_L, b} throughout; delta regime trains
/// {W_I, b} for the first ceil(epochs/2) epochs, then all three. The caller
/// is responsible for held-out filtering of `paired`.
void train_caption(CaptionModel& model, const std::vector<PairedExample>& paired,
                   const CaptionTrainConfig& cfg, std::vector<double>* epoch_losses = nullptr);

/// Feature vector of an example, mean-pooling frames for video.
Tensor caption_input_features(const PairedExample& ex);

/// Greedy decode from BOS with zero state. At every step the argmax is taken
/// over the word distribution excluding BOS, UNK, and the immediately
/// previous emitted word; ties go to the lowest vocabulary index. Stops at
/// EOS or max_len; BOS/EOS are not part of the output.
TokenList generate_caption(const Tensor& features, const CaptionModel& model, size_t max_len);
TokenList generate_caption(const PairedExample& ex, const CaptionModel& model, size_t max_len);

} // namespace dcc
