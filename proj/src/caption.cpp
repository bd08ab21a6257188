#include "dcc/caption.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dcc/rng.h"

namespace dcc {

CaptionModel init_caption_model(const LanguageModelParams& lm, const LexicalParams& lex) {
    CaptionModel model;
    model.vocab = lm.vocab;
    model.concepts = lex.concepts;
    model.embed_dim = lm.embed_dim;
    model.hidden_dim = lm.hidden_dim;
    model.feature_dim = lex.feature_dim;
    model.lex_hidden = lex.hidden;
    for (const auto& w : lex.concepts.words()) {
        if (!lm.vocab.contains(w)) {
            throw std::invalid_argument("init_caption_model: concept '" + w + "' missing from vocabulary");
        }
    }

    for (const auto& [name, entry] : lm.store.entries()) model.store.add(name, entry.value, false);
    for (const auto& [name, entry] : lex.store.entries()) model.store.add(name, entry.value, false);

    const size_t C = lex.concepts.size();
    const size_t V = lm.vocab.size();
    model.store.add("cap.WI", Tensor({C, V}), true);
    model.store.add("cap.WL", lm.store.at("lm.pred.W"), true);
    model.store.add("cap.b", lm.store.at("lm.pred.b"), true);
    model.store.add("cap.WL_language", lm.store.at("lm.pred.W"), false);
    model.store.add("cap.b_language", lm.store.at("lm.pred.b"), false);
    return model;
}

Tensor multimodal_forward(const Tensor& f_i, const Tensor& f_l, const CaptionModel& model) {
    return nn::softmax(multimodal_logits(f_i, model.store.at("cap.WI"), f_l, model.store.at("cap.WL"),
                                         model.store.at("cap.b")));
}

Tensor caption_input_features(const PairedExample& ex) {
    return ex.is_video() ? mean_pool_frames(ex.frames) : ex.features;
}

namespace {

struct TrainItem {
    size_t example;           // index into the f_I table
    std::vector<int> seq;     // BOS ... EOS
    std::vector<Tensor> feats; // f_L per step, precomputed under the frozen LM
};

} // namespace

void train_caption(CaptionModel& model, const std::vector<PairedExample>& paired,
                   const CaptionTrainConfig& cfg, std::vector<double>* epoch_losses) {
    if (paired.empty()) throw std::invalid_argument("train_caption: empty paired set");
    const size_t E = model.embed_dim, H = model.hidden_dim;
    const size_t C = model.concept_count(), V = model.vocab_size();

    // f_I once per example from the frozen classifier.
    std::vector<Tensor> image_feats;
    image_feats.reserve(paired.size());
    for (const auto& ex : paired) {
        Tensor x = caption_input_features(ex);
        if (x.numel() != model.feature_dim) {
            throw_shape_error("train_caption features", x.shape, {model.feature_dim});
        }
        image_feats.push_back(predict_concepts(x, model.store, model.lex_hidden));
    }

    // f_L per caption position; the language model is frozen, so these are
    // constant across epochs.
    std::vector<TrainItem> items;
    for (size_t e = 0; e < paired.size(); ++e) {
        for (const auto& caption : paired[e].captions) {
            TrainItem item;
            item.example = e;
            item.seq.push_back(Vocabulary::kBos);
            for (const auto& tok : caption) item.seq.push_back(model.vocab.index_or_unk(tok));
            item.seq.push_back(Vocabulary::kEos);
            LstmState state = LstmState::zero(H);
            for (size_t t = 0; t + 1 < item.seq.size(); ++t) {
                auto [fl, next] = language_features(item.seq[t], state, model.store, E, H, V);
                item.feats.push_back(std::move(fl));
                state = std::move(next);
            }
            items.push_back(std::move(item));
        }
    }

    const size_t phase1 = cfg.regime == Regime::kDelta ? (cfg.epochs + 1) / 2 : 0;
    Rng rng(cfg.seed);
    std::vector<size_t> order(items.size());
    std::iota(order.begin(), order.end(), 0);

    const Tensor& w_i = model.store.at("cap.WI");
    const Tensor& w_l = model.store.at("cap.WL");
    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const bool freeze_wl = cfg.regime == Regime::kDelta && epoch < phase1;
        model.store.set_trainable("cap.WI", true);
        model.store.set_trainable("cap.WL", !freeze_wl);
        model.store.set_trainable("cap.b", true);

        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (size_t idx : order) {
            const TrainItem& item = items[idx];
            const Tensor& f_i = image_feats[item.example];
            const size_t steps = item.feats.size();
            NamedTensors<float> grads;
            Tensor& d_wi = grad_slot(grads, "cap.WI", {C, V});
            Tensor& d_wl = grad_slot(grads, "cap.WL", {E + H, V});
            Tensor& d_b = grad_slot(grads, "cap.b", {V});
            double item_loss = 0.0;
            for (size_t t = 0; t < steps; ++t) {
                Tensor logits = multimodal_logits(f_i, w_i, item.feats[t], w_l, model.store.at("cap.b"));
                auto lg = nn::softmax_cross_entropy(logits, static_cast<size_t>(item.seq[t + 1]));
                item_loss += lg.loss;
                const float inv = 1.0f / static_cast<float>(steps);
                for (auto& v : lg.dlogits.data) v *= inv;
                for (size_t r = 0; r < C; ++r) {
                    const float fr = f_i[r];
                    float* row = d_wi.data.data() + r * V;
                    for (size_t j = 0; j < V; ++j) row[j] += fr * lg.dlogits[j];
                }
                for (size_t r = 0; r < E + H; ++r) {
                    const float fr = item.feats[t][r];
                    float* row = d_wl.data.data() + r * V;
                    for (size_t j = 0; j < V; ++j) row[j] += fr * lg.dlogits[j];
                }
                for (size_t j = 0; j < V; ++j) d_b[j] += lg.dlogits[j];
            }
            epoch_loss += item_loss / static_cast<double>(steps);
            sgd_step(model.store, grads, cfg.lr, cfg.clip);
        }
        if (epoch_losses) epoch_losses->push_back(epoch_loss / static_cast<double>(items.size()));
    }
    model.store.set_trainable("cap.WL", true);
}

TokenList generate_caption(const Tensor& features, const CaptionModel& model, size_t max_len) {
    if (max_len < 1) throw std::invalid_argument("generate_caption: max_len must be >= 1");
    if (features.numel() != model.feature_dim) {
        throw_shape_error("generate_caption", features.shape, {model.feature_dim});
    }
    Tensor f_i = predict_concepts(features, model.store, model.lex_hidden);
    const size_t E = model.embed_dim, H = model.hidden_dim, V = model.vocab_size();

    TokenList out;
    LstmState state = LstmState::zero(H);
    int prev_input = Vocabulary::kBos;
    int prev_emitted = -1;
    for (size_t step = 0; step < max_len; ++step) {
        auto [fl, next] = language_features(prev_input, state, model.store, E, H, V);
        state = std::move(next);
        Tensor dist = multimodal_forward(f_i, fl, model);
        int best = -1;
        for (size_t w = 0; w < V; ++w) {
            if (w == Vocabulary::kBos || w == Vocabulary::kUnk) continue;
            if (static_cast<int>(w) == prev_emitted) continue;
            if (best < 0 || dist[w] > dist[static_cast<size_t>(best)]) best = static_cast<int>(w);
        }
        if (best == Vocabulary::kEos) break;
        out.push_back(model.vocab.word(static_cast<size_t>(best)));
        prev_emitted = best;
        prev_input = best;
    }
    return out;
}

TokenList generate_caption(const PairedExample& ex, const CaptionModel& model, size_t max_len) {
    return generate_caption(caption_input_features(ex), model, max_len);
}

} // namespace dcc
