#include "dcc/langmodel.h"

#include <numeric>
#include <stdexcept>

#include "dcc/rng.h"

namespace dcc {

LanguageModelParams init_language_model(const Vocabulary& vocab, size_t embed_dim, size_t hidden_dim,
                                        uint64_t seed) {
    if (embed_dim == 0 || hidden_dim == 0) {
        throw std::invalid_argument("init_language_model: dims must be positive");
    }
    LanguageModelParams params;
    params.vocab = vocab;
    params.embed_dim = embed_dim;
    params.hidden_dim = hidden_dim;
    const size_t V = vocab.size();
    Rng rng(seed);
    Tensor embed({V, embed_dim});
    fill_uniform(embed, rng, -0.08, 0.08);
    params.store.add("lm.embed", std::move(embed));
    nn::add_lstm_params(params.store, "lm.lstm.", embed_dim, hidden_dim, rng, 0.08, 1.0);
    Tensor pred_w({embed_dim + hidden_dim, V});
    fill_uniform(pred_w, rng, -0.08, 0.08);
    params.store.add("lm.pred.W", std::move(pred_w));
    params.store.add("lm.pred.b", Tensor({V}));
    return params;
}

std::pair<Tensor, LstmState> lstm_step(const Tensor& x, const LstmState& state,
                                       const LanguageModelParams& params) {
    auto cache = nn::lstm_forward(params.store, "lm.lstm.", x, state.h, state.c);
    return {cache.h, LstmState{cache.h, cache.c}};
}

std::pair<Tensor, LstmState> language_features(int prev_word, const LstmState& state,
                                               const ParamStore& store, size_t embed_dim,
                                               size_t hidden_dim, size_t vocab_size) {
    if (prev_word < 0 || static_cast<size_t>(prev_word) >= vocab_size) {
        throw std::invalid_argument("language_features: word index " + std::to_string(prev_word) +
                                    " out of range");
    }
    const size_t E = embed_dim, H = hidden_dim;
    Tensor x({E});
    const Tensor& embed = store.at("lm.embed");
    const float* row = embed.data.data() + static_cast<size_t>(prev_word) * E;
    for (size_t i = 0; i < E; ++i) x[i] = row[i];
    auto cache = nn::lstm_forward(store, "lm.lstm.", x, state.h, state.c);
    Tensor fl({E + H});
    for (size_t i = 0; i < E; ++i) fl[i] = x[i];
    for (size_t i = 0; i < H; ++i) fl[E + i] = cache.h[i];
    return {std::move(fl), LstmState{cache.h, cache.c}};
}

std::pair<Tensor, LstmState> language_features(int prev_word, const LstmState& state,
                                               const LanguageModelParams& params) {
    return language_features(prev_word, state, params.store, params.embed_dim, params.hidden_dim,
                             params.vocab.size());
}

Tensor lm_next_distribution(const Tensor& features, const LanguageModelParams& params) {
    if (features.numel() != params.embed_dim + params.hidden_dim) {
        throw_shape_error("lm_next_distribution", features.shape, {params.embed_dim + params.hidden_dim});
    }
    return nn::softmax(nn::affine(features, params.store.at("lm.pred.W"), params.store.at("lm.pred.b")));
}

namespace {

std::vector<int> to_sequence(const TokenList& sentence, const Vocabulary& vocab) {
    std::vector<int> seq;
    seq.reserve(sentence.size() + 2);
    seq.push_back(Vocabulary::kBos);
    for (const auto& tok : sentence) seq.push_back(vocab.index_or_unk(tok));
    seq.push_back(Vocabulary::kEos);
    return seq;
}

} // namespace

LanguageModelParams train_language_model(const std::vector<TokenList>& sentences, const Vocabulary& vocab,
                                         const LmTrainConfig& cfg, std::vector<double>* epoch_losses) {
    if (sentences.empty()) throw std::invalid_argument("train_language_model: empty corpus");
    LanguageModelParams params = init_language_model(vocab, cfg.embed_dim, cfg.hidden_dim, cfg.seed);

    std::vector<std::vector<int>> seqs;
    seqs.reserve(sentences.size());
    for (const auto& s : sentences) seqs.push_back(to_sequence(s, vocab));

    Rng rng(cfg.seed + 0x5eed);
    std::vector<size_t> order(seqs.size());
    std::iota(order.begin(), order.end(), 0);
    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (size_t idx : order) {
            NamedTensors<float> grads;
            epoch_loss += sequence_xent(params.store, cfg.embed_dim, cfg.hidden_dim, seqs[idx], &grads);
            sgd_step(params.store, grads, cfg.lr, cfg.clip);
        }
        if (epoch_losses) epoch_losses->push_back(epoch_loss / static_cast<double>(seqs.size()));
    }
    return params;
}

double lm_perplexity(const LanguageModelParams& params, const std::vector<TokenList>& sentences) {
    double total = 0.0;
    size_t tokens = 0;
    for (const auto& s : sentences) {
        std::vector<int> seq = to_sequence(s, params.vocab);
        total += sequence_xent(params.store, params.embed_dim, params.hidden_dim, seq) *
                 static_cast<double>(seq.size() - 1);
        tokens += seq.size() - 1;
    }
    if (tokens == 0) throw std::invalid_argument("lm_perplexity: empty corpus");
    return std::exp(total / static_cast<double>(tokens));
}

} // namespace dcc
