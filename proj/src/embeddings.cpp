#include "dcc/embeddings.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dcc/log.h"
#include "dcc/nn.h"
#include "dcc/rng.h"

namespace dcc {

std::vector<float> EmbeddingTable::row(size_t index) const {
    const float* start = matrix.data.data() + index * dim;
    return std::vector<float>(start, start + dim);
}

std::vector<float> EmbeddingTable::row(const std::string& word) const {
    int idx = vocab.lookup(word);
    if (idx < 0) throw std::invalid_argument("embedding table: unknown word '" + word + "'");
    return row(static_cast<size_t>(idx));
}

namespace {

struct CbowPosition {
    const TokenList* sentence;
    size_t center;
};

// Average of the context embeddings around `center`, up to `window` each side.
bool context_mean(const EmbeddingTable& table, const Vocabulary& vocab, const TokenList& sent,
                  size_t center, size_t window, Tensor& mean, std::vector<int>& ctx) {
    ctx.clear();
    size_t lo = center > window ? center - window : 0;
    size_t hi = std::min(sent.size(), center + window + 1);
    for (size_t j = lo; j < hi; ++j) {
        if (j != center) ctx.push_back(vocab.index_or_unk(sent[j]));
    }
    if (ctx.empty()) return false;
    std::fill(mean.data.begin(), mean.data.end(), 0.0f);
    for (int idx : ctx) {
        const float* row = table.matrix.data.data() + static_cast<size_t>(idx) * table.dim;
        for (size_t d = 0; d < table.dim; ++d) mean[d] += row[d];
    }
    for (auto& v : mean.data) v /= static_cast<float>(ctx.size());
    return true;
}

double corpus_loss(const std::vector<TokenList>& sentences, const Vocabulary& vocab,
                   const EmbeddingTable& table, size_t window, const Tensor& out_w, const Tensor& out_b) {
    double total = 0.0;
    size_t count = 0;
    Tensor mean({table.dim});
    std::vector<int> ctx;
    for (const auto& sent : sentences) {
        for (size_t t = 0; t < sent.size(); ++t) {
            if (!context_mean(table, vocab, sent, t, window, mean, ctx)) continue;
            auto lg = nn::softmax_cross_entropy(nn::affine(mean, out_w, out_b),
                                                static_cast<size_t>(vocab.index_or_unk(sent[t])));
            total += lg.loss;
            ++count;
        }
    }
    return count ? total / static_cast<double>(count) : 0.0;
}

} // namespace

EmbeddingTable train_cbow(const std::vector<TokenList>& sentences, const Vocabulary& vocab,
                          const CbowConfig& cfg, CbowStats* stats) {
    if (cfg.dim < 2) throw std::invalid_argument("train_cbow: dim must be >= 2");
    if (cfg.window < 1) throw std::invalid_argument("train_cbow: window must be >= 1");
    if (vocab.size() < 5) throw std::invalid_argument("train_cbow: vocabulary too small");

    const size_t V = vocab.size(), D = cfg.dim;
    EmbeddingTable table;
    table.vocab = vocab;
    table.dim = D;
    table.matrix = Tensor({V, D});
    Rng rng(cfg.seed);
    fill_uniform(table.matrix, rng, -0.5 / static_cast<double>(D), 0.5 / static_cast<double>(D));

    // word2vec-style output layer: zero-initialized softmax weights.
    Tensor out_w({D, V});
    Tensor out_b({V});

    if (stats) stats->initial_loss = corpus_loss(sentences, vocab, table, cfg.window, out_w, out_b);

    Tensor mean({D});
    std::vector<int> ctx;
    Tensor d_out_w({D, V}), d_out_b({V});
    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_loss = 0.0;
        size_t count = 0;
        for (const auto& sent : sentences) {
            for (size_t t = 0; t < sent.size(); ++t) {
                if (!context_mean(table, vocab, sent, t, cfg.window, mean, ctx)) continue;
                size_t target = static_cast<size_t>(vocab.index_or_unk(sent[t]));
                auto lg = nn::softmax_cross_entropy(nn::affine(mean, out_w, out_b), target);
                epoch_loss += lg.loss;
                ++count;
                std::fill(d_out_w.data.begin(), d_out_w.data.end(), 0.0f);
                std::fill(d_out_b.data.begin(), d_out_b.data.end(), 0.0f);
                Tensor d_mean = nn::affine_backward(mean, out_w, lg.dlogits, d_out_w, d_out_b);
                for (size_t i = 0; i < d_out_w.numel(); ++i) out_w[i] -= cfg.lr * d_out_w[i];
                for (size_t i = 0; i < d_out_b.numel(); ++i) out_b[i] -= cfg.lr * d_out_b[i];
                const float scale = cfg.lr / static_cast<float>(ctx.size());
                for (int idx : ctx) {
                    float* row = table.matrix.data.data() + static_cast<size_t>(idx) * D;
                    for (size_t d = 0; d < D; ++d) row[d] -= scale * d_mean[d];
                }
            }
        }
        if (stats) stats->epoch_losses.push_back(count ? epoch_loss / count : 0.0);
    }

    if (stats) stats->final_loss = corpus_loss(sentences, vocab, table, cfg.window, out_w, out_b);
    return table;
}

float cosine_similarity(const std::vector<float>& u, const std::vector<float>& v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("cosine_similarity: length mismatch " + std::to_string(u.size()) +
                                    " vs " + std::to_string(v.size()));
    }
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += static_cast<double>(u[i]) * v[i];
        nu += static_cast<double>(u[i]) * u[i];
        nv += static_cast<double>(v[i]) * v[i];
    }
    if (nu == 0.0 || nv == 0.0) {
        log_warn("cosine_similarity: zero vector, returning 0");
        return 0.0f;
    }
    return static_cast<float>(dot / (std::sqrt(nu) * std::sqrt(nv)));
}

std::vector<std::pair<std::string, float>>
nearest_transfer_sources(const std::string& target, const EmbeddingTable& table,
                         const std::set<std::string>& candidates, size_t n) {
    if (n < 1) throw std::invalid_argument("nearest_transfer_sources: n must be >= 1");
    if (candidates.empty()) throw std::invalid_argument("nearest_transfer_sources: no transfer source available");
    if (candidates.count(target)) {
        throw std::invalid_argument("nearest_transfer_sources: target '" + target + "' is a candidate");
    }
    std::vector<float> t = table.row(target);
    std::vector<std::pair<std::string, float>> ranked;
    for (const auto& w : candidates) ranked.emplace_back(w, cosine_similarity(t, table.row(w)));
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > n) ranked.resize(n);
    return ranked;
}

void save_embeddings_tsv(const EmbeddingTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    char buf[64];
    for (size_t i = 0; i < table.vocab.size(); ++i) {
        out << table.vocab.word(i);
        for (size_t d = 0; d < table.dim; ++d) {
            std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(table.matrix.at(i, d)));
            out << '\t' << buf;
        }
        out << '\n';
    }
}

EmbeddingTable load_embeddings_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::string> words;
    std::vector<std::vector<float>> rows;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string word;
        if (!std::getline(ss, word, '\t')) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed line");
        }
        std::vector<float> vals;
        std::string cell;
        while (std::getline(ss, cell, '\t')) vals.push_back(std::strtof(cell.c_str(), nullptr));
        if (vals.empty() || (!rows.empty() && vals.size() != rows[0].size())) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": inconsistent dimension");
        }
        words.push_back(word);
        rows.push_back(std::move(vals));
    }
    if (words.size() < 3) throw std::runtime_error(path + ": too few rows for a vocabulary");
    EmbeddingTable table;
    table.vocab = Vocabulary::from_json(nlohmann::json{{"words", words}});
    table.dim = rows[0].size();
    table.matrix = Tensor({words.size(), table.dim});
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t d = 0; d < table.dim; ++d) table.matrix.at(i, d) = rows[i][d];
    }
    return table;
}

} // namespace dcc
