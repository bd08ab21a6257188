#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "dcc/tensor.h"
#include "dcc/text.h"
#include "dcc/vocab.h"

namespace dcc {

/// Word embeddings used for transfer-pair similarity.
struct EmbeddingTable {
    Vocabulary vocab;
    size_t dim = 0;
    Tensor matrix; // V x D

    std::vector<float> row(size_t index) const;
    std::vector<float> row(const std::string& word) const; // throws when absent
};

struct CbowConfig {
    size_t dim = 32;
    size_t window = 2;
    size_t epochs = 12;
    float lr = 0.05f;
    uint64_t seed = 1;
};

struct CbowStats {
    double initial_loss = 0.0; // mean softmax cross-entropy before any update
    double final_loss = 0.0;   // same objective after training
    std::vector<double> epoch_losses;
};

/// Continuous bag-of-words training with a full softmax over the vocabulary:
/// at each position the context embeddings (up to `window` each side) are
/// averaged and trained to predict the center word. Deterministic given seed.
EmbeddingTable train_cbow(const std::vector<TokenList>& sentences, const Vocabulary& vocab,
                          const CbowConfig& cfg, CbowStats* stats = nullptr);

/// u.v / (|u||v|); a zero vector yields 0 with a warning.
float cosine_similarity(const std::vector<float>& u, const std::vector<float>& v);

/// Candidates ranked by descending cosine similarity to `target`, ties broken
/// alphabetically; returns min(n, |candidates|) entries.
std::vector<std::pair<std::string, float>>
nearest_transfer_sources(const std::string& target, const EmbeddingTable& table,
                         const std::set<std::string>& candidates, size_t n);

void save_embeddings_tsv(const EmbeddingTable& table, const std::string& path);
EmbeddingTable load_embeddings_tsv(const std::string& path);

} // namespace dcc
