#pragma once

#include <set>
#include <string>
#include <vector>

#include "dcc/caption.h"
#include "dcc/embeddings.h"

namespace dcc {

enum class TransferMethod { kDirect, kDelta };

std::string transfer_method_name(TransferMethod method);
TransferMethod transfer_method_from_name(const std::string& name);

struct TransferSource {
    std::string word;
    float similarity = 0.0f;
};

/// One novel word with its ranked transfer sources (best first).
struct TransferEntry {
    std::string target;
    std::vector<TransferSource> sources;
};

struct TransferPlan {
    TransferMethod method = TransferMethod::kDirect;
    size_t n = 1;
    std::vector<TransferEntry> entries;

    nlohmann::json to_json() const;
    static TransferPlan from_json(const nlohmann::json& j);
};

void save_transfer_plan(const TransferPlan& plan, const std::string& path);
TransferPlan load_transfer_plan(const std::string& path);

/// Ranks, per novel word, the top-n transfer sources among words that are in
/// the paired-caption vocabulary and are non-novel concepts, by cosine
/// similarity with alphabetical tie-breaks. Rejects novel words that leak
/// into paired captions or lack an embedding.
TransferPlan build_transfer_plan(const std::vector<std::string>& novel_words, const EmbeddingTable& table,
                                 const Vocabulary& vocab, const ConceptSet& concepts,
                                 const std::set<std::string>& paired_words, TransferMethod method, size_t n);

/// Copies the source word's learned columns onto the novel word and rewires
/// the classifier coupling. Per pair, in order:
///   (1) W_L[:,v_a] = W_L[:,v_s]
///   (2) b[v_a] = b[v_s]
///   (3) W_I[:,v_a] = W_I[:,v_s]
///   (4) W_I[r_a,v_a] = W_I[r_s,v_s]
///   (5) W_I[r_s,v_a] = 0 and W_I[r_a,v_s] = 0
/// No other entries change. Input params are not mutated. Requires n == 1.
CaptionModel direct_transfer(const CaptionModel& model, const TransferPlan& plan);

/// Transfers how W_L changed during caption training instead of its value:
///   delta = mean over the entry's sources of (W_L[:,v_s] - WL_language[:,v_s])
///   W_L[:,v_a] = WL_language[:,v_a] + delta
/// b and W_I are edited with the direct rules using the single nearest
/// source. The language snapshot is never mutated.
CaptionModel delta_transfer(const CaptionModel& model, const TransferPlan& plan);

} // namespace dcc
