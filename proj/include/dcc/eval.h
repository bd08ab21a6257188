#pragma once

#include <map>
#include <string>
#include <vector>

#include "dcc/caption.h"
#include "dcc/dataset.h"

namespace dcc {

struct WordF1 {
    long tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

/// Presence-based confusion counts for one novel word: a generated caption is
/// positive iff it mentions the word; an example's references are positive
/// iff any reference mentions it. F1 is 0 when TP is 0.
WordF1 f1_novel_word(const std::string& word, const std::vector<TokenList>& generated,
                     const std::vector<std::vector<TokenList>>& references);

/// Corpus-level modified unigram precision times the brevity penalty
/// exp(min(0, 1 - r/c)), with r summed from the closest reference length per
/// example (ties toward the shorter reference).
double bleu1(const std::vector<TokenList>& hypotheses, const std::vector<std::vector<TokenList>>& references);

struct EvalReport {
    std::map<std::string, WordF1> per_word;
    double avg_f1 = 0.0; // unweighted mean over novel words
    double bleu1 = 0.0;
    nlohmann::json config;

    nlohmann::json to_json() const;
    static EvalReport from_json(const nlohmann::json& j);
};

/// Scores pre-generated captions against the test references.
EvalReport evaluate_captions(const std::vector<TokenList>& generated,
                             const std::vector<PairedExample>& test,
                             const std::vector<std::string>& novel_words, nlohmann::json config_echo);

/// Greedy-generates a caption per test example, then scores.
EvalReport evaluate_run(const CaptionModel& model, const std::vector<PairedExample>& test,
                        const std::vector<std::string>& novel_words, size_t max_len,
                        nlohmann::json config_echo, std::vector<TokenList>* generated_out = nullptr);

} // namespace dcc
