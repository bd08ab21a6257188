#include "dcc/text.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

#include "dcc/log.h"

namespace dcc {

TokenList tokenize(const std::string& text) {
    TokenList tokens;
    std::string cur;
    for (unsigned char ch : text) {
        if (std::isspace(ch)) {
            if (!cur.empty()) {
                tokens.push_back(cur);
                cur.clear();
            }
        } else if (std::ispunct(ch)) {
            // stripped
        } else {
            cur.push_back(static_cast<char>(std::tolower(ch)));
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> words = {
        "a",  "an",   "the",  "in",   "on",  "of",   "is",   "are", "was",  "were", "at",
        "to", "with", "and",  "or",   "it",  "its",  "this", "that", "there", "be",  "by",
        "as", "from", "for",  "near", "over", "under", "some", "has",  "have"};
    return words;
}

Vocabulary build_vocab(const std::vector<TokenList>& sentences, size_t min_count) {
    if (min_count < 1) throw std::invalid_argument("build_vocab: min_count must be >= 1");
    std::map<std::string, size_t> counts;
    for (const auto& sent : sentences) {
        for (const auto& tok : sent) ++counts[tok];
    }
    std::vector<std::pair<std::string, size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    Vocabulary vocab;
    for (const auto& [word, count] : ranked) {
        if (count >= min_count) vocab.add(word);
    }
    return vocab;
}

ConceptSet mine_concepts(const std::vector<TokenList>& sentences, size_t top_k,
                         const std::set<std::string>& stopwords, const std::vector<std::string>& extra) {
    if (top_k < 1) throw std::invalid_argument("mine_concepts: top_k must be >= 1");
    std::map<std::string, size_t> counts;
    for (const auto& sent : sentences) {
        for (const auto& tok : sent) {
            if (!stopwords.count(tok)) ++counts[tok];
        }
    }
    std::vector<std::pair<std::string, size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() < top_k) {
        log_warn("mine_concepts: only " + std::to_string(ranked.size()) + " candidates for top_k=" +
                 std::to_string(top_k));
    }
    auto in_extra = [&](const std::string& w) {
        return std::find(extra.begin(), extra.end(), w) != extra.end();
    };
    ConceptSet cs;
    for (size_t i = 0; i < ranked.size() && i < top_k; ++i) {
        cs.add(ranked[i].first, in_extra(ranked[i].first));
    }
    for (const auto& w : extra) {
        if (!cs.contains(w)) cs.add(w, true);
    }
    return cs;
}

} // namespace dcc
