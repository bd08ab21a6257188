#pragma once

#include <set>
#include <string>
#include <vector>

#include "dcc/vocab.h"

namespace dcc {

using TokenList = std::vector<std::string>;

/// Lowercase, strip punctuation, split on whitespace.
TokenList tokenize(const std::string& text);

/// Default stopword list used by concept mining (function words only).
const std::set<std::string>& default_stopwords();

/// Reserved tokens first, then every word with count >= min_count ordered by
/// (count desc, word asc).
Vocabulary build_vocab(const std::vector<TokenList>& sentences, size_t min_count);

/// Top-k most frequent non-stopwords, then `extra` words appended in input
/// order and flagged novel. Warns when fewer than top_k candidates exist.
ConceptSet mine_concepts(const std::vector<TokenList>& sentences, size_t top_k,
                         const std::set<std::string>& stopwords, const std::vector<std::string>& extra);

} // namespace dcc
