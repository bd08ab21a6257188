#include "dcc/vocab.h"

#include <stdexcept>

namespace dcc {

Vocabulary::Vocabulary() {
    add(kBosWord);
    add(kEosWord);
    add(kUnkWord);
}

int Vocabulary::add(const std::string& word) {
    auto it = index_.find(word);
    if (it != index_.end()) return it->second;
    int idx = static_cast<int>(words_.size());
    words_.push_back(word);
    index_.emplace(word, idx);
    return idx;
}

int Vocabulary::lookup(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? -1 : it->second;
}

int Vocabulary::index_or_unk(const std::string& word) const {
    int idx = lookup(word);
    return idx < 0 ? kUnk : idx;
}

const std::string& Vocabulary::word(size_t index) const {
    if (index >= words_.size()) throw std::out_of_range("vocabulary: index " + std::to_string(index));
    return words_[index];
}

nlohmann::json Vocabulary::to_json() const {
    return nlohmann::json{{"words", words_}};
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
    Vocabulary v;
    const auto& words = j.at("words");
    if (words.size() < 3 || words[0] != kBosWord || words[1] != kEosWord || words[2] != kUnkWord) {
        throw std::invalid_argument("vocabulary: reserved tokens missing or out of place");
    }
    for (size_t i = 3; i < words.size(); ++i) v.add(words[i].get<std::string>());
    return v;
}

int ConceptSet::add(const std::string& word, bool novel) {
    if (row_.count(word)) throw std::invalid_argument("concept set: duplicate concept '" + word + "'");
    int row = static_cast<int>(words_.size());
    words_.push_back(word);
    novel_.push_back(novel);
    row_.emplace(word, row);
    return row;
}

int ConceptSet::row_of(const std::string& word) const {
    auto it = row_.find(word);
    return it == row_.end() ? -1 : it->second;
}

bool ConceptSet::is_novel(const std::string& word) const {
    int r = row_of(word);
    if (r < 0) throw std::invalid_argument("concept set: unknown concept '" + word + "'");
    return novel_[r];
}

std::vector<std::string> ConceptSet::novel_words() const {
    std::vector<std::string> out;
    for (size_t i = 0; i < words_.size(); ++i) {
        if (novel_[i]) out.push_back(words_[i]);
    }
    return out;
}

nlohmann::json ConceptSet::to_json() const {
    return nlohmann::json{{"concepts", words_}, {"novel", novel_words()}};
}

ConceptSet ConceptSet::from_json(const nlohmann::json& j) {
    ConceptSet cs;
    std::vector<std::string> novel = j.value("novel", std::vector<std::string>{});
    auto is_novel = [&](const std::string& w) {
        for (const auto& n : novel) {
            if (n == w) return true;
        }
        return false;
    };
    for (const auto& w : j.at("concepts")) {
        std::string word = w.get<std::string>();
        cs.add(word, is_novel(word));
    }
    return cs;
}

} // namespace dcc
