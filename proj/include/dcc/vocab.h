#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace dcc {

/// Word/index bijection with BOS, EOS, UNK pinned at indices 0, 1, 2.
class Vocabulary {
  public:
    static constexpr int kBos = 0;
    static constexpr int kEos = 1;
    static constexpr int kUnk = 2;
    static constexpr const char* kBosWord = "<bos>";
    static constexpr const char* kEosWord = "<eos>";
    static constexpr const char* kUnkWord = "<unk>";

    Vocabulary();

    /// Appends a word; returns its index (existing index if already present).
    int add(const std::string& word);

    /// Index of word, or -1 when absent.
    int lookup(const std::string& word) const;

    /// Index of word, or kUnk when absent.
    int index_or_unk(const std::string& word) const;

    bool contains(const std::string& word) const { return lookup(word) >= 0; }

    const std::string& word(size_t index) const;
    size_t size() const { return words_.size(); }
    const std::vector<std::string>& words() const { return words_; }

    nlohmann::json to_json() const;
    static Vocabulary from_json(const nlohmann::json& j);

  private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, int> index_;
};

/// Ordered concept words mapped onto classifier rows 0..C-1, with a
/// paired/novel flag per concept.
class ConceptSet {
  public:
    ConceptSet() = default;

    int add(const std::string& word, bool novel);

    int row_of(const std::string& word) const; // -1 when absent
    bool contains(const std::string& word) const { return row_of(word) >= 0; }
    bool is_novel(size_t row) const { return novel_[row]; }
    bool is_novel(const std::string& word) const;

    const std::string& word(size_t row) const { return words_[row]; }
    size_t size() const { return words_.size(); }
    const std::vector<std::string>& words() const { return words_; }
    std::vector<std::string> novel_words() const;

    nlohmann::json to_json() const;
    static ConceptSet from_json(const nlohmann::json& j);

  private:
    std::vector<std::string> words_;
    std::vector<bool> novel_;
    std::unordered_map<std::string, int> row_;
};

} // namespace dcc
