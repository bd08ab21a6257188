#include "dcc/eval.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace dcc {

using nlohmann::json;

namespace {

bool mentions(const TokenList& tokens, const std::string& word) {
    return std::find(tokens.begin(), tokens.end(), word) != tokens.end();
}

bool any_mentions(const std::vector<TokenList>& captions, const std::string& word) {
    for (const auto& c : captions) {
        if (mentions(c, word)) return true;
    }
    return false;
}

} // namespace

WordF1 f1_novel_word(const std::string& word, const std::vector<TokenList>& generated,
                     const std::vector<std::vector<TokenList>>& references) {
    if (generated.size() != references.size()) {
        throw std::invalid_argument("f1_novel_word: " + std::to_string(generated.size()) +
                                    " hypotheses vs " + std::to_string(references.size()) + " reference sets");
    }
    WordF1 out;
    for (size_t i = 0; i < generated.size(); ++i) {
        const bool gen_pos = mentions(generated[i], word);
        const bool ref_pos = any_mentions(references[i], word);
        if (gen_pos && ref_pos) ++out.tp;
        else if (gen_pos) ++out.fp;
        else if (ref_pos) ++out.fn;
    }
    out.precision = out.tp + out.fp > 0 ? static_cast<double>(out.tp) / (out.tp + out.fp) : 0.0;
    out.recall = out.tp + out.fn > 0 ? static_cast<double>(out.tp) / (out.tp + out.fn) : 0.0;
    out.f1 = out.tp > 0 ? 2.0 * out.precision * out.recall / (out.precision + out.recall) : 0.0;
    return out;
}

double bleu1(const std::vector<TokenList>& hypotheses, const std::vector<std::vector<TokenList>>& references) {
    if (hypotheses.empty()) throw std::invalid_argument("bleu1: empty hypothesis corpus");
    if (hypotheses.size() != references.size()) {
        throw std::invalid_argument("bleu1: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                                    std::to_string(references.size()) + " reference sets");
    }
    double matched = 0.0;
    size_t hyp_len = 0, ref_len = 0;
    for (size_t i = 0; i < hypotheses.size(); ++i) {
        const auto& hyp = hypotheses[i];
        const auto& refs = references[i];
        if (refs.empty()) throw std::invalid_argument("bleu1: empty reference set at example " + std::to_string(i));

        std::map<std::string, size_t> hyp_counts, max_ref_counts;
        for (const auto& tok : hyp) ++hyp_counts[tok];
        for (const auto& ref : refs) {
            std::map<std::string, size_t> counts;
            for (const auto& tok : ref) ++counts[tok];
            for (const auto& [tok, n] : counts) max_ref_counts[tok] = std::max(max_ref_counts[tok], n);
        }
        for (const auto& [tok, n] : hyp_counts) {
            auto it = max_ref_counts.find(tok);
            if (it != max_ref_counts.end()) matched += static_cast<double>(std::min(n, it->second));
        }
        hyp_len += hyp.size();

        size_t closest = refs[0].size();
        for (const auto& ref : refs) {
            const size_t d_new = ref.size() > hyp.size() ? ref.size() - hyp.size() : hyp.size() - ref.size();
            const size_t d_old = closest > hyp.size() ? closest - hyp.size() : hyp.size() - closest;
            if (d_new < d_old || (d_new == d_old && ref.size() < closest)) closest = ref.size();
        }
        ref_len += closest;
    }
    if (hyp_len == 0) return 0.0;
    const double precision = matched / static_cast<double>(hyp_len);
    const double bp = hyp_len >= ref_len
                          ? 1.0
                          : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
    return precision * bp;
}

json EvalReport::to_json() const {
    json words = json::object();
    for (const auto& [word, f] : per_word) {
        words[word] = {{"tp", f.tp},           {"fp", f.fp},         {"fn", f.fn},
                       {"precision", f.precision}, {"recall", f.recall}, {"f1", f.f1}};
    }
    return json{{"per_word", words}, {"avg_f1", avg_f1}, {"bleu1", bleu1}, {"config", config}};
}

EvalReport EvalReport::from_json(const json& j) {
    EvalReport r;
    for (auto it = j.at("per_word").begin(); it != j.at("per_word").end(); ++it) {
        WordF1 f;
        f.tp = it.value().at("tp").get<long>();
        f.fp = it.value().at("fp").get<long>();
        f.fn = it.value().at("fn").get<long>();
        f.precision = it.value().at("precision").get<double>();
        f.recall = it.value().at("recall").get<double>();
        f.f1 = it.value().at("f1").get<double>();
        r.per_word[it.key()] = f;
    }
    r.avg_f1 = j.at("avg_f1").get<double>();
    r.bleu1 = j.at("bleu1").get<double>();
    r.config = j.value("config", json::object());
    return r;
}

EvalReport evaluate_captions(const std::vector<TokenList>& generated,
                             const std::vector<PairedExample>& test,
                             const std::vector<std::string>& novel_words, json config_echo) {
    if (generated.size() != test.size()) {
        throw std::invalid_argument("evaluate: " + std::to_string(generated.size()) + " hypotheses vs " +
                                    std::to_string(test.size()) + " test examples (aligned lengths required)");
    }
    std::vector<std::vector<TokenList>> references;
    references.reserve(test.size());
    for (const auto& ex : test) references.push_back(ex.captions);

    EvalReport report;
    report.config = std::move(config_echo);
    double sum = 0.0;
    for (const auto& word : novel_words) {
        WordF1 f = f1_novel_word(word, generated, references);
        sum += f.f1;
        report.per_word[word] = f;
    }
    report.avg_f1 = novel_words.empty() ? 0.0 : sum / static_cast<double>(novel_words.size());
    report.bleu1 = bleu1(generated, references);
    return report;
}

EvalReport evaluate_run(const CaptionModel& model, const std::vector<PairedExample>& test,
                        const std::vector<std::string>& novel_words, size_t max_len, json config_echo,
                        std::vector<TokenList>* generated_out) {
    if (test.empty()) throw std::invalid_argument("evaluate: empty test set");
    std::vector<TokenList> generated;
    generated.reserve(test.size());
    for (const auto& ex : test) {
        try {
            generated.push_back(generate_caption(ex, model, max_len));
        } catch (const std::exception& e) {
            throw std::runtime_error("evaluate: example '" + ex.id + "': " + e.what());
        }
    }
    if (generated_out) *generated_out = generated;
    return evaluate_captions(generated, test, novel_words, std::move(config_echo));
}

} // namespace dcc
