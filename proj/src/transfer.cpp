#include "dcc/transfer.h"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace dcc {

using nlohmann::json;

std::string transfer_method_name(TransferMethod method) {
    return method == TransferMethod::kDirect ? "direct" : "delta";
}

TransferMethod transfer_method_from_name(const std::string& name) {
    if (name == "direct") return TransferMethod::kDirect;
    if (name == "delta") return TransferMethod::kDelta;
    throw std::invalid_argument("unknown transfer method '" + name + "'");
}

json TransferPlan::to_json() const {
    json pairs = json::array();
    for (const auto& e : entries) {
        json sources = json::array();
        for (const auto& s : e.sources) sources.push_back({{"word", s.word}, {"similarity", s.similarity}});
        pairs.push_back({{"target", e.target}, {"sources", sources}});
    }
    return json{{"method", transfer_method_name(method)}, {"n", n}, {"pairs", pairs}};
}

TransferPlan TransferPlan::from_json(const json& j) {
    TransferPlan plan;
    plan.method = transfer_method_from_name(j.at("method").get<std::string>());
    plan.n = j.at("n").get<size_t>();
    for (const auto& p : j.at("pairs")) {
        TransferEntry e;
        e.target = p.at("target").get<std::string>();
        for (const auto& s : p.at("sources")) {
            e.sources.push_back({s.at("word").get<std::string>(), s.value("similarity", 0.0f)});
        }
        plan.entries.push_back(std::move(e));
    }
    return plan;
}

void save_transfer_plan(const TransferPlan& plan, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << plan.to_json().dump(2) << "\n";
}

TransferPlan load_transfer_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return TransferPlan::from_json(j);
}

TransferPlan build_transfer_plan(const std::vector<std::string>& novel_words, const EmbeddingTable& table,
                                 const Vocabulary& vocab, const ConceptSet& concepts,
                                 const std::set<std::string>& paired_words, TransferMethod method, size_t n) {
    if (n < 1) throw std::invalid_argument("build_transfer_plan: n must be >= 1");
    if (novel_words.empty()) throw std::invalid_argument("build_transfer_plan: no novel words");

    std::set<std::string> candidates;
    for (const auto& w : concepts.words()) {
        if (!concepts.is_novel(w) && vocab.contains(w) && paired_words.count(w) &&
            table.vocab.contains(w)) {
            candidates.insert(w);
        }
    }
    if (candidates.empty()) throw std::invalid_argument("build_transfer_plan: no transfer source available");

    TransferPlan plan;
    plan.method = method;
    plan.n = n;
    for (const auto& target : novel_words) {
        if (!vocab.contains(target)) {
            throw std::invalid_argument("build_transfer_plan: novel word '" + target + "' not in vocabulary");
        }
        if (!concepts.contains(target) || !concepts.is_novel(target)) {
            throw std::invalid_argument("build_transfer_plan: '" + target + "' is not a novel concept");
        }
        if (paired_words.count(target)) {
            throw std::invalid_argument("build_transfer_plan: novel word '" + target +
                                        "' appears in paired captions");
        }
        if (!table.vocab.contains(target)) {
            throw std::invalid_argument("build_transfer_plan: no language grounding for '" + target +
                                        "' - retrain embeddings");
        }
        TransferEntry entry;
        entry.target = target;
        for (auto& [word, sim] : nearest_transfer_sources(target, table, candidates, n)) {
            entry.sources.push_back({word, sim});
        }
        plan.entries.push_back(std::move(entry));
    }
    return plan;
}

namespace {

struct ResolvedPair {
    size_t v_s, v_a; // vocabulary columns
    size_t r_s, r_a; // concept rows
};

ResolvedPair resolve_pair(const CaptionModel& model, const std::string& source, const std::string& target) {
    int v_s = model.vocab.lookup(source);
    int v_a = model.vocab.lookup(target);
    int r_s = model.concepts.row_of(source);
    int r_a = model.concepts.row_of(target);
    if (v_s < 0 || v_a < 0) {
        throw std::invalid_argument("transfer: word '" + (v_s < 0 ? source : target) + "' not in vocabulary");
    }
    if (r_s < 0 || r_a < 0) {
        throw std::invalid_argument("transfer: word '" + (r_s < 0 ? source : target) + "' is not a concept");
    }
    if (model.concepts.is_novel(source)) {
        throw std::invalid_argument("transfer: source '" + source + "' is flagged novel");
    }
    if (!model.concepts.is_novel(target)) {
        throw std::invalid_argument("transfer: target '" + target + "' is not flagged novel");
    }
    if (v_s == v_a || r_s == r_a) {
        throw std::invalid_argument("transfer: source and target coincide for '" + target + "'");
    }
    return {static_cast<size_t>(v_s), static_cast<size_t>(v_a), static_cast<size_t>(r_s),
            static_cast<size_t>(r_a)};
}

void validate_plan(const TransferPlan& plan) {
    if (plan.entries.empty()) throw std::invalid_argument("transfer: empty plan");
    std::set<std::string> targets;
    for (const auto& e : plan.entries) {
        if (e.sources.empty()) throw std::invalid_argument("transfer: no source for '" + e.target + "'");
        if (!targets.insert(e.target).second) {
            throw std::invalid_argument("transfer: duplicate target '" + e.target + "'");
        }
    }
    // No chaining: a word may not be both a source and another pair's target.
    for (const auto& e : plan.entries) {
        for (const auto& s : e.sources) {
            if (targets.count(s.word)) {
                throw std::invalid_argument("transfer: source '" + s.word + "' is also a transfer target");
            }
        }
    }
}

// Rules (2)-(5): b and W_I coupling from a single source.
void apply_image_and_bias_rules(CaptionModel& model, const ResolvedPair& p) {
    Tensor& w_i = model.store.at("cap.WI");
    Tensor& b = model.store.at("cap.b");
    b[p.v_a] = b[p.v_s];
    for (size_t r = 0; r < w_i.rows(); ++r) w_i.at(r, p.v_a) = w_i.at(r, p.v_s);
    w_i.at(p.r_a, p.v_a) = w_i.at(p.r_s, p.v_s);
    w_i.at(p.r_s, p.v_a) = 0.0f;
    w_i.at(p.r_a, p.v_s) = 0.0f;
}

} // namespace

CaptionModel direct_transfer(const CaptionModel& model, const TransferPlan& plan) {
    if (plan.method != TransferMethod::kDirect) {
        throw std::invalid_argument("direct_transfer: plan method is " + transfer_method_name(plan.method));
    }
    if (plan.n != 1) throw std::invalid_argument("direct_transfer: unsupported n > 1");
    validate_plan(plan);
    for (const auto& e : plan.entries) {
        if (e.sources.size() != 1) throw std::invalid_argument("direct_transfer: unsupported multi-source entry");
    }

    CaptionModel out = model;
    Tensor& w_l = out.store.at("cap.WL");
    for (const auto& e : plan.entries) {
        ResolvedPair p = resolve_pair(out, e.sources[0].word, e.target);
        for (size_t r = 0; r < w_l.rows(); ++r) w_l.at(r, p.v_a) = w_l.at(r, p.v_s);
        apply_image_and_bias_rules(out, p);
    }
    return out;
}

CaptionModel delta_transfer(const CaptionModel& model, const TransferPlan& plan) {
    if (plan.method != TransferMethod::kDelta) {
        throw std::invalid_argument("delta_transfer: plan method is " + transfer_method_name(plan.method));
    }
    if (!model.store.has("cap.WL_language") || !model.store.has("cap.b_language")) {
        throw std::invalid_argument("delta_transfer: language-model snapshot required");
    }
    validate_plan(plan);

    CaptionModel out = model;
    Tensor& w_l = out.store.at("cap.WL");
    const Tensor& w_lang = out.store.at("cap.WL_language");
    const size_t rows = w_l.rows();
    for (const auto& e : plan.entries) {
        ResolvedPair nearest = resolve_pair(out, e.sources[0].word, e.target);

        // delta averaged over the entry's ranked sources (up to plan.n).
        std::vector<float> delta(rows, 0.0f);
        size_t used = std::min(e.sources.size(), plan.n);
        for (size_t k = 0; k < used; ++k) {
            ResolvedPair p = resolve_pair(out, e.sources[k].word, e.target);
            for (size_t r = 0; r < rows; ++r) delta[r] += w_l.at(r, p.v_s) - w_lang.at(r, p.v_s);
        }
        for (size_t r = 0; r < rows; ++r) {
            w_l.at(r, nearest.v_a) = w_lang.at(r, nearest.v_a) + delta[r] / static_cast<float>(used);
        }
        apply_image_and_bias_rules(out, nearest);
    }
    return out;
}

} // namespace dcc
