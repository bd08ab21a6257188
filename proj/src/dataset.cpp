#include "dcc/dataset.h"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace dcc {

using nlohmann::json;

std::vector<float> derive_concept_labels(const PairedExample& example, const ConceptSet& concepts) {
    std::vector<float> labels(concepts.size(), 0.0f);
    for (const auto& caption : example.captions) {
        for (const auto& tok : caption) {
            int row = concepts.row_of(tok);
            if (row >= 0) labels[static_cast<size_t>(row)] = 1.0f;
        }
    }
    return labels;
}

std::pair<std::vector<PairedExample>, std::vector<PairedExample>>
build_heldout_split(const std::vector<PairedExample>& paired, const std::vector<std::string>& heldout) {
    if (heldout.empty()) throw std::invalid_argument("build_heldout_split: held-out word list is empty");
    auto mentions_heldout = [&](const PairedExample& ex) {
        for (const auto& caption : ex.captions) {
            for (const auto& tok : caption) {
                for (const auto& w : heldout) {
                    if (tok == w) return true;
                }
            }
        }
        return false;
    };
    std::vector<PairedExample> kept, removed;
    for (const auto& ex : paired) {
        (mentions_heldout(ex) ? removed : kept).push_back(ex);
    }
    return {std::move(kept), std::move(removed)};
}

namespace {

std::string join_tokens(const TokenList& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

json features_to_json(const Tensor& features, const std::vector<Tensor>& frames) {
    if (!frames.empty()) {
        json arr = json::array();
        for (const auto& f : frames) arr.push_back(f.data);
        return arr;
    }
    return json(features.data);
}

void features_from_json(const json& obj, Tensor& features, std::vector<Tensor>& frames) {
    if (obj.contains("frames")) {
        for (const auto& fr : obj.at("frames")) {
            std::vector<float> vals = fr.get<std::vector<float>>();
            const size_t n = vals.size();
            frames.emplace_back(std::vector<size_t>{n}, std::move(vals));
        }
        if (frames.empty()) throw std::invalid_argument("empty frame list");
        for (const auto& fr : frames) {
            if (fr.numel() != frames[0].numel()) {
                throw std::invalid_argument("ragged frame lengths");
            }
        }
    } else if (obj.contains("features")) {
        std::vector<float> vals = obj.at("features").get<std::vector<float>>();
        const size_t n = vals.size();
        features = Tensor({n}, std::move(vals));
    } else {
        throw std::invalid_argument("expected 'features' or 'frames'");
    }
}

size_t feature_len(const Tensor& features, const std::vector<Tensor>& frames) {
    return frames.empty() ? features.numel() : frames[0].numel();
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

json parse_line(const std::string& line, const std::string& path, size_t lineno) {
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed JSON line");
    }
    return obj;
}

} // namespace

std::vector<PairedExample> load_paired(const std::string& path) {
    auto in = open_in(path);
    std::vector<PairedExample> out;
    std::string line;
    size_t lineno = 0;
    size_t expected_len = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        json obj = parse_line(line, path, lineno);
        try {
            PairedExample ex;
            ex.id = obj.at("id").get<std::string>();
            features_from_json(obj, ex.features, ex.frames);
            for (const auto& c : obj.at("captions")) ex.captions.push_back(tokenize(c.get<std::string>()));
            if (ex.captions.empty()) throw std::invalid_argument("at least one caption required");
            size_t len = feature_len(ex.features, ex.frames);
            if (expected_len == 0) expected_len = len;
            if (len != expected_len) throw std::invalid_argument("inconsistent feature length");
            out.push_back(std::move(ex));
        } catch (const json::exception& e) {
            throw std::runtime_error(where + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
    }
    return out;
}

void save_paired(const std::vector<PairedExample>& examples, const std::string& path) {
    auto out = open_out(path);
    for (const auto& ex : examples) {
        json obj;
        obj["id"] = ex.id;
        if (ex.is_video()) {
            obj["frames"] = features_to_json(ex.features, ex.frames);
        } else {
            obj["features"] = features_to_json(ex.features, ex.frames);
        }
        json caps = json::array();
        for (const auto& c : ex.captions) caps.push_back(join_tokens(c));
        obj["captions"] = caps;
        out << obj.dump() << "\n";
    }
}

std::vector<UnpairedImageExample> load_unpaired_images(const std::string& path) {
    auto in = open_in(path);
    std::vector<UnpairedImageExample> out;
    std::string line;
    size_t lineno = 0;
    size_t expected_len = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        json obj = parse_line(line, path, lineno);
        try {
            UnpairedImageExample ex;
            ex.id = obj.at("id").get<std::string>();
            features_from_json(obj, ex.features, ex.frames);
            ex.labels = obj.at("labels").get<std::vector<std::string>>();
            size_t len = feature_len(ex.features, ex.frames);
            if (expected_len == 0) expected_len = len;
            if (len != expected_len) throw std::invalid_argument("inconsistent feature length");
            out.push_back(std::move(ex));
        } catch (const json::exception& e) {
            throw std::runtime_error(where + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
    }
    return out;
}

void save_unpaired_images(const std::vector<UnpairedImageExample>& examples, const std::string& path) {
    auto out = open_out(path);
    for (const auto& ex : examples) {
        json obj;
        obj["id"] = ex.id;
        if (ex.is_video()) {
            obj["frames"] = features_to_json(ex.features, ex.frames);
        } else {
            obj["features"] = features_to_json(ex.features, ex.frames);
        }
        obj["labels"] = ex.labels;
        out << obj.dump() << "\n";
    }
}

std::vector<std::string> load_text_lines(const std::string& path) {
    auto in = open_in(path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

void save_text_lines(const std::vector<std::string>& lines, const std::string& path) {
    auto out = open_out(path);
    for (const auto& l : lines) out << l << "\n";
}

ConceptSet load_concepts(const std::string& path) {
    auto in = open_in(path);
    json obj;
    in >> obj;
    return ConceptSet::from_json(obj);
}

void save_concepts(const ConceptSet& concepts, const std::string& path) {
    auto out = open_out(path);
    out << concepts.to_json().dump(2) << "\n";
}

void save_captions(const std::vector<std::string>& ids, const std::vector<TokenList>& captions,
                   const std::string& path) {
    if (ids.size() != captions.size()) {
        throw std::invalid_argument("save_captions: " + std::to_string(ids.size()) + " ids vs " +
                                    std::to_string(captions.size()) + " captions");
    }
    auto out = open_out(path);
    for (size_t i = 0; i < ids.size(); ++i) {
        out << json{{"id", ids[i]}, {"tokens", captions[i]}}.dump() << "\n";
    }
}

std::vector<TokenList> load_captions(const std::string& path) {
    auto in = open_in(path);
    std::vector<TokenList> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json obj = parse_line(line, path, lineno);
        out.push_back(obj.at("tokens").get<TokenList>());
    }
    return out;
}

std::vector<float> labels_to_vector(const std::vector<std::string>& labels, const ConceptSet& concepts) {
    std::vector<float> out(concepts.size(), 0.0f);
    for (const auto& label : labels) {
        int row = concepts.row_of(label);
        if (row < 0) throw std::invalid_argument("label '" + label + "' is not in the concept set");
        out[static_cast<size_t>(row)] = 1.0f;
    }
    return out;
}

} // namespace dcc
