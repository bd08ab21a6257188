#include "dcc/config.h"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace dcc {

using nlohmann::json;

json RunConfig::to_json() const {
    return json{
        {"seed", seed},
        {"data",
         {{"num_concepts", data.num_concepts},
          {"feature_dim", data.feature_dim},
          {"num_paired", data.num_paired},
          {"num_unpaired_images", data.num_unpaired_images},
          {"num_unpaired_text", data.num_unpaired_text},
          {"num_test", data.num_test},
          {"noise_stddev", data.noise_stddev},
          {"heldout", data.heldout},
          {"max_frames", data.max_frames}}},
        {"mine", {{"top_k", mine_top_k}}},
        {"embeddings",
         {{"dim", embeddings.dim}, {"window", embeddings.window}, {"epochs", embeddings.epochs}, {"lr", embeddings.lr}}},
        {"lexical", {{"hidden", lexical.hidden}, {"epochs", lexical.epochs}, {"lr", lexical.lr}}},
        {"langmodel",
         {{"embed_dim", langmodel.embed_dim},
          {"hidden_dim", langmodel.hidden_dim},
          {"epochs", langmodel.epochs},
          {"lr", langmodel.lr},
          {"clip", langmodel.clip}}},
        {"caption", {{"epochs", caption.epochs}, {"lr", caption.lr}, {"clip", caption.clip}}},
        {"transfer", {{"n", transfer_n}}},
        {"generate", {{"max_len", max_len}}},
    };
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("data")) {
        const json& d = j.at("data");
        cfg.data.num_concepts = d.value("num_concepts", cfg.data.num_concepts);
        cfg.data.feature_dim = d.value("feature_dim", cfg.data.feature_dim);
        cfg.data.num_paired = d.value("num_paired", cfg.data.num_paired);
        cfg.data.num_unpaired_images = d.value("num_unpaired_images", cfg.data.num_unpaired_images);
        cfg.data.num_unpaired_text = d.value("num_unpaired_text", cfg.data.num_unpaired_text);
        cfg.data.num_test = d.value("num_test", cfg.data.num_test);
        cfg.data.noise_stddev = d.value("noise_stddev", cfg.data.noise_stddev);
        cfg.data.heldout = d.value("heldout", cfg.data.heldout);
        cfg.data.max_frames = d.value("max_frames", cfg.data.max_frames);
    }
    if (j.contains("mine")) cfg.mine_top_k = j.at("mine").value("top_k", cfg.mine_top_k);
    if (j.contains("embeddings")) {
        const json& e = j.at("embeddings");
        cfg.embeddings.dim = e.value("dim", cfg.embeddings.dim);
        cfg.embeddings.window = e.value("window", cfg.embeddings.window);
        cfg.embeddings.epochs = e.value("epochs", cfg.embeddings.epochs);
        cfg.embeddings.lr = e.value("lr", cfg.embeddings.lr);
    }
    if (j.contains("lexical")) {
        const json& l = j.at("lexical");
        cfg.lexical.hidden = l.value("hidden", cfg.lexical.hidden);
        cfg.lexical.epochs = l.value("epochs", cfg.lexical.epochs);
        cfg.lexical.lr = l.value("lr", cfg.lexical.lr);
    }
    if (j.contains("langmodel")) {
        const json& l = j.at("langmodel");
        cfg.langmodel.embed_dim = l.value("embed_dim", cfg.langmodel.embed_dim);
        cfg.langmodel.hidden_dim = l.value("hidden_dim", cfg.langmodel.hidden_dim);
        cfg.langmodel.epochs = l.value("epochs", cfg.langmodel.epochs);
        cfg.langmodel.lr = l.value("lr", cfg.langmodel.lr);
        cfg.langmodel.clip = l.value("clip", cfg.langmodel.clip);
    }
    if (j.contains("caption")) {
        const json& c = j.at("caption");
        cfg.caption.epochs = c.value("epochs", cfg.caption.epochs);
        cfg.caption.lr = c.value("lr", cfg.caption.lr);
        cfg.caption.clip = c.value("clip", cfg.caption.clip);
    }
    if (j.contains("transfer")) cfg.transfer_n = j.at("transfer").value("n", cfg.transfer_n);
    if (j.contains("generate")) cfg.max_len = j.at("generate").value("max_len", cfg.max_len);
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw std::runtime_error(path + ": malformed JSON");
    RunConfig cfg = from_json(j);
    if (const char* env = std::getenv("DCC_SEED")) {
        cfg.seed = std::strtoull(env, nullptr, 10);
    }
    return cfg;
}

void RunConfig::validate() const {
    if (embeddings.dim < 2 || embeddings.window < 1 || embeddings.epochs < 1 || embeddings.lr <= 0.0f) {
        throw std::invalid_argument("config: invalid embeddings block");
    }
    if (lexical.epochs < 1 || lexical.lr <= 0.0f) throw std::invalid_argument("config: invalid lexical block");
    if (langmodel.embed_dim < 1 || langmodel.hidden_dim < 1 || langmodel.epochs < 1 || langmodel.lr <= 0.0f) {
        throw std::invalid_argument("config: invalid langmodel block");
    }
    if (caption.epochs < 1 || caption.lr <= 0.0f) throw std::invalid_argument("config: invalid caption block");
    if (transfer_n < 1) throw std::invalid_argument("config: transfer n must be >= 1");
    if (max_len < 1) throw std::invalid_argument("config: max_len must be >= 1");
    if (data.heldout.empty()) throw std::invalid_argument("config: held-out word list must be non-empty");
    if (data.heldout.size() >= data.num_concepts) {
        throw std::invalid_argument("config: held-out list covers all concepts");
    }
}

size_t RunConfig::effective_top_k() const {
    if (mine_top_k > 0) return mine_top_k;
    return data.num_concepts - data.heldout.size();
}

} // namespace dcc
