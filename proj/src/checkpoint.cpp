#include "dcc/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dcc {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'D', 'C', 'C', 'K'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& out, uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

void put_f32(std::ostream& out, float v) {
    put_u32(out, std::bit_cast<uint32_t>(v));
}

uint32_t get_u32(std::istream& in, const std::string& what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("checkpoint: truncated " + what);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

float get_f32(std::istream& in, const std::string& what) {
    return std::bit_cast<float>(get_u32(in, what));
}

json dims_json(const Tensor& t) {
    json dims = json::array();
    for (size_t d : t.shape) dims.push_back(d);
    return dims;
}

} // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    json manifest = ckpt.manifest;
    json declared = json::object();
    for (const auto& [name, t] : ckpt.tensors) declared[name] = dims_json(t);
    manifest["tensors"] = declared;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    const std::string mstr = manifest.dump();
    put_u32(out, static_cast<uint32_t>(mstr.size()));
    out.write(mstr.data(), static_cast<std::streamsize>(mstr.size()));
    put_u32(out, static_cast<uint32_t>(ckpt.tensors.size()));
    for (const auto& [name, t] : ckpt.tensors) {
        put_u32(out, static_cast<uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_u32(out, static_cast<uint32_t>(t.ndim()));
        for (size_t d : t.shape) put_u32(out, static_cast<uint32_t>(d));
        for (float v : t.data) put_f32(out, v);
    }
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error(path + ": not a checkpoint");
    }
    const uint32_t version = get_u32(in, "version");
    if (version != kVersion) {
        throw std::runtime_error(path + ": unsupported checkpoint version " + std::to_string(version));
    }
    const uint32_t manifest_len = get_u32(in, "manifest length");
    std::string mstr(manifest_len, '\0');
    if (!in.read(mstr.data(), manifest_len)) throw std::runtime_error(path + ": truncated manifest");

    Checkpoint ckpt;
    ckpt.manifest = json::parse(mstr, nullptr, false);
    if (ckpt.manifest.is_discarded()) throw std::runtime_error(path + ": malformed manifest JSON");

    const uint32_t count = get_u32(in, "tensor count");
    for (uint32_t i = 0; i < count; ++i) {
        const uint32_t name_len = get_u32(in, "tensor name length");
        std::string name(name_len, '\0');
        if (!in.read(name.data(), name_len)) throw std::runtime_error(path + ": truncated tensor name");
        const uint32_t ndim = get_u32(in, "tensor rank");
        std::vector<size_t> shape(ndim);
        size_t numel = 1;
        for (uint32_t d = 0; d < ndim; ++d) {
            shape[d] = get_u32(in, "tensor dim");
            numel *= shape[d];
        }
        Tensor t(shape);
        for (size_t k = 0; k < numel; ++k) t[k] = get_f32(in, "tensor data of '" + name + "'");
        ckpt.tensors.emplace(std::move(name), std::move(t));
    }

    // Manifest and blob section must agree both ways.
    const json& declared = ckpt.manifest.at("tensors");
    for (auto it = declared.begin(); it != declared.end(); ++it) {
        auto found = ckpt.tensors.find(it.key());
        if (found == ckpt.tensors.end()) {
            throw std::runtime_error(path + ": manifest declares missing tensor '" + it.key() + "'");
        }
        std::vector<size_t> shape = it.value().get<std::vector<size_t>>();
        if (shape != found->second.shape) {
            throw std::runtime_error(path + ": shape mismatch for tensor '" + it.key() + "'");
        }
    }
    for (const auto& [name, t] : ckpt.tensors) {
        if (!declared.contains(name)) {
            throw std::runtime_error(path + ": undeclared tensor '" + name + "' in blob section");
        }
    }
    return ckpt;
}

namespace {

json base_manifest(const std::string& kind, const std::string& stage, json config_echo) {
    return json{{"kind", kind},
                {"meta", {{"tool", "dcc"}, {"format_version", kVersion}, {"stage", stage}}},
                {"config", std::move(config_echo)}};
}

std::map<std::string, Tensor> store_tensors(const ParamStore& store) {
    std::map<std::string, Tensor> out;
    for (const auto& [name, entry] : store.entries()) out.emplace(name, entry.value);
    return out;
}

} // namespace

Checkpoint lexical_to_checkpoint(const LexicalParams& params, json config_echo) {
    Checkpoint ckpt;
    ckpt.manifest = base_manifest("lexical", "train-lexical", std::move(config_echo));
    ckpt.manifest["dims"] = {{"F", params.feature_dim}, {"C", params.concepts.size()}, {"lex_hidden", params.hidden}};
    ckpt.manifest["concepts"] = params.concepts.to_json();
    ckpt.tensors = store_tensors(params.store);
    return ckpt;
}

LexicalParams lexical_from_checkpoint(const Checkpoint& ckpt) {
    if (ckpt.manifest.at("kind") != "lexical") {
        throw std::runtime_error("checkpoint kind '" + ckpt.manifest.at("kind").get<std::string>() +
                                 "', expected 'lexical'");
    }
    LexicalParams params;
    params.concepts = ConceptSet::from_json(ckpt.manifest.at("concepts"));
    params.feature_dim = ckpt.manifest.at("dims").at("F").get<size_t>();
    params.hidden = ckpt.manifest.at("dims").at("lex_hidden").get<size_t>();
    for (const auto& [name, t] : ckpt.tensors) params.store.add(name, t);
    return params;
}

Checkpoint lm_to_checkpoint(const LanguageModelParams& params, json config_echo) {
    Checkpoint ckpt;
    ckpt.manifest = base_manifest("langmodel", "train-lm", std::move(config_echo));
    ckpt.manifest["dims"] = {{"E", params.embed_dim}, {"H", params.hidden_dim}, {"V", params.vocab.size()}};
    ckpt.manifest["vocab"] = params.vocab.to_json();
    ckpt.tensors = store_tensors(params.store);
    return ckpt;
}

LanguageModelParams lm_from_checkpoint(const Checkpoint& ckpt) {
    if (ckpt.manifest.at("kind") != "langmodel") {
        throw std::runtime_error("checkpoint kind '" + ckpt.manifest.at("kind").get<std::string>() +
                                 "', expected 'langmodel'");
    }
    LanguageModelParams params;
    params.vocab = Vocabulary::from_json(ckpt.manifest.at("vocab"));
    params.embed_dim = ckpt.manifest.at("dims").at("E").get<size_t>();
    params.hidden_dim = ckpt.manifest.at("dims").at("H").get<size_t>();
    for (const auto& [name, t] : ckpt.tensors) params.store.add(name, t);
    return params;
}

Checkpoint caption_to_checkpoint(const CaptionModel& model, json config_echo) {
    Checkpoint ckpt;
    ckpt.manifest = base_manifest("caption", "train-caption", std::move(config_echo));
    ckpt.manifest["dims"] = {{"E", model.embed_dim},     {"H", model.hidden_dim},
                             {"V", model.vocab.size()},  {"C", model.concepts.size()},
                             {"F", model.feature_dim},   {"lex_hidden", model.lex_hidden}};
    ckpt.manifest["vocab"] = model.vocab.to_json();
    ckpt.manifest["concepts"] = model.concepts.to_json();
    ckpt.tensors = store_tensors(model.store);
    return ckpt;
}

CaptionModel caption_from_checkpoint(const Checkpoint& ckpt) {
    if (ckpt.manifest.at("kind") != "caption") {
        throw std::runtime_error("checkpoint kind '" + ckpt.manifest.at("kind").get<std::string>() +
                                 "', expected 'caption'");
    }
    CaptionModel model;
    model.vocab = Vocabulary::from_json(ckpt.manifest.at("vocab"));
    model.concepts = ConceptSet::from_json(ckpt.manifest.at("concepts"));
    const json& dims = ckpt.manifest.at("dims");
    model.embed_dim = dims.at("E").get<size_t>();
    model.hidden_dim = dims.at("H").get<size_t>();
    model.feature_dim = dims.at("F").get<size_t>();
    model.lex_hidden = dims.at("lex_hidden").get<size_t>();
    for (const auto& [name, t] : ckpt.tensors) {
        const bool trainable = name == "cap.WI" || name == "cap.WL" || name == "cap.b";
        model.store.add(name, t, trainable);
    }
    return model;
}

} // namespace dcc
