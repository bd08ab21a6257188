#include "dcc/synthetic.h"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "dcc/rng.h"

namespace dcc {

namespace {

struct RoleBank {
    std::vector<std::string> objects, attrs, verbs, scenes;
};

const std::array<RoleBank, 2>& word_banks() {
    static const std::array<RoleBank, 2> banks = {{
        {{"zebra", "giraffe", "horse", "sheep", "elephant", "cow"},
         {"striped", "spotted", "wild"},
         {"grazing", "standing", "walking"},
         {"field", "zoo", "meadow"}},
        {{"pizza", "sandwich", "salad", "burger", "pasta", "cake"},
         {"tasty", "fresh", "warm"},
         {"baked", "sliced", "served"},
         {"kitchen", "table", "plate"}},
    }};
    return banks;
}

enum Role { kAttr = 0, kVerb = 1, kScene = 2 };

// Caption patterns keyed by the extra-role combination (bit 0 = attribute,
// bit 1 = verb, bit 2 = scene). Glue words are all stopwords.
const std::vector<std::string>& patterns_for(unsigned mask) {
    static const std::array<std::vector<std::string>, 8> table = {{
        {"a {o}", "the {o}", "there is a {o}"},
        {"a {a} {o}", "the {a} {o}", "there is a {a} {o}"},
        {"a {o} {v}", "the {o} is {v}", "a {o} is {v}"},
        {"a {a} {o} {v}", "the {a} {o} is {v}"},
        {"a {o} in the {s}", "the {o} is in the {s}", "a {o} on the {s}"},
        {"a {a} {o} in the {s}", "the {a} {o} is on the {s}"},
        {"a {o} {v} in the {s}", "the {o} is {v} on the {s}", "a {o} {v} on the {s}"},
        {},
    }};
    return table[mask];
}

struct Description {
    size_t group = 0;
    std::string object;
    std::string attr, verb, scene; // empty when the role is not used
    unsigned mask = 0;

    std::vector<std::string> words() const {
        std::vector<std::string> out{object};
        if (!attr.empty()) out.push_back(attr);
        if (!verb.empty()) out.push_back(verb);
        if (!scene.empty()) out.push_back(scene);
        return out;
    }
};

std::string render(const std::string& pattern, const Description& d) {
    std::string out;
    for (size_t i = 0; i < pattern.size();) {
        if (pattern[i] == '{') {
            char role = pattern[i + 1];
            switch (role) {
                case 'o': out += d.object; break;
                case 'a': out += d.attr; break;
                case 'v': out += d.verb; break;
                case 's': out += d.scene; break;
                default: throw std::logic_error("bad pattern");
            }
            i += 3;
        } else {
            out += pattern[i++];
        }
    }
    return out;
}

std::string make_id(char prefix, size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%c%05zu", prefix, i);
    return buf;
}

class Sampler {
  public:
    Sampler(const SyntheticConfig& cfg, const SyntheticLayout& layout, const ConceptSet& concepts,
            const Tensor& projection, Rng& rng)
        : cfg_(cfg), layout_(layout), concepts_(concepts), projection_(projection), rng_(rng) {
        for (size_t g = 0; g < 2; ++g) {
            allowed_[g].objects = filter(layout.groups[g].objects);
            allowed_[g].attrs = filter(layout.groups[g].attrs);
            allowed_[g].verbs = filter(layout.groups[g].verbs);
            allowed_[g].scenes = filter(layout.groups[g].scenes);
            if (allowed_[g].objects.empty()) {
                throw std::invalid_argument("synthetic: every object of a group is held out");
            }
        }
    }

    Description sample(bool allow_heldout) {
        const auto pool = [&](size_t g) -> const SyntheticLayout::Group& {
            return allow_heldout ? layout_.groups[g] : allowed_[g];
        };
        Description d;
        d.group = rng_.uniform_index(2);
        const auto& p = pool(d.group);
        d.object = p.objects[rng_.uniform_index(p.objects.size())];
        size_t extras = rng_.uniform_index(3);
        std::vector<int> roles = {kAttr, kVerb, kScene};
        rng_.shuffle(roles);
        for (size_t i = 0; i < extras; ++i) {
            switch (roles[i]) {
                case kAttr:
                    if (!p.attrs.empty()) {
                        d.attr = p.attrs[rng_.uniform_index(p.attrs.size())];
                        d.mask |= 1u;
                    }
                    break;
                case kVerb:
                    if (!p.verbs.empty()) {
                        d.verb = p.verbs[rng_.uniform_index(p.verbs.size())];
                        d.mask |= 2u;
                    }
                    break;
                case kScene:
                    if (!p.scenes.empty()) {
                        d.scene = p.scenes[rng_.uniform_index(p.scenes.size())];
                        d.mask |= 4u;
                    }
                    break;
            }
        }
        return d;
    }

    Tensor clean_features(const Description& d) const {
        const size_t F = cfg_.feature_dim;
        Tensor x({F});
        for (const auto& w : d.words()) {
            size_t col = static_cast<size_t>(concepts_.row_of(w));
            for (size_t i = 0; i < F; ++i) x[i] += projection_.at(i, col);
        }
        return x;
    }

    void fill_features(const Description& d, Tensor& features, std::vector<Tensor>& frames) {
        Tensor base = clean_features(d);
        if (cfg_.max_frames == 0) {
            features = base;
            for (auto& v : features.data) v += static_cast<float>(rng_.normal(cfg_.noise_stddev));
        } else {
            size_t count = 2 + rng_.uniform_index(cfg_.max_frames - 1);
            for (size_t k = 0; k < count; ++k) {
                Tensor frame = base;
                for (auto& v : frame.data) v += static_cast<float>(rng_.normal(cfg_.noise_stddev));
                frames.push_back(std::move(frame));
            }
        }
    }

    TokenList caption(const Description& d) {
        const auto& pats = patterns_for(d.mask);
        return tokenize(render(pats[rng_.uniform_index(pats.size())], d));
    }

  private:
    std::vector<std::string> filter(const std::vector<std::string>& words) const {
        std::vector<std::string> out;
        for (const auto& w : words) {
            if (std::find(cfg_.heldout.begin(), cfg_.heldout.end(), w) == cfg_.heldout.end()) {
                out.push_back(w);
            }
        }
        return out;
    }

    const SyntheticConfig& cfg_;
    const SyntheticLayout& layout_;
    SyntheticLayout::Group allowed_[2];
    const ConceptSet& concepts_;
    const Tensor& projection_;
    Rng& rng_;
};

void validate(const SyntheticConfig& cfg, const std::vector<std::string>& concept_words) {
    if (cfg.num_concepts < 12 || cfg.num_concepts > 20 || cfg.num_concepts % 2 != 0) {
        throw std::invalid_argument("synthetic: num_concepts must be even and within [12, 20]");
    }
    if (cfg.feature_dim == 0 || cfg.num_paired == 0 || cfg.num_unpaired_images == 0 ||
        cfg.num_unpaired_text == 0 || cfg.num_test == 0) {
        throw std::invalid_argument("synthetic: all counts must be positive");
    }
    if (cfg.noise_stddev < 0.0f) throw std::invalid_argument("synthetic: negative noise stddev");
    if (cfg.max_frames == 1) throw std::invalid_argument("synthetic: max_frames must be 0 or >= 2");
    for (const auto& w : cfg.heldout) {
        if (std::find(concept_words.begin(), concept_words.end(), w) == concept_words.end()) {
            throw std::invalid_argument("synthetic: held-out word '" + w + "' is not a concept");
        }
    }
}

} // namespace

std::vector<std::string> SyntheticLayout::all_concepts() const {
    std::vector<std::string> out;
    for (const auto& g : groups) {
        out.insert(out.end(), g.objects.begin(), g.objects.end());
        out.insert(out.end(), g.attrs.begin(), g.attrs.end());
        out.insert(out.end(), g.verbs.begin(), g.verbs.end());
        out.insert(out.end(), g.scenes.begin(), g.scenes.end());
    }
    return out;
}

SyntheticLayout synthetic_layout(const SyntheticConfig& cfg) {
    const size_t per_group = cfg.num_concepts / 2;
    if (per_group < 6 || per_group > 10) {
        throw std::invalid_argument("synthetic: num_concepts must be even and within [12, 20]");
    }
    const size_t n_objects = per_group - 4; // 1 attr + 1 verb + 2 scenes per group
    SyntheticLayout layout;
    for (size_t g = 0; g < 2; ++g) {
        const RoleBank& bank = word_banks()[g];
        auto take = [](const std::vector<std::string>& src, size_t n) {
            return std::vector<std::string>(src.begin(), src.begin() + n);
        };
        layout.groups[g].objects = take(bank.objects, n_objects);
        layout.groups[g].attrs = take(bank.attrs, 1);
        layout.groups[g].verbs = take(bank.verbs, 1);
        layout.groups[g].scenes = take(bank.scenes, 2);
    }
    return layout;
}

SyntheticDataset generate_synthetic_dataset(const SyntheticConfig& cfg) {
    SyntheticLayout layout = synthetic_layout(cfg);
    std::vector<std::string> concept_words = layout.all_concepts();
    validate(cfg, concept_words);

    SyntheticDataset ds;
    for (const auto& w : concept_words) {
        bool novel = std::find(cfg.heldout.begin(), cfg.heldout.end(), w) != cfg.heldout.end();
        ds.concepts.add(w, novel);
    }

    Rng rng(cfg.seed);
    ds.projection = Tensor({cfg.feature_dim, cfg.num_concepts});
    fill_normal(ds.projection, rng, 1.0 / std::sqrt(static_cast<double>(cfg.feature_dim)));

    Sampler sampler(cfg, layout, ds.concepts, ds.projection, rng);

    for (size_t i = 0; i < cfg.num_paired; ++i) {
        Description d = sampler.sample(false);
        PairedExample ex;
        ex.id = make_id('p', i);
        sampler.fill_features(d, ex.features, ex.frames);
        size_t refs = 2 + rng.uniform_index(4);
        for (size_t r = 0; r < refs; ++r) ex.captions.push_back(sampler.caption(d));
        ds.paired.push_back(std::move(ex));
    }

    for (size_t i = 0; i < cfg.num_unpaired_images; ++i) {
        Description d = sampler.sample(true);
        UnpairedImageExample ex;
        ex.id = make_id('u', i);
        sampler.fill_features(d, ex.features, ex.frames);
        ex.labels = d.words();
        ds.unpaired_images.push_back(std::move(ex));
    }

    for (size_t i = 0; i < cfg.num_unpaired_text; ++i) {
        Description d = sampler.sample(true);
        TokenList sent = sampler.caption(d);
        std::string joined;
        for (size_t t = 0; t < sent.size(); ++t) {
            if (t) joined += ' ';
            joined += sent[t];
        }
        ds.unpaired_text.push_back(std::move(joined));
    }

    for (size_t i = 0; i < cfg.num_test; ++i) {
        Description d = sampler.sample(true);
        PairedExample ex;
        ex.id = make_id('t', i);
        sampler.fill_features(d, ex.features, ex.frames);
        size_t refs = 2 + rng.uniform_index(4);
        for (size_t r = 0; r < refs; ++r) ex.captions.push_back(sampler.caption(d));
        ds.test.push_back(std::move(ex));
    }

    return ds;
}

} // namespace dcc
