#pragma once

#include <cstdint>
#include <string>

#include "dcc/embeddings.h"
#include "dcc/langmodel.h"
#include "dcc/synthetic.h"
#include "json.hpp"

namespace dcc {

/// One JSON document configures the whole experiment. The master seed drives
/// every stage (each stage derives seed + a fixed offset); the DCC_SEED
/// environment variable overrides it at load time.
struct RunConfig {
    uint64_t seed = 42;
    SyntheticConfig data;
    size_t mine_top_k = 0; // 0 = concepts minus held-out count

    CbowConfig embeddings;

    struct Lexical {
        size_t hidden = 0; // 0 = linear classifier
        size_t epochs = 12;
        float lr = 0.5f;
    } lexical;

    LmTrainConfig langmodel;

    struct Caption {
        size_t epochs = 16;
        float lr = 0.25f;
        float clip = 5.0f;
    } caption;

    size_t transfer_n = 1; // sources averaged by delta transfer
    size_t max_len = 12;   // greedy decode cap

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::string& path); // applies DCC_SEED override
    void validate() const;

    size_t effective_top_k() const;
};

// Stage seed offsets off the master seed.
enum : uint64_t {
    kSeedSynth = 0,
    kSeedLexical = 1,
    kSeedEmbeddings = 2,
    kSeedLangModel = 3,
    kSeedCaptionDirect = 4,
    kSeedCaptionDelta = 5,
};

} // namespace dcc
