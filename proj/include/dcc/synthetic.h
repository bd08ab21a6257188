#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dcc/dataset.h"
#include "dcc/tensor.h"

namespace dcc {

/// Configuration for the deterministic synthetic data generator. Concepts are
/// drawn from two built-in semantic groups (animals, foods) with four roles
/// per group (object / attribute / verb / scene); num_concepts must be even
/// and in [12, 20].
struct SyntheticConfig {
    uint64_t seed = 42;
    size_t num_concepts = 12;
    size_t feature_dim = 32;
    size_t num_paired = 1000;
    size_t num_unpaired_images = 500;
    size_t num_unpaired_text = 3000;
    size_t num_test = 200;
    float noise_stddev = 0.05f;
    std::vector<std::string> heldout;
    size_t max_frames = 0; // 0 = single feature vector; >= 2 = 2..max_frames frames per example
};

/// The concept words selected for a config, organized by group and role.
struct SyntheticLayout {
    struct Group {
        std::vector<std::string> objects, attrs, verbs, scenes;
    };
    std::array<Group, 2> groups;

    std::vector<std::string> all_concepts() const;
};

struct SyntheticDataset {
    std::vector<PairedExample> paired;               // no held-out word in any caption
    std::vector<UnpairedImageExample> unpaired_images; // covers held-out concepts
    std::vector<std::string> unpaired_text;          // covers held-out concepts
    std::vector<PairedExample> test;                 // all concepts, with references
    ConceptSet concepts;                             // generator ground truth
    Tensor projection;                               // F x C ground-truth projection
};

SyntheticLayout synthetic_layout(const SyntheticConfig& cfg);

/// Fully determined by cfg.seed: equal seeds give byte-identical datasets.
SyntheticDataset generate_synthetic_dataset(const SyntheticConfig& cfg);

} // namespace dcc
