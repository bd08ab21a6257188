#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dcc/tensor.h"
#include "dcc/text.h"
#include "dcc/vocab.h"

namespace dcc {

/// Example with features (or video frames) and one or more reference
/// captions, stored as token lists.
struct PairedExample {
    std::string id;
    Tensor features;                // empty when frames are present
    std::vector<Tensor> frames;     // empty for single-feature examples
    std::vector<TokenList> captions;

    bool is_video() const { return !frames.empty(); }
};

/// Image/video example labeled with concept words but no captions.
struct UnpairedImageExample {
    std::string id;
    Tensor features;
    std::vector<Tensor> frames;
    std::vector<std::string> labels;

    bool is_video() const { return !frames.empty(); }
};

/// label[c] = 1 iff concept word c appears as a token in any caption.
std::vector<float> derive_concept_labels(const PairedExample& example, const ConceptSet& concepts);

/// Partition: an example is removed iff any caption contains any held-out
/// word as a token.
std::pair<std::vector<PairedExample>, std::vector<PairedExample>>
build_heldout_split(const std::vector<PairedExample>& paired, const std::vector<std::string>& heldout);

// JSONL formats:
//   paired:   {"id": str, "features": [f...] | "frames": [[f...]...], "captions": [str...]}
//   unpaired: {"id": str, "features": [f...] | "frames": [[f...]...], "labels": [str...]}
std::vector<PairedExample> load_paired(const std::string& path);
void save_paired(const std::vector<PairedExample>& examples, const std::string& path);

std::vector<UnpairedImageExample> load_unpaired_images(const std::string& path);
void save_unpaired_images(const std::vector<UnpairedImageExample>& examples, const std::string& path);

std::vector<std::string> load_text_lines(const std::string& path);
void save_text_lines(const std::vector<std::string>& lines, const std::string& path);

ConceptSet load_concepts(const std::string& path);
void save_concepts(const ConceptSet& concepts, const std::string& path);

// captions: {"id": str, "tokens": [str...]}
void save_captions(const std::vector<std::string>& ids, const std::vector<TokenList>& captions,
                   const std::string& path);
std::vector<TokenList> load_captions(const std::string& path);

/// Binary label vector over concept rows; throws on labels outside the set.
std::vector<float> labels_to_vector(const std::vector<std::string>& labels, const ConceptSet& concepts);

} // namespace dcc
