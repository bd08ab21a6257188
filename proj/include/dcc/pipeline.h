#pragma once

#include <string>

#include "dcc/config.h"
#include "dcc/eval.h"

namespace dcc {

/// Artifact paths inside a pipeline output directory.
struct PipelinePaths {
    std::string dir;

    std::string paired() const { return dir + "/paired.jsonl"; }
    std::string unpaired_images() const { return dir + "/unpaired_images.jsonl"; }
    std::string unpaired_text() const { return dir + "/unpaired_text.txt"; }
    std::string concepts() const { return dir + "/concepts.json"; }
    std::string test() const { return dir + "/test.jsonl"; }
    std::string concepts_mined() const { return dir + "/concepts_mined.json"; }
    std::string embeddings() const { return dir + "/embeddings.tsv"; }
    std::string lexical_ckpt() const { return dir + "/lex.ckpt"; }
    std::string lm_ckpt() const { return dir + "/lm.ckpt"; }
    std::string caption_ckpt(const std::string& regime) const { return dir + "/caption_" + regime + ".ckpt"; }
    std::string transferred_ckpt(const std::string& method) const {
        return dir + "/caption_" + method + "_transferred.ckpt";
    }
    std::string plan(const std::string& method) const { return dir + "/transfer_plan_" + method + ".json"; }
    std::string captions(const std::string& variant) const { return dir + "/captions_" + variant + ".jsonl"; }
    std::string report(const std::string& variant) const { return dir + "/report_" + variant + ".json"; }
    std::string combined_report() const { return dir + "/report.json"; }
};

struct PipelineResult {
    EvalReport no_transfer;
    EvalReport direct_transfer;
    EvalReport delta_transfer;
};

/// Runs every stage from one config: synthesize data, mine concepts, train
/// the lexical classifier, embeddings, and language model, train the caption
/// model under both regimes, build and apply both transfer methods, and
/// evaluate. Each stage reads only files written by earlier stages.
PipelineResult run_pipeline(const RunConfig& cfg, const std::string& out_dir);

} // namespace dcc
