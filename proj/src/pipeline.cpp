#include "dcc/pipeline.h"

#include <filesystem>
#include <fstream>
#include <set>

#include "dcc/checkpoint.h"
#include "dcc/log.h"
#include "dcc/transfer.h"

namespace dcc {

using nlohmann::json;

namespace {

std::set<std::string> caption_word_set(const std::vector<PairedExample>& paired) {
    std::set<std::string> words;
    for (const auto& ex : paired) {
        for (const auto& cap : ex.captions) words.insert(cap.begin(), cap.end());
    }
    return words;
}

std::vector<LexicalExample> lexical_training_set(const std::vector<UnpairedImageExample>& unpaired,
                                                 const std::vector<PairedExample>& paired,
                                                 const ConceptSet& concepts) {
    std::vector<LexicalExample> out;
    out.reserve(unpaired.size() + paired.size());
    for (const auto& ex : unpaired) {
        Tensor x = ex.is_video() ? mean_pool_frames(ex.frames) : ex.features;
        out.push_back({std::move(x), labels_to_vector(ex.labels, concepts)});
    }
    for (const auto& ex : paired) {
        out.push_back({caption_input_features(ex), derive_concept_labels(ex, concepts)});
    }
    return out;
}

void write_report(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << report.to_json().dump(2) << "\n";
}

EvalReport evaluate_variant(const CaptionModel& model, const std::vector<PairedExample>& test,
                            const RunConfig& cfg, const PipelinePaths& paths, const std::string& variant) {
    json echo{{"variant", variant}, {"max_len", cfg.max_len}, {"novel", cfg.data.heldout}};
    std::vector<TokenList> generated;
    EvalReport report = evaluate_run(model, test, cfg.data.heldout, cfg.max_len, echo, &generated);
    std::vector<std::string> ids;
    ids.reserve(test.size());
    for (const auto& ex : test) ids.push_back(ex.id);
    save_captions(ids, generated, paths.captions(variant));
    write_report(report, paths.report(variant));
    log_info("[pipeline] " + variant + ": avg F1 " + std::to_string(report.avg_f1) + ", BLEU-1 " +
             std::to_string(report.bleu1));
    return report;
}

} // namespace

PipelineResult run_pipeline(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);
    PipelinePaths paths{out_dir};

    // Synthesize and persist the corpus.
    log_info("[pipeline] generating synthetic dataset");
    SyntheticConfig data_cfg = cfg.data;
    data_cfg.seed = cfg.seed + kSeedSynth;
    SyntheticDataset ds = generate_synthetic_dataset(data_cfg);
    save_paired(ds.paired, paths.paired());
    save_unpaired_images(ds.unpaired_images, paths.unpaired_images());
    save_text_lines(ds.unpaired_text, paths.unpaired_text());
    save_concepts(ds.concepts, paths.concepts());
    save_paired(ds.test, paths.test());

    // Every later stage works from the files written above.
    std::vector<PairedExample> paired_all = load_paired(paths.paired());
    auto [paired, removed] = build_heldout_split(paired_all, cfg.data.heldout);
    if (!removed.empty()) {
        log_warn("pipeline: " + std::to_string(removed.size()) + " paired examples mention held-out words");
    }

    std::vector<std::vector<std::string>> paired_captions;
    for (const auto& ex : paired) {
        for (const auto& cap : ex.captions) paired_captions.push_back(cap);
    }
    ConceptSet concepts =
        mine_concepts(paired_captions, cfg.effective_top_k(), default_stopwords(), cfg.data.heldout);
    save_concepts(concepts, paths.concepts_mined());
    log_info("[pipeline] mined " + std::to_string(concepts.size()) + " concepts");

    // Lexical classifier over unpaired images plus caption-derived labels.
    log_info("[pipeline] training lexical classifier");
    std::vector<UnpairedImageExample> unpaired = load_unpaired_images(paths.unpaired_images());
    LexicalParams lex = init_lexical(concepts, cfg.data.feature_dim, cfg.lexical.hidden,
                                     cfg.seed + kSeedLexical);
    train_lexical(lex, lexical_training_set(unpaired, paired, concepts),
                  {cfg.lexical.epochs, cfg.lexical.lr, cfg.seed + kSeedLexical});
    save_checkpoint(lexical_to_checkpoint(lex, cfg.to_json()), paths.lexical_ckpt());

    // Word embeddings and language model from unpaired text.
    log_info("[pipeline] training word embeddings");
    std::vector<TokenList> text;
    for (const auto& line : load_text_lines(paths.unpaired_text())) text.push_back(tokenize(line));
    Vocabulary vocab = build_vocab(text, 1);
    CbowConfig cbow_cfg = cfg.embeddings;
    cbow_cfg.seed = cfg.seed + kSeedEmbeddings;
    save_embeddings_tsv(train_cbow(text, vocab, cbow_cfg), paths.embeddings());

    log_info("[pipeline] training language model");
    LmTrainConfig lm_cfg = cfg.langmodel;
    lm_cfg.seed = cfg.seed + kSeedLangModel;
    LanguageModelParams lm = train_language_model(text, vocab, lm_cfg);
    save_checkpoint(lm_to_checkpoint(lm, cfg.to_json()), paths.lm_ckpt());

    // Caption model, one training run per regime.
    for (const char* regime : {"direct", "delta"}) {
        log_info(std::string("[pipeline] training caption model (") + regime + " regime)");
        LanguageModelParams lm_in = lm_from_checkpoint(load_checkpoint(paths.lm_ckpt()));
        LexicalParams lex_in = lexical_from_checkpoint(load_checkpoint(paths.lexical_ckpt()));
        CaptionModel model = init_caption_model(lm_in, lex_in);
        const bool direct = std::string(regime) == "direct";
        CaptionTrainConfig train_cfg{direct ? Regime::kDirect : Regime::kDelta, cfg.caption.epochs,
                                     cfg.caption.lr, cfg.caption.clip,
                                     cfg.seed + (direct ? kSeedCaptionDirect : kSeedCaptionDelta)};
        train_caption(model, paired, train_cfg);
        save_checkpoint(caption_to_checkpoint(model, cfg.to_json()), paths.caption_ckpt(regime));
    }

    // Transfer surgery on each trained model.
    EmbeddingTable table = load_embeddings_tsv(paths.embeddings());
    std::set<std::string> paired_words = caption_word_set(paired);
    for (const char* method : {"direct", "delta"}) {
        CaptionModel model = caption_from_checkpoint(load_checkpoint(paths.caption_ckpt(method)));
        const bool direct = std::string(method) == "direct";
        TransferPlan plan = build_transfer_plan(cfg.data.heldout, table, model.vocab, model.concepts,
                                                paired_words,
                                                direct ? TransferMethod::kDirect : TransferMethod::kDelta,
                                                direct ? 1 : cfg.transfer_n);
        save_transfer_plan(plan, paths.plan(method));
        CaptionModel edited = direct ? direct_transfer(model, plan) : delta_transfer(model, plan);
        save_checkpoint(caption_to_checkpoint(edited, cfg.to_json()), paths.transferred_ckpt(method));
    }

    // Evaluation: base model, then both transferred models.
    std::vector<PairedExample> test = load_paired(paths.test());
    PipelineResult result;
    result.no_transfer = evaluate_variant(
        caption_from_checkpoint(load_checkpoint(paths.caption_ckpt("direct"))), test, cfg, paths,
        "no_transfer");
    result.direct_transfer = evaluate_variant(
        caption_from_checkpoint(load_checkpoint(paths.transferred_ckpt("direct"))), test, cfg, paths,
        "direct_transfer");
    result.delta_transfer = evaluate_variant(
        caption_from_checkpoint(load_checkpoint(paths.transferred_ckpt("delta"))), test, cfg, paths,
        "delta_transfer");

    json combined{{"no_transfer", result.no_transfer.to_json()},
                  {"direct_transfer", result.direct_transfer.to_json()},
                  {"delta_transfer", result.delta_transfer.to_json()},
                  {"config", cfg.to_json()}};
    std::ofstream out(paths.combined_report());
    if (!out) throw std::runtime_error("cannot write " + paths.combined_report());
    out << combined.dump(2) << "\n";
    return result;
}

} // namespace dcc
