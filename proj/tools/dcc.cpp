// Command-line surface for the captioning toolkit: data synthesis, the three
// training stages, transfer surgery, generation, evaluation, and the
// end-to-end pipeline.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"

#include "dcc/checkpoint.h"
#include "dcc/config.h"
#include "dcc/eval.h"
#include "dcc/log.h"
#include "dcc/pipeline.h"
#include "dcc/transfer.h"

namespace {

using namespace dcc;
using nlohmann::json;

uint64_t seed_override(uint64_t seed) {
    if (const char* env = std::getenv("DCC_SEED")) return std::strtoull(env, nullptr, 10);
    return seed;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

std::vector<TokenList> tokenized_lines(const std::string& path) {
    std::vector<TokenList> out;
    for (const auto& line : load_text_lines(path)) out.push_back(tokenize(line));
    return out;
}

std::set<std::string> paired_word_set(const std::string& paired_path) {
    std::set<std::string> words;
    for (const auto& ex : load_paired(paired_path)) {
        for (const auto& cap : ex.captions) words.insert(cap.begin(), cap.end());
    }
    return words;
}

int run(int argc, char** argv) {
    CLI::App app{"compositional captioner with novel-word weight transfer"};
    app.require_subcommand(1);

    // ---- synth -----------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "generate the synthetic dataset");
    std::string synth_config, synth_out = ".";
    synth->add_option("--config", synth_config, "run config JSON")->required();
    synth->add_option("--out", synth_out, "output directory");
    synth->callback([&] {
        RunConfig cfg = RunConfig::load(synth_config);
        cfg.validate();
        std::filesystem::create_directories(synth_out);
        SyntheticConfig data_cfg = cfg.data;
        data_cfg.seed = cfg.seed + kSeedSynth;
        SyntheticDataset ds = generate_synthetic_dataset(data_cfg);
        PipelinePaths paths{synth_out};
        save_paired(ds.paired, paths.paired());
        save_unpaired_images(ds.unpaired_images, paths.unpaired_images());
        save_text_lines(ds.unpaired_text, paths.unpaired_text());
        save_concepts(ds.concepts, paths.concepts());
        save_paired(ds.test, paths.test());
        log_info("wrote dataset to " + synth_out);
    });

    // ---- mine-concepts ---------------------------------------------------
    auto* mine = app.add_subcommand("mine-concepts", "mine frequent concepts from paired captions");
    std::string mine_paired, mine_out = "concepts_mined.json";
    size_t mine_top_k = 10;
    std::vector<std::string> mine_extra;
    mine->add_option("--paired", mine_paired, "paired.jsonl")->required();
    mine->add_option("--top-k", mine_top_k, "number of mined concepts");
    mine->add_option("--extra", mine_extra, "extra (novel) concept words");
    mine->add_option("--out", mine_out, "output concepts JSON");
    mine->callback([&] {
        std::vector<TokenList> captions;
        for (const auto& ex : load_paired(mine_paired)) {
            for (const auto& cap : ex.captions) captions.push_back(cap);
        }
        ConceptSet cs = mine_concepts(captions, mine_top_k, default_stopwords(), mine_extra);
        save_concepts(cs, mine_out);
        log_info("mined " + std::to_string(cs.size()) + " concepts -> " + mine_out);
    });

    // ---- train-embeddings ------------------------------------------------
    auto* emb = app.add_subcommand("train-embeddings", "train CBOW embeddings on unpaired text");
    std::string emb_text, emb_out = "embeddings.tsv";
    CbowConfig emb_cfg;
    size_t emb_min_count = 1;
    emb->add_option("--text", emb_text, "unpaired_text.txt")->required();
    emb->add_option("--dim", emb_cfg.dim, "embedding dimension");
    emb->add_option("--window", emb_cfg.window, "context window");
    emb->add_option("--epochs", emb_cfg.epochs, "training epochs");
    emb->add_option("--lr", emb_cfg.lr, "learning rate");
    emb->add_option("--seed", emb_cfg.seed, "rng seed");
    emb->add_option("--min-count", emb_min_count, "vocabulary count threshold");
    emb->add_option("--out", emb_out, "output TSV");
    emb->callback([&] {
        emb_cfg.seed = seed_override(emb_cfg.seed);
        std::vector<TokenList> text = tokenized_lines(emb_text);
        Vocabulary vocab = build_vocab(text, emb_min_count);
        save_embeddings_tsv(train_cbow(text, vocab, emb_cfg), emb_out);
        log_info("wrote " + emb_out);
    });

    // ---- train-lexical ---------------------------------------------------
    auto* lexc = app.add_subcommand("train-lexical", "train the lexical classifier");
    std::string lex_unpaired, lex_paired, lex_concepts, lex_out = "lex.ckpt";
    LexicalTrainConfig lex_cfg;
    size_t lex_hidden = 0;
    lexc->add_option("--unpaired", lex_unpaired, "unpaired_images.jsonl")->required();
    lexc->add_option("--paired", lex_paired, "paired.jsonl (captions give labels)");
    lexc->add_option("--concepts", lex_concepts, "concepts JSON")->required();
    lexc->add_option("--hidden", lex_hidden, "hidden width (0 = linear)");
    lexc->add_option("--epochs", lex_cfg.epochs, "training epochs");
    lexc->add_option("--lr", lex_cfg.lr, "learning rate");
    lexc->add_option("--seed", lex_cfg.seed, "rng seed");
    lexc->add_option("--out", lex_out, "output checkpoint");
    lexc->callback([&] {
        lex_cfg.seed = seed_override(lex_cfg.seed);
        ConceptSet concepts = load_concepts(lex_concepts);
        std::vector<LexicalExample> examples;
        for (const auto& ex : load_unpaired_images(lex_unpaired)) {
            Tensor x = ex.is_video() ? mean_pool_frames(ex.frames) : ex.features;
            examples.push_back({std::move(x), labels_to_vector(ex.labels, concepts)});
        }
        size_t feature_dim = examples.empty() ? 0 : examples[0].features.numel();
        if (!lex_paired.empty()) {
            for (const auto& ex : load_paired(lex_paired)) {
                examples.push_back({caption_input_features(ex), derive_concept_labels(ex, concepts)});
            }
        }
        if (examples.empty()) throw std::runtime_error("train-lexical: no training examples");
        if (feature_dim == 0) feature_dim = examples[0].features.numel();
        LexicalParams params = init_lexical(concepts, feature_dim, lex_hidden, lex_cfg.seed);
        train_lexical(params, examples, lex_cfg);
        save_checkpoint(lexical_to_checkpoint(params, json::object()), lex_out);
        log_info("wrote " + lex_out);
    });

    // ---- train-lm --------------------------------------------------------
    auto* lmc = app.add_subcommand("train-lm", "train the language model on unpaired text");
    std::string lm_text, lm_out = "lm.ckpt";
    LmTrainConfig lm_cfg;
    size_t lm_min_count = 1;
    lmc->add_option("--text", lm_text, "unpaired_text.txt")->required();
    lmc->add_option("--embed-dim", lm_cfg.embed_dim, "embedding dimension");
    lmc->add_option("--hidden-dim", lm_cfg.hidden_dim, "LSTM width");
    lmc->add_option("--epochs", lm_cfg.epochs, "training epochs");
    lmc->add_option("--lr", lm_cfg.lr, "learning rate");
    lmc->add_option("--clip", lm_cfg.clip, "gradient-norm clip (0 = off)");
    lmc->add_option("--seed", lm_cfg.seed, "rng seed");
    lmc->add_option("--min-count", lm_min_count, "vocabulary count threshold");
    lmc->add_option("--out", lm_out, "output checkpoint");
    lmc->callback([&] {
        lm_cfg.seed = seed_override(lm_cfg.seed);
        std::vector<TokenList> text = tokenized_lines(lm_text);
        Vocabulary vocab = build_vocab(text, lm_min_count);
        LanguageModelParams params = train_language_model(text, vocab, lm_cfg);
        save_checkpoint(lm_to_checkpoint(params, json::object()), lm_out);
        log_info("wrote " + lm_out + " (perplexity " + std::to_string(lm_perplexity(params, text)) + ")");
    });

    // ---- train-caption ---------------------------------------------------
    auto* capc = app.add_subcommand("train-caption", "train the multimodal caption model");
    std::string cap_lm, cap_lex, cap_paired, cap_regime = "direct", cap_out = "caption.ckpt";
    std::vector<std::string> cap_heldout;
    CaptionTrainConfig cap_cfg;
    capc->add_option("--lm", cap_lm, "language model checkpoint")->required();
    capc->add_option("--lex", cap_lex, "lexical checkpoint")->required();
    capc->add_option("--paired", cap_paired, "paired.jsonl")->required();
    capc->add_option("--regime", cap_regime, "direct|delta freeze schedule")
        ->check(CLI::IsMember({"direct", "delta"}));
    capc->add_option("--heldout", cap_heldout, "held-out words to filter from paired data");
    capc->add_option("--epochs", cap_cfg.epochs, "training epochs");
    capc->add_option("--lr", cap_cfg.lr, "learning rate");
    capc->add_option("--clip", cap_cfg.clip, "gradient-norm clip (0 = off)");
    capc->add_option("--seed", cap_cfg.seed, "rng seed");
    capc->add_option("--out", cap_out, "output checkpoint");
    capc->callback([&] {
        cap_cfg.seed = seed_override(cap_cfg.seed);
        cap_cfg.regime = cap_regime == "direct" ? Regime::kDirect : Regime::kDelta;
        LanguageModelParams lm = lm_from_checkpoint(load_checkpoint(cap_lm));
        LexicalParams lex = lexical_from_checkpoint(load_checkpoint(cap_lex));
        std::vector<PairedExample> paired = load_paired(cap_paired);
        if (!cap_heldout.empty()) {
            auto [kept, removed] = build_heldout_split(paired, cap_heldout);
            if (!removed.empty()) {
                log_warn("filtered " + std::to_string(removed.size()) + " examples mentioning held-out words");
            }
            paired = std::move(kept);
        }
        CaptionModel model = init_caption_model(lm, lex);
        train_caption(model, paired, cap_cfg);
        save_checkpoint(caption_to_checkpoint(model, json::object()), cap_out);
        log_info("wrote " + cap_out);
    });

    // ---- transfer --------------------------------------------------------
    auto* trans = app.add_subcommand("transfer", "edit a caption model so novel words become generable");
    std::string tr_model, tr_method = "direct", tr_plan = "auto", tr_embeddings, tr_paired;
    std::string tr_out = "caption_transferred.ckpt", tr_plan_out;
    std::vector<std::string> tr_novel;
    size_t tr_n = 1;
    trans->add_option("--model", tr_model, "caption checkpoint")->required();
    trans->add_option("--method", tr_method, "direct|delta")->check(CLI::IsMember({"direct", "delta"}));
    trans->add_option("--n", tr_n, "sources averaged by delta transfer");
    trans->add_option("--plan", tr_plan, "'auto' or a transfer plan JSON file");
    trans->add_option("--embeddings", tr_embeddings, "embeddings TSV (auto plan)");
    trans->add_option("--paired", tr_paired, "paired.jsonl (auto plan; source restriction)");
    trans->add_option("--novel", tr_novel, "novel words (auto plan; defaults to the model's novel concepts)");
    trans->add_option("--out", tr_out, "output checkpoint");
    trans->add_option("--plan-out", tr_plan_out, "also write the plan JSON here");
    trans->callback([&] {
        CaptionModel model = caption_from_checkpoint(load_checkpoint(tr_model));
        TransferMethod method = transfer_method_from_name(tr_method);
        TransferPlan plan;
        if (tr_plan == "auto") {
            if (tr_embeddings.empty() || tr_paired.empty()) {
                throw std::runtime_error("transfer: --plan auto needs --embeddings and --paired");
            }
            std::vector<std::string> novel = tr_novel.empty() ? model.concepts.novel_words() : tr_novel;
            plan = build_transfer_plan(novel, load_embeddings_tsv(tr_embeddings), model.vocab,
                                       model.concepts, paired_word_set(tr_paired), method, tr_n);
        } else {
            plan = load_transfer_plan(tr_plan);
        }
        if (!tr_plan_out.empty()) save_transfer_plan(plan, tr_plan_out);
        CaptionModel edited =
            method == TransferMethod::kDirect ? direct_transfer(model, plan) : delta_transfer(model, plan);
        save_checkpoint(caption_to_checkpoint(edited, json::object()), tr_out);
        log_info("wrote " + tr_out);
    });

    // ---- generate --------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "greedy-decode captions for a dataset");
    std::string gen_model, gen_input, gen_out = "captions.jsonl";
    size_t gen_max_len = 12;
    gen->add_option("--model", gen_model, "caption checkpoint")->required();
    gen->add_option("--input", gen_input, "paired-format JSONL with features/frames")->required();
    gen->add_option("--max-len", gen_max_len, "decode length cap");
    gen->add_option("--out", gen_out, "output captions JSONL");
    gen->callback([&] {
        CaptionModel model = caption_from_checkpoint(load_checkpoint(gen_model));
        std::vector<PairedExample> inputs = load_paired(gen_input);
        std::vector<std::string> ids;
        std::vector<TokenList> captions;
        for (const auto& ex : inputs) {
            ids.push_back(ex.id);
            captions.push_back(generate_caption(ex, model, gen_max_len));
        }
        save_captions(ids, captions, gen_out);
        log_info("wrote " + gen_out);
    });

    // ---- evaluate --------------------------------------------------------
    auto* eval = app.add_subcommand("evaluate", "novel-word F1 and BLEU-1 against test references");
    std::string ev_model, ev_hyps, ev_test, ev_out = "report.json";
    std::vector<std::string> ev_novel;
    size_t ev_max_len = 12;
    eval->add_option("--model", ev_model, "caption checkpoint (generates hypotheses)");
    eval->add_option("--hyps", ev_hyps, "pre-generated captions JSONL (alternative to --model)");
    eval->add_option("--test", ev_test, "paired-format test JSONL")->required();
    eval->add_option("--novel", ev_novel, "novel words to score")->required();
    eval->add_option("--max-len", ev_max_len, "decode length cap");
    eval->add_option("--out", ev_out, "output report JSON");
    eval->callback([&] {
        std::vector<PairedExample> test = load_paired(ev_test);
        json echo{{"test", ev_test}, {"novel", ev_novel}, {"max_len", ev_max_len}};
        EvalReport report;
        if (!ev_model.empty()) {
            CaptionModel model = caption_from_checkpoint(load_checkpoint(ev_model));
            report = evaluate_run(model, test, ev_novel, ev_max_len, echo);
        } else if (!ev_hyps.empty()) {
            report = evaluate_captions(load_captions(ev_hyps), test, ev_novel, echo);
        } else {
            throw std::runtime_error("evaluate: need --model or --hyps");
        }
        write_json(report.to_json(), ev_out);
        log_info("avg F1 " + std::to_string(report.avg_f1) + ", BLEU-1 " + std::to_string(report.bleu1));
    });

    // ---- pipeline ----------------------------------------------------------
    auto* pipe = app.add_subcommand("pipeline", "run every stage from one config");
    std::string pipe_config, pipe_out = "run";
    pipe->add_option("--config", pipe_config, "run config JSON")->required();
    pipe->add_option("--out", pipe_out, "output directory");
    pipe->callback([&] {
        RunConfig cfg = RunConfig::load(pipe_config);
        run_pipeline(cfg, pipe_out);
        log_info("wrote " + PipelinePaths{pipe_out}.combined_report());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
