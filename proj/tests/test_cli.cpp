#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = DCC_CLI_PATH;

struct CmdResult {
    int exit_code;
    std::string output;
};

CmdResult run_cli(const std::string& args, const std::string& env = "") {
    const std::string out_path = (fs::temp_directory_path() / "dcc_cli_out.txt").string();
    const std::string cmd = env + kCli + " " + args + " > " + out_path + " 2>&1";
    int status = std::system(cmd.c_str());
    std::ifstream in(out_path);
    std::string output((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    int code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    return {code, output};
}

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

fs::path work_dir() {
    fs::path dir = fs::temp_directory_path() / "dcc_cli_work";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_micro_config(const fs::path& dir) {
    json cfg = {
        {"seed", 42},
        {"data",
         {{"num_concepts", 12},
          {"feature_dim", 16},
          {"num_paired", 100},
          {"num_unpaired_images", 80},
          {"num_unpaired_text", 400},
          {"num_test", 40},
          {"noise_stddev", 0.05},
          {"heldout", {"zebra", "pizza"}},
          {"max_frames", 0}}},
        {"mine", {{"top_k", 10}}},
        {"embeddings", {{"dim", 12}, {"window", 2}, {"epochs", 4}, {"lr", 0.05}}},
        {"lexical", {{"hidden", 0}, {"epochs", 4}, {"lr", 0.5}}},
        {"langmodel", {{"embed_dim", 10}, {"hidden_dim", 16}, {"epochs", 2}, {"lr", 0.2}, {"clip", 5.0}}},
        {"caption", {{"epochs", 4}, {"lr", 0.25}, {"clip", 5.0}}},
        {"transfer", {{"n", 1}}},
        {"generate", {{"max_len", 12}}},
    };
    std::string path = (dir / "micro.json").string();
    std::ofstream out(path);
    out << cfg.dump(2);
    return path;
}

} // namespace

TEST_CASE("unknown flags exit 2 with usage text") {
    CmdResult r = run_cli("synth --definitely-not-a-flag");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("Usage") != std::string::npos);

    CmdResult no_sub = run_cli("");
    CHECK(no_sub.exit_code == 2);
}

TEST_CASE("stage failures exit 1 with a one-line diagnostic") {
    CmdResult r = run_cli("train-lm --text /nonexistent.txt --out /tmp/never.ckpt");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("synth + mine-concepts + pipeline determinism end to end") {
    fs::path dir = work_dir();
    std::string cfg = write_micro_config(dir);

    // synth writes the five dataset files
    CmdResult synth = run_cli("synth --config " + cfg + " --out " + (dir / "data").string());
    REQUIRE(synth.exit_code == 0);
    for (const char* f : {"paired.jsonl", "unpaired_images.jsonl", "unpaired_text.txt", "concepts.json",
                          "test.jsonl"}) {
        CHECK(fs::exists(dir / "data" / f));
    }

    // mining the paired captions recovers the ten paired concepts
    CmdResult mine = run_cli("mine-concepts --paired " + (dir / "data" / "paired.jsonl").string() +
                             " --top-k 10 --extra zebra pizza --out " + (dir / "mined.json").string());
    REQUIRE(mine.exit_code == 0);
    std::ifstream mined_in((dir / "mined.json").string());
    json mined;
    mined_in >> mined;
    CHECK(mined.at("concepts").size() == 12);
    CHECK(mined.at("novel") == json({"zebra", "pizza"}));

    // two pipeline runs: byte-identical reports and checkpoints
    CmdResult p1 = run_cli("pipeline --config " + cfg + " --out " + (dir / "r1").string());
    REQUIRE(p1.exit_code == 0);
    CmdResult p2 = run_cli("pipeline --config " + cfg + " --out " + (dir / "r2").string());
    REQUIRE(p2.exit_code == 0);
    for (const char* f : {"report.json", "caption_direct.ckpt", "caption_delta.ckpt",
                          "caption_direct_transferred.ckpt", "caption_delta_transferred.ckpt",
                          "lm.ckpt", "lex.ckpt", "embeddings.tsv"}) {
        CAPTURE(f);
        CHECK(file_bytes((dir / "r1" / f).string()) == file_bytes((dir / "r2" / f).string()));
    }

    // DCC_SEED overrides the config seed and changes the artifacts
    CmdResult p3 = run_cli("pipeline --config " + cfg + " --out " + (dir / "r3").string(),
                           "DCC_SEED=7 ");
    REQUIRE(p3.exit_code == 0);
    CHECK(file_bytes((dir / "r1" / "lm.ckpt").string()) != file_bytes((dir / "r3" / "lm.ckpt").string()));

    // evaluate with pre-generated captions of the wrong length: aligned-length error, exit 1
    {
        std::ofstream hyp((dir / "short.jsonl").string());
        hyp << R"({"id":"t00000","tokens":["a","zebra"]})" << "\n";
    }
    CmdResult ev = run_cli("evaluate --hyps " + (dir / "short.jsonl").string() + " --test " +
                           (dir / "data" / "test.jsonl").string() + " --novel zebra pizza --out " +
                           (dir / "bad_report.json").string());
    CHECK(ev.exit_code == 1);
    CHECK(ev.output.find("aligned") != std::string::npos);

    // evaluate against a transferred checkpoint works standalone
    CmdResult ev2 = run_cli("evaluate --model " + (dir / "r1" / "caption_direct_transferred.ckpt").string() +
                            " --test " + (dir / "data" / "test.jsonl").string() +
                            " --novel zebra pizza --out " + (dir / "report_eval.json").string());
    REQUIRE(ev2.exit_code == 0);
    std::ifstream rep_in((dir / "report_eval.json").string());
    json rep;
    rep_in >> rep;
    CHECK(rep.contains("per_word"));
    CHECK(rep.contains("avg_f1"));
    CHECK(rep.contains("bleu1"));

    // generate writes one caption per input line
    CmdResult gen = run_cli("generate --model " + (dir / "r1" / "caption_direct.ckpt").string() +
                            " --input " + (dir / "data" / "test.jsonl").string() + " --max-len 12 --out " +
                            (dir / "gen.jsonl").string());
    REQUIRE(gen.exit_code == 0);
    std::ifstream gen_in((dir / "gen.jsonl").string());
    size_t lines = 0;
    std::string line;
    while (std::getline(gen_in, line)) lines += !line.empty();
    CHECK(lines == 40);

    // corrupt checkpoint: exit 1, "not a checkpoint"
    {
        std::ofstream bad((dir / "bad.ckpt").string(), std::ios::binary);
        bad << "JUNKJUNKJUNK";
    }
    CmdResult corrupt = run_cli("generate --model " + (dir / "bad.ckpt").string() + " --input " +
                                (dir / "data" / "test.jsonl").string());
    CHECK(corrupt.exit_code == 1);
    CHECK(corrupt.output.find("not a checkpoint") != std::string::npos);

    fs::remove_all(dir);
}

TEST_CASE("stagewise run matches the pipeline's artifacts") {
    fs::path dir = work_dir();
    std::string cfg = write_micro_config(dir);
    REQUIRE(run_cli("pipeline --config " + cfg + " --out " + (dir / "pipe").string()).exit_code == 0);

    // re-run the language model stage by hand with the pipeline's derived
    // seed (master 42 + offset 3) and compare checkpoints byte for byte
    CmdResult lm = run_cli("train-lm --text " + (dir / "pipe" / "unpaired_text.txt").string() +
                           " --embed-dim 10 --hidden-dim 16 --epochs 2 --lr 0.2 --clip 5.0 --seed 45" +
                           " --out " + (dir / "lm_manual.ckpt").string());
    REQUIRE(lm.exit_code == 0);

    // tensors must match; manifests differ in config echo, so compare the
    // loadable content via a fresh evaluate-free comparison of file sizes
    // only after stripping: simplest check is that both load and agree on
    // the blob bytes after the manifest
    std::string a = file_bytes((dir / "pipe" / "lm.ckpt").string());
    std::string b = file_bytes((dir / "lm_manual.ckpt").string());
    auto blob_tail = [](const std::string& bytes) {
        uint32_t mlen = static_cast<uint8_t>(bytes[8]) | (static_cast<uint8_t>(bytes[9]) << 8) |
                        (static_cast<uint8_t>(bytes[10]) << 16) | (static_cast<uint8_t>(bytes[11]) << 24);
        return bytes.substr(12 + mlen);
    };
    CHECK(blob_tail(a) == blob_tail(b));
    fs::remove_all(dir);
}
