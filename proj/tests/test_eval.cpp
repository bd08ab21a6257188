#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "dcc/eval.h"
#include "dcc/rng.h"

using namespace dcc;

namespace {

std::vector<std::vector<TokenList>> wrap_refs(const std::vector<TokenList>& refs) {
    std::vector<std::vector<TokenList>> out;
    for (const auto& r : refs) out.push_back({r});
    return out;
}

} // namespace

TEST_CASE("f1_novel_word hand-count oracle") {
    // four examples: (gen+,ref+), (gen+,ref-), (gen-,ref+), (gen-,ref-)
    std::vector<TokenList> generated = {tokenize("a zebra here"), tokenize("zebra again"),
                                        tokenize("nothing"), tokenize("still nothing")};
    std::vector<std::vector<TokenList>> refs = {{tokenize("the zebra")},
                                                {tokenize("a field")},
                                                {tokenize("zebra grazing")},
                                                {tokenize("empty scene")}};
    WordF1 f = f1_novel_word("zebra", generated, refs);
    CHECK(f.tp == 1);
    CHECK(f.fp == 1);
    CHECK(f.fn == 1);
    CHECK(f.precision == doctest::Approx(0.5));
    CHECK(f.recall == doctest::Approx(0.5));
    CHECK(f.f1 == doctest::Approx(0.5));
}

TEST_CASE("f1_novel_word degenerate cases") {
    // the model never emits the word while references do: F1 = 0
    std::vector<TokenList> generated = {tokenize("a giraffe"), tokenize("a giraffe again")};
    std::vector<std::vector<TokenList>> refs = {{tokenize("a zebra")}, {tokenize("the zebra")}};
    WordF1 f = f1_novel_word("zebra", generated, refs);
    CHECK(f.tp == 0);
    CHECK(f.fn == 2);
    CHECK(f.f1 == 0.0);

    // nobody mentions the word anywhere: all counts zero, F1 = 0 by convention
    WordF1 g = f1_novel_word("pizza", generated, refs);
    CHECK(g.tp == 0);
    CHECK(g.fp == 0);
    CHECK(g.fn == 0);
    CHECK(g.f1 == 0.0);

    CHECK_THROWS_AS(f1_novel_word("zebra", generated, {{tokenize("a")}}), std::invalid_argument);
}

TEST_CASE("f1_novel_word matches a brute-force confusion recount on 1000 random corpora") {
    Rng rng(37);
    const std::vector<std::string> words = {"zebra", "pizza", "field", "table"};
    for (int trial = 0; trial < 1000; ++trial) {
        const size_t n = 1 + rng.uniform_index(12);
        std::vector<TokenList> generated(n);
        std::vector<std::vector<TokenList>> refs(n);
        auto random_sentence = [&] {
            TokenList s;
            const size_t len = rng.uniform_index(5);
            for (size_t i = 0; i < len; ++i) s.push_back(words[rng.uniform_index(words.size())]);
            return s;
        };
        for (size_t i = 0; i < n; ++i) {
            generated[i] = random_sentence();
            const size_t r = 1 + rng.uniform_index(3);
            for (size_t k = 0; k < r; ++k) refs[i].push_back(random_sentence());
        }
        const std::string& word = words[rng.uniform_index(words.size())];
        WordF1 f = f1_novel_word(word, generated, refs);

        long tp = 0, fp = 0, fn = 0;
        for (size_t i = 0; i < n; ++i) {
            bool gen_pos = std::count(generated[i].begin(), generated[i].end(), word) > 0;
            bool ref_pos = false;
            for (const auto& r : refs[i]) ref_pos = ref_pos || std::count(r.begin(), r.end(), word) > 0;
            tp += gen_pos && ref_pos;
            fp += gen_pos && !ref_pos;
            fn += !gen_pos && ref_pos;
        }
        CHECK(f.tp == tp);
        CHECK(f.fp == fp);
        CHECK(f.fn == fn);
        double p = tp + fp ? double(tp) / (tp + fp) : 0.0;
        double r = tp + fn ? double(tp) / (tp + fn) : 0.0;
        double expect = tp ? 2 * p * r / (p + r) : 0.0;
        CHECK(f.f1 == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("bleu1 hand computations") {
    // exact match
    CHECK(bleu1({tokenize("a zebra")}, wrap_refs({tokenize("a zebra")})) == doctest::Approx(1.0));

    // clipping: hyp "a a a" vs ref "a b": one clipped match out of three,
    // c=3 > r=2 so no brevity penalty
    CHECK(bleu1({tokenize("a a a")}, wrap_refs({tokenize("a b")})) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-6));

    // brevity penalty: hyp "a" vs ref "a b c": precision 1, BP = e^(1-3)
    CHECK(bleu1({tokenize("a")}, wrap_refs({tokenize("a b c")})) ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-4));

    CHECK_THROWS_AS(bleu1({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(bleu1({tokenize("a")}, {}), std::invalid_argument);
    CHECK_THROWS_AS(bleu1({tokenize("a")}, {{}}), std::invalid_argument);
}

TEST_CASE("bleu1 closest-reference length ties go to the shorter reference") {
    // hyp length 2; references of lengths 1 and 3 are equally close: r = 1,
    // so c=2 >= r=1 and BP stays 1
    std::vector<std::vector<TokenList>> refs = {{tokenize("a"), tokenize("a b c")}};
    CHECK(bleu1({tokenize("a b")}, refs) == doctest::Approx(1.0));

    // flip so the tie matters against the hypothesis: hyp length 2 with refs
    // of lengths 3 and 1 in the other order gives the same result
    std::vector<std::vector<TokenList>> swapped = {{tokenize("a b c"), tokenize("a")}};
    CHECK(bleu1({tokenize("a b")}, swapped) == doctest::Approx(1.0));
}

TEST_CASE("bleu1 and f1 are invariant under example permutation; bleu1 stays in [0,1]") {
    Rng rng(41);
    const std::vector<std::string> words = {"zebra", "field", "a", "the", "grazing"};
    for (int trial = 0; trial < 200; ++trial) {
        const size_t n = 2 + rng.uniform_index(8);
        std::vector<TokenList> hyps(n);
        std::vector<std::vector<TokenList>> refs(n);
        auto random_sentence = [&] {
            TokenList s;
            const size_t len = 1 + rng.uniform_index(5);
            for (size_t i = 0; i < len; ++i) s.push_back(words[rng.uniform_index(words.size())]);
            return s;
        };
        for (size_t i = 0; i < n; ++i) {
            hyps[i] = random_sentence();
            const size_t r = 1 + rng.uniform_index(3);
            for (size_t k = 0; k < r; ++k) refs[i].push_back(random_sentence());
        }
        const double b = bleu1(hyps, refs);
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
        const WordF1 f = f1_novel_word("zebra", hyps, refs);

        std::vector<size_t> perm(n);
        for (size_t i = 0; i < n; ++i) perm[i] = i;
        rng.shuffle(perm);
        std::vector<TokenList> hyps_p(n);
        std::vector<std::vector<TokenList>> refs_p(n);
        for (size_t i = 0; i < n; ++i) {
            hyps_p[i] = hyps[perm[i]];
            refs_p[i] = refs[perm[i]];
        }
        CHECK(bleu1(hyps_p, refs_p) == doctest::Approx(b).epsilon(1e-12));
        const WordF1 fp = f1_novel_word("zebra", hyps_p, refs_p);
        CHECK(fp.tp == f.tp);
        CHECK(fp.fp == f.fp);
        CHECK(fp.fn == f.fn);
    }
}

TEST_CASE("evaluate_captions: metric monotonicity on constructed outputs") {
    std::vector<PairedExample> test(4);
    test[0].captions = {tokenize("a zebra grazing")};
    test[1].captions = {tokenize("a zebra in the field")};
    test[2].captions = {tokenize("a giraffe grazing")};
    test[3].captions = {tokenize("fresh pizza on the table")};
    for (auto& ex : test) ex.features = Tensor({2});

    // model A emits the held-out words exactly where the references do;
    // model B never does
    std::vector<TokenList> good = {tokenize("a zebra grazing"), tokenize("a zebra in the field"),
                                   tokenize("a giraffe grazing"), tokenize("fresh pizza on the table")};
    std::vector<TokenList> bad = {tokenize("a giraffe grazing"), tokenize("a giraffe in the field"),
                                  tokenize("a giraffe grazing"), tokenize("a sandwich on the table")};
    EvalReport a = evaluate_captions(good, test, {"zebra", "pizza"}, {});
    EvalReport c = evaluate_captions(bad, test, {"zebra", "pizza"}, {});
    CHECK(a.avg_f1 > c.avg_f1);
    CHECK(a.avg_f1 == doctest::Approx(1.0));
    CHECK(c.avg_f1 == doctest::Approx(0.0));

    // the average is the unweighted mean of the per-word scores
    CHECK(a.avg_f1 ==
          doctest::Approx((a.per_word.at("zebra").f1 + a.per_word.at("pizza").f1) / 2.0));

    CHECK_THROWS_WITH_AS(evaluate_captions({good[0]}, test, {"zebra"}, {}),
                         doctest::Contains("aligned"), std::invalid_argument);
}

TEST_CASE("report json round-trips losslessly") {
    std::vector<PairedExample> test(2);
    test[0].captions = {tokenize("a zebra")};
    test[1].captions = {tokenize("a pizza")};
    for (auto& ex : test) ex.features = Tensor({2});
    std::vector<TokenList> hyps = {tokenize("a zebra"), tokenize("a sandwich")};
    EvalReport report = evaluate_captions(hyps, test, {"zebra", "pizza"},
                                          nlohmann::json{{"max_len", 12}});

    nlohmann::json j = report.to_json();
    EvalReport back = EvalReport::from_json(j);
    CHECK(back.to_json().dump() == j.dump());
    CHECK(back.avg_f1 == report.avg_f1);
    CHECK(back.bleu1 == report.bleu1);
    CHECK(back.per_word.at("zebra").tp == report.per_word.at("zebra").tp);
}
