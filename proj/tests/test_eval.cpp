#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "hystoc/align.hpp"
#include "hystoc/eval.hpp"
#include "test_util.hpp"

using namespace hystoc;
using hystoc::testutil::toks;

namespace {

ConfidentTranscript conf_transcript(const std::string & id,
                                    const std::vector<std::pair<std::string, double>> & words) {
    ConfidentTranscript t;
    t.utterance_id = id;
    for (const auto & [word, conf] : words) {
        t.words.push_back({Token::word(word), conf});
    }
    return t;
}

}  // namespace

TEST_SUITE_BEGIN("eval");

TEST_CASE("corpus WER on a one-utterance example") {
    const TranscriptMap refs = {{"u", toks("a b c")}};
    const TranscriptMap hyps = {{"u", toks("a x c d")}};
    const WerReport report = corpus_wer(refs, hyps);
    CHECK(report.substitutions == 1);
    CHECK(report.deletions == 0);
    CHECK(report.insertions == 1);
    CHECK(report.ref_words == 3);
    CHECK(report.wer == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("perfect hypotheses score zero") {
    const TranscriptMap refs = {{"u1", toks("a b")}, {"u2", toks("c")}};
    const WerReport report = corpus_wer(refs, refs);
    CHECK(report.wer == 0.0);
    CHECK(report.substitutions + report.deletions + report.insertions == 0);
    CHECK(report.ref_words == 3);
}

TEST_CASE("an empty hypothesis is pure deletion") {
    const TranscriptMap refs = {{"u", toks("a b c")}};
    const TranscriptMap hyps = {{"u", {}}};
    const WerReport report = corpus_wer(refs, hyps);
    CHECK(report.deletions == 3);
    CHECK(report.wer == 1.0);
}

TEST_CASE("references with no hypothesis count as all deletions") {
    const TranscriptMap refs = {{"u1", toks("a b")}, {"u2", toks("c")}};
    const TranscriptMap hyps = {{"u1", toks("a b")}};
    const WerReport report = corpus_wer(refs, hyps);
    CHECK(report.deletions == 1);
    CHECK(report.wer == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("WER validates its inputs") {
    const TranscriptMap refs = {{"u", toks("a")}};
    const TranscriptMap stray = {{"other", toks("a")}};
    CHECK_THROWS_AS(corpus_wer(refs, stray), std::invalid_argument);

    const TranscriptMap empty_ref = {{"u", {}}};
    const TranscriptMap hyps = {{"u", toks("a")}};
    CHECK_THROWS_AS(corpus_wer(empty_ref, hyps), std::invalid_argument);
}

TEST_CASE("correctness marking follows the alignment") {
    const auto scored =
        mark_correctness(toks("a b c"), conf_transcript("u", {{"a", 0.9}, {"x", 0.4}, {"c", 0.8}}));
    REQUIRE(scored.size() == 3);
    CHECK(scored[0].confidence == 0.9);
    CHECK(scored[0].correct);
    CHECK(scored[1].confidence == 0.4);
    CHECK(!scored[1].correct);
    CHECK(scored[2].confidence == 0.8);
    CHECK(scored[2].correct);
}

TEST_CASE("identical hypothesis is all correct, pure insertion all wrong") {
    const auto all_good =
        mark_correctness(toks("a b"), conf_transcript("u", {{"a", 0.5}, {"b", 0.6}}));
    REQUIRE(all_good.size() == 2);
    CHECK(all_good[0].correct);
    CHECK(all_good[1].correct);

    const auto inserted = mark_correctness({}, conf_transcript("u", {{"z", 0.5}}));
    REQUIRE(inserted.size() == 1);
    CHECK(inserted[0].confidence == 0.5);
    CHECK(!inserted[0].correct);
}

TEST_CASE("deletions leave no scored entry") {
    const auto scored = mark_correctness(toks("a b c"), conf_transcript("u", {{"a", 0.9}}));
    REQUIRE(scored.size() == 1);  // b and c were deleted
    CHECK(scored[0].correct);
}

TEST_CASE("marking properties against the error counts") {
    std::mt19937 rng(31);
    std::uniform_int_distribution<size_t> pick_len(0, 8);
    std::uniform_int_distribution<int> pick_letter(0, 2);
    std::uniform_real_distribution<double> pick_conf(0.01, 1.0);
    for (int round = 0; round < 300; ++round) {
        std::vector<Token> ref;
        const size_t ref_len = pick_len(rng);
        for (size_t i = 0; i < ref_len; ++i) {
            ref.push_back(Token::word(std::string(1, static_cast<char>('a' + pick_letter(rng)))));
        }
        ConfidentTranscript hyp;
        hyp.utterance_id = "u";
        const size_t hyp_len = pick_len(rng);
        std::vector<Token> hyp_tokens;
        for (size_t i = 0; i < hyp_len; ++i) {
            const Token t = Token::word(std::string(1, static_cast<char>('a' + pick_letter(rng))));
            hyp_tokens.push_back(t);
            hyp.words.push_back({t, pick_conf(rng)});
        }

        const auto scored = mark_correctness(ref, hyp);
        CHECK(scored.size() == hyp_len);  // one entry per hypothesis token

        size_t wrong = 0;
        for (const ScoredToken & token : scored) {
            if (!token.correct) ++wrong;
        }
        const ErrorCounts counts = word_error_count(ref, hyp_tokens);
        CHECK(wrong == counts.substitutions + counts.insertions);
    }
}

TEST_CASE("calibration cohorts on tiny examples") {
    const auto one = calibration_cohorts({{0.9, true}, {0.1, false}}, 2);
    REQUIRE(one.size() == 1);
    CHECK(one[0].cohort_index == 0);
    CHECK(one[0].median_confidence == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(one[0].accuracy == 0.5);
    CHECK(one[0].count == 2);

    const auto two = calibration_cohorts(
        {{0.2, false}, {0.4, false}, {0.6, true}, {0.8, true}}, 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0].median_confidence == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(two[0].accuracy == 0.0);
    CHECK(two[1].median_confidence == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(two[1].accuracy == 1.0);
}

TEST_CASE("cohorts sort by confidence before chunking") {
    const auto cohorts = calibration_cohorts(
        {{0.8, true}, {0.1, false}, {0.9, true}, {0.2, false}}, 2);
    REQUIRE(cohorts.size() == 2);
    CHECK(cohorts[0].accuracy == 0.0);  // the two low-confidence wrong tokens
    CHECK(cohorts[1].accuracy == 1.0);
    CHECK(cohorts[0].median_confidence < cohorts[1].median_confidence);
}

TEST_CASE("odd cohorts take the central value as median") {
    const auto cohorts = calibration_cohorts({{0.2, true}, {0.9, true}, {0.4, true}}, 3);
    REQUIRE(cohorts.size() == 1);
    CHECK(cohorts[0].median_confidence == 0.4);
    CHECK(cohorts[0].accuracy == 1.0);
}

TEST_CASE("the trailing partial cohort is kept with its true count") {
    std::vector<ScoredToken> scored;
    for (int i = 0; i < 5; ++i) {
        scored.push_back({0.1 * (i + 1), true});
    }
    const auto cohorts = calibration_cohorts(scored, 2);
    REQUIRE(cohorts.size() == 3);
    CHECK(cohorts[0].count == 2);
    CHECK(cohorts[1].count == 2);
    CHECK(cohorts[2].count == 1);
    CHECK(cohorts[2].median_confidence == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("uniform all-correct input gives flat cohorts") {
    const std::vector<ScoredToken> scored(7, ScoredToken{0.8, true});
    const auto cohorts = calibration_cohorts(scored, 3);
    REQUIRE(cohorts.size() == 3);
    for (const CalibrationCohort & cohort : cohorts) {
        CHECK(cohort.median_confidence == 0.8);
        CHECK(cohort.accuracy == 1.0);
    }
}

TEST_CASE("cohort counts always sum to the token count") {
    std::mt19937 rng(32);
    std::uniform_real_distribution<double> pick_conf(0.0, 1.0);
    for (int round = 0; round < 50; ++round) {
        const size_t n = 1 + rng() % 200;
        std::vector<ScoredToken> scored;
        for (size_t i = 0; i < n; ++i) {
            scored.push_back({pick_conf(rng), rng() % 2 == 0});
        }
        const size_t cohort_size = 1 + rng() % 50;
        const auto cohorts = calibration_cohorts(scored, cohort_size);
        size_t total = 0;
        for (size_t i = 0; i < cohorts.size(); ++i) {
            CHECK(cohorts[i].cohort_index == i);
            total += cohorts[i].count;
        }
        CHECK(total == n);
    }
}

TEST_CASE("calibration validates its inputs") {
    CHECK_THROWS_AS(calibration_cohorts({}, 10), std::invalid_argument);
    CHECK_THROWS_AS(calibration_cohorts({{0.5, true}}, 0), std::invalid_argument);
}

TEST_SUITE_END();
