#include "hystoc/eval.hpp"

#include <algorithm>
#include <stdexcept>

#include "hystoc/align.hpp"

namespace hystoc {

WerReport corpus_wer(const TranscriptMap & refs, const TranscriptMap & hyps) {
    WerReport report;
    for (const auto & [utt, hyp_tokens] : hyps) {
        if (!refs.contains(utt)) {
            throw std::invalid_argument("hypothesis utterance '" + utt + "' has no reference");
        }
    }
    for (const auto & [utt, ref_tokens] : refs) {
        report.ref_words += ref_tokens.size();
        const auto hyp = hyps.find(utt);
        if (hyp == hyps.end()) {
            report.deletions += ref_tokens.size();
            continue;
        }
        const ErrorCounts counts = word_error_count(ref_tokens, hyp->second);
        report.substitutions += counts.substitutions;
        report.deletions += counts.deletions;
        report.insertions += counts.insertions;
    }
    if (report.ref_words == 0) {
        throw std::invalid_argument("WER undefined: reference has zero words");
    }
    report.wer = static_cast<double>(report.substitutions + report.deletions + report.insertions) /
                 static_cast<double>(report.ref_words);
    return report;
}

std::vector<ScoredToken> mark_correctness(std::span<const Token> ref,
                                          const ConfidentTranscript & hyp) {
    std::vector<Token> hyp_tokens;
    hyp_tokens.reserve(hyp.words.size());
    for (const ConfidentWord & word : hyp.words) {
        hyp_tokens.push_back(word.token);
    }
    const EditScript script = levenshtein_align(hyp_tokens, ref);

    std::vector<ScoredToken> scored;
    scored.reserve(hyp.words.size());
    for (const EditOp & op : script.ops) {
        if (!op.hyp_index) {
            continue;  // deletions are not captured
        }
        scored.push_back({hyp.words[*op.hyp_index].confidence, op.kind == EditKind::Match});
    }
    return scored;
}

std::vector<CalibrationCohort> calibration_cohorts(std::vector<ScoredToken> scored,
                                                   size_t cohort_size) {
    if (scored.empty()) {
        throw std::invalid_argument("calibration needs at least one scored token");
    }
    if (cohort_size == 0) {
        throw std::invalid_argument("cohort size must be positive");
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const ScoredToken & a, const ScoredToken & b) {
                         return a.confidence < b.confidence;
                     });

    std::vector<CalibrationCohort> cohorts;
    for (size_t start = 0; start < scored.size(); start += cohort_size) {
        const size_t count = std::min(cohort_size, scored.size() - start);
        CalibrationCohort cohort;
        cohort.cohort_index = cohorts.size();
        cohort.count = count;
        const size_t mid = start + count / 2;
        cohort.median_confidence =
            count % 2 == 1 ? scored[mid].confidence
                           : 0.5 * (scored[mid - 1].confidence + scored[mid].confidence);
        size_t correct = 0;
        for (size_t i = start; i < start + count; ++i) {
            if (scored[i].correct) ++correct;
        }
        cohort.accuracy = static_cast<double>(correct) / static_cast<double>(count);
        cohorts.push_back(cohort);
    }
    return cohorts;
}

}  // namespace hystoc
