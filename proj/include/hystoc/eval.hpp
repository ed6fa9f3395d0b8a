#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hystoc/confnet.hpp"
#include "hystoc/core.hpp"

namespace hystoc {

struct WerReport {
    size_t substitutions = 0;
    size_t deletions = 0;
    size_t insertions = 0;
    size_t ref_words = 0;
    double wer = 0.0;  // (S+D+I) / ref_words
};

using TranscriptMap = std::map<std::string, std::vector<Token>>;

// Corpus-level S/D/I summed over utterances. Every hypothesis utterance must
// be present in refs; references with no hypothesis count as all deletions.
WerReport corpus_wer(const TranscriptMap & refs, const TranscriptMap & hyps);

struct ScoredToken {
    double confidence;
    bool correct;
};

// One entry per hypothesis token, in hypothesis order: Match tokens are
// correct, Substitute and Insert tokens are not. Deletions produce no entry.
std::vector<ScoredToken> mark_correctness(std::span<const Token> ref,
                                          const ConfidentTranscript & hyp);

struct CalibrationCohort {
    size_t cohort_index = 0;
    double median_confidence = 0.0;
    double accuracy = 0.0;  // correct / count, exact
    size_t count = 0;
};

// Sorts tokens by ascending confidence (stable) and chunks them into cohorts
// of cohort_size; the trailing partial cohort is kept and carries its true
// count. Median of an even cohort is the mean of the two central values.
std::vector<CalibrationCohort> calibration_cohorts(std::vector<ScoredToken> scored,
                                                   size_t cohort_size);

}  // namespace hystoc
