#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hystoc/core.hpp"

namespace hystoc {

// One slot of the network: competing tokens (eps allowed) with accumulated
// log mass. Every hypothesis contributes to every bin exactly once, either a
// token or eps, so the bin total always equals the aligned mass.
struct Bin {
    std::map<Token, LogMass> entries;

    void add(const Token & token, LogMass mass) {
        LogMass & slot = entries[token];
        slot = log_add_exp(slot, mass);
    }
};

LogMass bin_total(const Bin & bin);

struct ConfusionNetwork {
    std::string utterance_id;
    double temperature = 1.0;
    std::vector<Bin> bins;
    LogMass aligned_mass;  // log of sum over aligned hypotheses of exp(score / T)
};

struct BestPath {
    std::vector<Token> tokens;      // per-bin argmax, eps winners omitted
    std::vector<size_t> bin_index;  // source bin of each returned token
};

struct ConfidentWord {
    Token token;
    double confidence;  // posterior within the token's bin, in (0, 1]

    friend bool operator==(const ConfidentWord & a, const ConfidentWord & b) = default;
};

struct ConfidentTranscript {
    std::string utterance_id;
    std::vector<ConfidentWord> words;
};

using PosteriorBin = std::map<Token, double>;

struct RescoreWeights {
    double lm_weight = 0.0;
    double insertion_bonus = 0.0;
    double am_weight = 1.0;
};

// Accumulates hypotheses into a confusion network in exactly the given order.
// Each hypothesis contributes score/T to the bin entries its tokens align to;
// skipped bins collect the same mass on their eps entry.
ConfusionNetwork accumulate_confusion_network(std::string utterance_id,
                                              std::span<const Hypothesis> ordered,
                                              double temperature);

// Standard entry point: hypotheses taken in decreasing-score order (stable on
// ties), optionally truncated to the top_n highest-scored ones.
ConfusionNetwork build_confusion_network(const NBestList & nbest, double temperature,
                                         std::optional<size_t> top_n = std::nullopt);

// Per-bin argmax; ties prefer a non-eps token over eps, then the
// lexicographically smallest text. Eps-winning bins are omitted from the
// token sequence but bin_index still routes every returned token to its bin.
BestPath best_path(const ConfusionNetwork & cn);

// Per-bin softmax over all entries, eps included.
std::vector<PosteriorBin> normalize(const ConfusionNetwork & cn);

// Best path with each token's posterior attached.
ConfidentTranscript best_transcript(const ConfusionNetwork & cn);

// T=0 short-circuits to the top-1 hypothesis with all confidences exactly 1.0;
// T>0 builds the network and reads each best-path token's posterior.
ConfidentTranscript extract_best(const NBestList & nbest, double temperature,
                                 std::optional<size_t> top_n = std::nullopt);

// s' = am_weight*s + lm_weight*aux + insertion_bonus*len(tokens), then a
// stable re-sort by decreasing s'. aux_scores is keyed by hypothesis index.
NBestList rescore(const NBestList & nbest, const std::map<size_t, double> & aux_scores,
                  const RescoreWeights & weights);

}  // namespace hystoc
