#pragma once

#include <span>
#include <string_view>

#include "hystoc/confnet.hpp"
#include "hystoc/core.hpp"

namespace hystoc {

struct RoverParams {
    double alpha = 0.5;           // vote-vs-confidence interpolation, in [0,1]
    double eps_confidence = 0.0;  // confidence assigned to eps slots, in [0,1]
};

enum class FusionScheme { Direct, Normalized, NormalizedRoundRobin };

FusionScheme parse_fusion_scheme(std::string_view name);
std::string_view fusion_scheme_name(FusionScheme scheme);

// Confidence-weighted voting over 1-best transcripts sharing an utterance.
// Transcripts are aligned into a voting network in input order; each slot
// holds one (word-or-eps, confidence) vote per system. The winner maximizes
// alpha * votes/N + (1-alpha) * mean confidence; eps competes with
// eps_confidence and winning eps slots are dropped from the output.
ConfidentTranscript rover_fuse(std::span<const ConfidentTranscript> transcripts,
                               const RoverParams & params);

struct FusionResult {
    ConfusionNetwork cn;
    ConfidentTranscript best;
};

// Pools the systems' hypotheses into one confusion network. Direct keeps the
// raw scores and sorts the pool by score; Normalized first log-softmaxes each
// system's scores so its hypotheses carry unit total mass; the round-robin
// variant additionally aligns rank-major (all rank-1 hypotheses first).
FusionResult hystoc_fuse(std::span<const NBestList> systems, FusionScheme scheme,
                         double temperature);

}  // namespace hystoc
