#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hystoc/confnet.hpp"
#include "hystoc/core.hpp"
#include "hystoc/fusion.hpp"

namespace hystoc {

// Utterances are independent, so per-utterance work fans out across OpenMP
// threads; the serial path runs the identical kernel in a plain loop and is
// the reference the parallel path is checked against.
enum class ExecutionPolicy { Serial, Parallel };

// Calls fn(0..count-1); with Parallel the iterations run on OpenMP threads
// and the first exception is rethrown after the loop joins.
void for_each_index(size_t count, ExecutionPolicy policy,
                    const std::function<void(size_t)> & fn);

struct ConfidenceOptions {
    double temperature = 1.0;
    std::optional<size_t> top_n;
    bool want_network = false;  // keep the confusion network (requires T > 0)
};

struct ConfidenceResult {
    ConfidentTranscript best;
    std::optional<ConfusionNetwork> network;
};

std::vector<ConfidenceResult> confidences_batch(std::span<const NBestList> lists,
                                                const ConfidenceOptions & options,
                                                ExecutionPolicy policy);

// One group per utterance, one transcript per system within a group.
std::vector<ConfidentTranscript> rover_batch(
    std::span<const std::vector<ConfidentTranscript>> groups, const RoverParams & params,
    ExecutionPolicy policy);

// One group per utterance, one n-best list per system within a group.
std::vector<FusionResult> hystoc_fuse_batch(std::span<const std::vector<NBestList>> groups,
                                            FusionScheme scheme, double temperature,
                                            ExecutionPolicy policy);

}  // namespace hystoc
