#include "hystoc/batch.hpp"

#include <atomic>
#include <exception>
#include <stdexcept>

namespace hystoc {

void for_each_index(size_t count, ExecutionPolicy policy,
                    const std::function<void(size_t)> & fn) {
    if (policy == ExecutionPolicy::Serial) {
        for (size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }

    std::atomic<bool> failed{false};
    std::exception_ptr error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
        if (failed.load(std::memory_order_relaxed)) {
            continue;
        }
        try {
            fn(static_cast<size_t>(i));
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical(hystoc_batch_error)
#endif
            {
                if (!failed.exchange(true)) {
                    error = std::current_exception();
                }
            }
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::vector<ConfidenceResult> confidences_batch(std::span<const NBestList> lists,
                                                const ConfidenceOptions & options,
                                                ExecutionPolicy policy) {
    if (options.want_network && options.temperature == 0.0) {
        throw std::invalid_argument("no confusion network exists at temperature 0");
    }
    std::vector<ConfidenceResult> results(lists.size());
    for_each_index(lists.size(), policy, [&](size_t i) {
        if (options.temperature == 0.0) {
            results[i].best = extract_best(lists[i], 0.0, options.top_n);
            return;
        }
        ConfusionNetwork cn =
            build_confusion_network(lists[i], options.temperature, options.top_n);
        results[i].best = best_transcript(cn);
        if (options.want_network) {
            results[i].network = std::move(cn);
        }
    });
    return results;
}

std::vector<ConfidentTranscript> rover_batch(
    std::span<const std::vector<ConfidentTranscript>> groups, const RoverParams & params,
    ExecutionPolicy policy) {
    std::vector<ConfidentTranscript> results(groups.size());
    for_each_index(groups.size(), policy,
                   [&](size_t i) { results[i] = rover_fuse(groups[i], params); });
    return results;
}

std::vector<FusionResult> hystoc_fuse_batch(std::span<const std::vector<NBestList>> groups,
                                            FusionScheme scheme, double temperature,
                                            ExecutionPolicy policy) {
    std::vector<FusionResult> results(groups.size());
    for_each_index(groups.size(), policy,
                   [&](size_t i) { results[i] = hystoc_fuse(groups[i], scheme, temperature); });
    return results;
}

}  // namespace hystoc
