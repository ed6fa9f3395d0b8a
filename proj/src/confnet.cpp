#include "hystoc/confnet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hystoc/align.hpp"

namespace hystoc {

LogMass bin_total(const Bin & bin) {
    LogMass total = LogMass::zero();
    for (const auto & [token, mass] : bin.entries) {
        total = log_add_exp(total, mass);
    }
    return total;
}

namespace {

// Aligns one hypothesis against the current best path and distributes its
// mass: matched/substituted tokens into existing bins, deletions onto eps,
// insertions into fresh bins seeded with a retroactive eps carrying the whole
// previously aligned mass. Bins the script never reaches (eps winners absent
// from the best path) collect eps mass too, keeping every bin total equal.
void align_into(ConfusionNetwork & cn, std::span<const Token> tokens, LogMass contrib) {
    const BestPath path = best_path(cn);
    const EditScript script = levenshtein_align(tokens, path.tokens);

    const size_t orig_count = cn.bins.size();
    std::vector<char> touched(orig_count, 0);

    struct PendingBin {
        size_t before_orig;  // insertion point in original bin numbering
        Bin bin;
    };
    std::vector<PendingBin> inserted;

    size_t ref_cursor = 0;
    for (const EditOp & op : script.ops) {
        switch (op.kind) {
            case EditKind::Match:
            case EditKind::Substitute: {
                const size_t bin = path.bin_index[*op.ref_index];
                cn.bins[bin].add(tokens[*op.hyp_index], contrib);
                touched[bin] = 1;
                ref_cursor = *op.ref_index + 1;
                break;
            }
            case EditKind::Delete: {
                const size_t bin = path.bin_index[*op.ref_index];
                cn.bins[bin].add(Token::eps(), contrib);
                touched[bin] = 1;
                ref_cursor = *op.ref_index + 1;
                break;
            }
            case EditKind::Insert: {
                const size_t before =
                    ref_cursor < path.bin_index.size() ? path.bin_index[ref_cursor] : orig_count;
                Bin bin;
                bin.add(tokens[*op.hyp_index], contrib);
                bin.add(Token::eps(), cn.aligned_mass);
                inserted.push_back({before, std::move(bin)});
                break;
            }
        }
    }
    if (ref_cursor != path.tokens.size()) {
        throw std::logic_error("edit script did not consume the whole best path");
    }

    // every best-path bin must have been reached by the complete script
    for (size_t b : path.bin_index) {
        if (!touched[b]) {
            throw std::logic_error("best-path bin skipped by edit script");
        }
    }
    for (size_t b = 0; b < orig_count; ++b) {
        if (!touched[b]) {
            cn.bins[b].add(Token::eps(), contrib);
        }
    }

    if (!inserted.empty()) {
        // insertion points are nondecreasing in script order, consecutive
        // inserts land in hypothesis order
        std::vector<Bin> rebuilt;
        rebuilt.reserve(orig_count + inserted.size());
        size_t next = 0;
        for (size_t o = 0; o <= orig_count; ++o) {
            while (next < inserted.size() && inserted[next].before_orig == o) {
                rebuilt.push_back(std::move(inserted[next].bin));
                ++next;
            }
            if (o < orig_count) {
                rebuilt.push_back(std::move(cn.bins[o]));
            }
        }
        cn.bins = std::move(rebuilt);
    }
}

void check_score(double score) {
    if (!std::isfinite(score)) {
        throw std::invalid_argument("hypothesis score must be finite");
    }
}

}  // namespace

ConfusionNetwork accumulate_confusion_network(std::string utterance_id,
                                              std::span<const Hypothesis> ordered,
                                              double temperature) {
    if (!(temperature > 0.0)) {
        throw std::invalid_argument("temperature must be > 0 to build a confusion network");
    }
    if (ordered.empty()) {
        throw std::invalid_argument("confusion network needs at least one hypothesis");
    }

    ConfusionNetwork cn;
    cn.utterance_id = std::move(utterance_id);
    cn.temperature = temperature;

    bool first = true;
    for (const Hypothesis & hyp : ordered) {
        check_score(hyp.score);
        const LogMass contrib = LogMass::from_log(hyp.score / temperature);
        if (first) {
            cn.bins.reserve(hyp.tokens.size());
            for (const Token & token : hyp.tokens) {
                Bin bin;
                bin.add(token, contrib);
                cn.bins.push_back(std::move(bin));
            }
            first = false;
        } else {
            align_into(cn, hyp.tokens, contrib);
        }
        cn.aligned_mass = log_add_exp(cn.aligned_mass, contrib);
    }
    return cn;
}

ConfusionNetwork build_confusion_network(const NBestList & nbest, double temperature,
                                         std::optional<size_t> top_n) {
    if (top_n && *top_n == 0) {
        throw std::invalid_argument("top_n must be positive");
    }
    NBestList ordered = nbest;
    ordered.sort_hypotheses();
    size_t count = ordered.hypotheses.size();
    if (top_n && *top_n < count) {
        count = *top_n;
    }
    return accumulate_confusion_network(
        ordered.utterance_id, std::span<const Hypothesis>(ordered.hypotheses.data(), count),
        temperature);
}

BestPath best_path(const ConfusionNetwork & cn) {
    BestPath path;
    for (size_t b = 0; b < cn.bins.size(); ++b) {
        const auto & entries = cn.bins[b].entries;
        if (entries.empty()) {
            throw std::logic_error("confusion network bin has no entries");
        }
        // map order is eps first, then lexicographic, so keeping the first
        // strict maximum realizes the lexicographic tie-break; an equal-mass
        // non-eps entry still displaces an eps incumbent
        auto best = entries.begin();
        for (auto it = std::next(entries.begin()); it != entries.end(); ++it) {
            if (it->second.log_value > best->second.log_value ||
                (it->second.log_value == best->second.log_value && best->first.is_eps())) {
                best = it;
            }
        }
        if (!best->first.is_eps()) {
            path.tokens.push_back(best->first);
            path.bin_index.push_back(b);
        }
    }
    return path;
}

std::vector<PosteriorBin> normalize(const ConfusionNetwork & cn) {
    std::vector<PosteriorBin> out;
    out.reserve(cn.bins.size());
    std::vector<LogMass> masses;
    for (const Bin & bin : cn.bins) {
        if (bin.entries.empty()) {
            throw std::logic_error("confusion network bin has no entries");
        }
        masses.clear();
        for (const auto & [token, mass] : bin.entries) {
            masses.push_back(mass);
        }
        const std::vector<double> probs = softmax(masses);
        PosteriorBin posterior;
        size_t i = 0;
        for (const auto & [token, mass] : bin.entries) {
            posterior.emplace(token, probs[i++]);
        }
        out.push_back(std::move(posterior));
    }
    return out;
}

ConfidentTranscript best_transcript(const ConfusionNetwork & cn) {
    const BestPath path = best_path(cn);
    const std::vector<PosteriorBin> posteriors = normalize(cn);
    ConfidentTranscript transcript;
    transcript.utterance_id = cn.utterance_id;
    transcript.words.reserve(path.tokens.size());
    for (size_t k = 0; k < path.tokens.size(); ++k) {
        transcript.words.push_back(
            {path.tokens[k], posteriors[path.bin_index[k]].at(path.tokens[k])});
    }
    return transcript;
}

ConfidentTranscript extract_best(const NBestList & nbest, double temperature,
                                 std::optional<size_t> top_n) {
    if (std::isnan(temperature) || temperature < 0.0) {
        throw std::invalid_argument("temperature must be >= 0");
    }
    if (nbest.hypotheses.empty()) {
        throw std::invalid_argument("n-best list is empty");
    }

    ConfidentTranscript transcript;
    transcript.utterance_id = nbest.utterance_id;

    if (temperature == 0.0) {
        // only the best path of each system is considered and the resulting
        // confidences are all exactly 1.0; no network is built
        const Hypothesis * top = &nbest.hypotheses.front();
        for (const Hypothesis & hyp : nbest.hypotheses) {
            if (hyp.score > top->score) {
                top = &hyp;
            }
        }
        transcript.words.reserve(top->tokens.size());
        for (const Token & token : top->tokens) {
            transcript.words.push_back({token, 1.0});
        }
        return transcript;
    }

    return best_transcript(build_confusion_network(nbest, temperature, top_n));
}

NBestList rescore(const NBestList & nbest, const std::map<size_t, double> & aux_scores,
                  const RescoreWeights & weights) {
    if (!(weights.lm_weight >= 0.0) || !(weights.am_weight >= 0.0) ||
        !std::isfinite(weights.insertion_bonus)) {
        throw std::invalid_argument("invalid rescore weights");
    }
    NBestList out = nbest;
    for (size_t i = 0; i < out.hypotheses.size(); ++i) {
        const auto it = aux_scores.find(i);
        if (it == aux_scores.end()) {
            throw std::invalid_argument("missing aux score for hypothesis index " +
                                        std::to_string(i) + " of utterance " + out.utterance_id);
        }
        Hypothesis & hyp = out.hypotheses[i];
        hyp.score = weights.am_weight * hyp.score + weights.lm_weight * it->second +
                    weights.insertion_bonus * static_cast<double>(hyp.tokens.size());
    }
    out.sort_hypotheses();
    return out;
}

}  // namespace hystoc
