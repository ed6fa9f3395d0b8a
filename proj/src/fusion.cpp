#include "hystoc/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "hystoc/align.hpp"

namespace hystoc {

FusionScheme parse_fusion_scheme(std::string_view name) {
    if (name == "direct") return FusionScheme::Direct;
    if (name == "normalized") return FusionScheme::Normalized;
    if (name == "normalized-rr") return FusionScheme::NormalizedRoundRobin;
    throw std::invalid_argument("unknown fusion scheme '" + std::string(name) +
                                "' (expected direct|normalized|normalized-rr)");
}

std::string_view fusion_scheme_name(FusionScheme scheme) {
    switch (scheme) {
        case FusionScheme::Direct: return "direct";
        case FusionScheme::Normalized: return "normalized";
        case FusionScheme::NormalizedRoundRobin: return "normalized-rr";
    }
    return "?";
}

namespace {

void check_same_utterance(std::string_view expected, std::string_view got) {
    if (expected != got) {
        throw std::invalid_argument("fusion inputs mix utterances '" + std::string(expected) +
                                    "' and '" + std::string(got) + "'");
    }
}

// One slot of the Rover voting network. The word that created the slot acts
// as the reference token for later alignments.
struct VoteSlot {
    Token ref;
    std::vector<ConfidentWord> votes;  // one per system, eps votes carry eps_confidence

    VoteSlot(Token r, std::vector<ConfidentWord> v) : ref(std::move(r)), votes(std::move(v)) {}
};

void align_transcript(std::vector<VoteSlot> & slots, const ConfidentTranscript & transcript,
                      size_t prior_systems, double eps_confidence) {
    std::vector<Token> ref;
    ref.reserve(slots.size());
    for (const VoteSlot & slot : slots) {
        ref.push_back(slot.ref);
    }
    std::vector<Token> hyp;
    hyp.reserve(transcript.words.size());
    for (const ConfidentWord & word : transcript.words) {
        hyp.push_back(word.token);
    }

    const EditScript script = levenshtein_align(hyp, ref);
    const ConfidentWord eps_vote{Token::eps(), eps_confidence};

    struct PendingSlot {
        size_t before;
        VoteSlot slot;
    };
    std::vector<PendingSlot> inserted;

    size_t ref_cursor = 0;
    for (const EditOp & op : script.ops) {
        switch (op.kind) {
            case EditKind::Match:
            case EditKind::Substitute:
                slots[*op.ref_index].votes.push_back(transcript.words[*op.hyp_index]);
                ref_cursor = *op.ref_index + 1;
                break;
            case EditKind::Delete:
                slots[*op.ref_index].votes.push_back(eps_vote);
                ref_cursor = *op.ref_index + 1;
                break;
            case EditKind::Insert: {
                const ConfidentWord & word = transcript.words[*op.hyp_index];
                std::vector<ConfidentWord> votes(prior_systems, eps_vote);
                votes.push_back(word);
                inserted.push_back(
                    {std::min(ref_cursor, slots.size()), VoteSlot(word.token, std::move(votes))});
                break;
            }
        }
    }

    if (!inserted.empty()) {
        std::vector<VoteSlot> rebuilt;
        rebuilt.reserve(slots.size() + inserted.size());
        size_t next = 0;
        for (size_t o = 0; o <= slots.size(); ++o) {
            while (next < inserted.size() && inserted[next].before == o) {
                rebuilt.push_back(std::move(inserted[next].slot));
                ++next;
            }
            if (o < slots.size()) {
                rebuilt.push_back(std::move(slots[o]));
            }
        }
        slots = std::move(rebuilt);
    }
}

}  // namespace

ConfidentTranscript rover_fuse(std::span<const ConfidentTranscript> transcripts,
                               const RoverParams & params) {
    if (transcripts.empty()) {
        throw std::invalid_argument("rover fusion needs at least one transcript");
    }
    if (!(params.alpha >= 0.0 && params.alpha <= 1.0)) {
        throw std::invalid_argument("rover alpha must be in [0,1]");
    }
    if (!(params.eps_confidence >= 0.0 && params.eps_confidence <= 1.0)) {
        throw std::invalid_argument("rover eps confidence must be in [0,1]");
    }

    const size_t n_sys = transcripts.size();
    std::vector<VoteSlot> slots;
    slots.reserve(transcripts[0].words.size());
    for (const ConfidentWord & word : transcripts[0].words) {
        slots.emplace_back(word.token, std::vector<ConfidentWord>{word});
    }
    for (size_t k = 1; k < n_sys; ++k) {
        check_same_utterance(transcripts[0].utterance_id, transcripts[k].utterance_id);
        align_transcript(slots, transcripts[k], k, params.eps_confidence);
        // systems aligned so far that missed a freshly inserted slot already
        // voted eps there; every slot now carries k+1 votes
    }

    ConfidentTranscript fused;
    fused.utterance_id = transcripts[0].utterance_id;

    for (const VoteSlot & slot : slots) {
        struct Tally {
            size_t count = 0;
            double conf_sum = 0.0;
        };
        std::map<Token, Tally> tallies;
        for (const ConfidentWord & vote : slot.votes) {
            Tally & tally = tallies[vote.token];
            ++tally.count;
            tally.conf_sum += vote.token.is_eps() ? params.eps_confidence : vote.confidence;
        }

        bool have_winner = false;
        Token winner = Token::eps();
        double winner_score = 0.0;
        double winner_meanconf = 0.0;
        for (const auto & [token, tally] : tallies) {
            const double meanconf = token.is_eps() ? params.eps_confidence
                                                   : tally.conf_sum / static_cast<double>(tally.count);
            const double vote_share = static_cast<double>(tally.count) / static_cast<double>(n_sys);
            const double score = params.alpha * vote_share + (1.0 - params.alpha) * meanconf;
            // ties: higher mean confidence, then non-eps over eps, then the
            // lexicographically smallest token (map order keeps the first)
            bool better = false;
            if (!have_winner || score > winner_score) {
                better = true;
            } else if (score == winner_score) {
                if (meanconf > winner_meanconf) {
                    better = true;
                } else if (meanconf == winner_meanconf && winner.is_eps() && !token.is_eps()) {
                    better = true;
                }
            }
            if (better) {
                have_winner = true;
                winner = token;
                winner_score = score;
                winner_meanconf = meanconf;
            }
        }

        if (!winner.is_eps()) {
            if (!(winner_score > 0.0)) {
                throw std::logic_error("rover winner with non-positive score");
            }
            fused.words.push_back({winner, std::min(winner_score, 1.0)});
        }
    }
    return fused;
}

FusionResult hystoc_fuse(std::span<const NBestList> systems, FusionScheme scheme,
                         double temperature) {
    if (systems.empty()) {
        throw std::invalid_argument("hystoc fusion needs at least one system");
    }
    if (!(temperature > 0.0)) {
        throw std::invalid_argument("hystoc fusion requires temperature > 0");
    }

    std::vector<NBestList> ordered(systems.begin(), systems.end());
    for (NBestList & list : ordered) {
        check_same_utterance(ordered[0].utterance_id, list.utterance_id);
        list.sort_hypotheses();
        if (scheme != FusionScheme::Direct) {
            LogMass total = LogMass::zero();
            for (const Hypothesis & hyp : list.hypotheses) {
                total = log_add_exp(total, LogMass::from_log(hyp.score));
            }
            for (Hypothesis & hyp : list.hypotheses) {
                hyp.score -= total.log_value;
            }
        }
    }

    std::vector<Hypothesis> pooled;
    if (scheme == FusionScheme::NormalizedRoundRobin) {
        size_t max_rank = 0;
        for (const NBestList & list : ordered) {
            max_rank = std::max(max_rank, list.hypotheses.size());
        }
        for (size_t rank = 0; rank < max_rank; ++rank) {
            for (const NBestList & list : ordered) {
                if (rank < list.hypotheses.size()) {
                    pooled.push_back(list.hypotheses[rank]);
                }
            }
        }
    } else {
        for (const NBestList & list : ordered) {
            pooled.insert(pooled.end(), list.hypotheses.begin(), list.hypotheses.end());
        }
        std::stable_sort(pooled.begin(), pooled.end(),
                         [](const Hypothesis & a, const Hypothesis & b) { return a.score > b.score; });
    }

    FusionResult result{accumulate_confusion_network(ordered[0].utterance_id, pooled, temperature),
                        {}};
    result.best = best_transcript(result.cn);
    return result;
}

}  // namespace hystoc
