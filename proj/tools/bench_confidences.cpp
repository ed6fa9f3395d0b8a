// Times confusion-network construction over a synthetic corpus, once on the
// serial path and once on the OpenMP path, and checks that both produce the
// same transcripts.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hystoc/batch.hpp"
#include "hystoc/core.hpp"

using namespace hystoc;

namespace {

std::vector<NBestList> synthetic_corpus(size_t utterances, size_t hypotheses, size_t tokens,
                                        uint32_t seed) {
    // A small vocabulary keeps the bins busy: most hypotheses disagree
    // somewhere, so alignment and mass accumulation both get exercised.
    std::vector<Token> vocabulary;
    for (char c = 'a'; c <= 'z'; ++c) {
        vocabulary.push_back(Token::word(std::string("w") + c));
    }

    std::mt19937 rng(seed);
    std::uniform_int_distribution<size_t> pick_word(0, vocabulary.size() - 1);
    std::uniform_real_distribution<double> score(-40.0, -5.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    std::vector<NBestList> corpus;
    corpus.reserve(utterances);
    for (size_t u = 0; u < utterances; ++u) {
        NBestList list;
        list.utterance_id = "utt" + std::to_string(u);

        std::vector<Token> truth;
        truth.reserve(tokens);
        for (size_t t = 0; t < tokens; ++t) {
            truth.push_back(vocabulary[pick_word(rng)]);
        }

        for (size_t h = 0; h < hypotheses; ++h) {
            Hypothesis hyp;
            for (const Token & token : truth) {
                const double roll = coin(rng);
                if (roll < 0.08) {
                    hyp.tokens.push_back(vocabulary[pick_word(rng)]);  // substitution
                } else if (roll < 0.12) {
                    continue;  // deletion
                } else if (roll < 0.16) {
                    hyp.tokens.push_back(token);
                    hyp.tokens.push_back(vocabulary[pick_word(rng)]);  // insertion
                } else {
                    hyp.tokens.push_back(token);
                }
            }
            if (hyp.tokens.empty()) {
                hyp.tokens.push_back(truth.front());
            }
            hyp.score = score(rng);
            list.hypotheses.push_back(std::move(hyp));
        }
        corpus.push_back(std::move(list));
    }
    return corpus;
}

double run_once(const std::vector<NBestList> & corpus, const ConfidenceOptions & options,
                ExecutionPolicy policy, std::vector<ConfidenceResult> & results) {
    const auto start = std::chrono::steady_clock::now();
    results = confidences_batch(corpus, options, policy);
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

bool same_transcripts(const std::vector<ConfidenceResult> & a,
                      const std::vector<ConfidenceResult> & b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].best.words.size() != b[i].best.words.size()) return false;
        for (size_t w = 0; w < a[i].best.words.size(); ++w) {
            if (a[i].best.words[w].token != b[i].best.words[w].token) return false;
            if (a[i].best.words[w].confidence != b[i].best.words[w].confidence) return false;
        }
    }
    return true;
}

}  // namespace

int main(int argc, char ** argv) {
    CLI::App app{"benchmark: serial vs parallel confidence extraction"};
    size_t utterances = 1000;
    size_t hypotheses = 100;
    size_t tokens = 30;
    double temperature = 1.0;
    uint32_t seed = 20230817;
    app.add_option("--utterances", utterances, "corpus size");
    app.add_option("--hypotheses", hypotheses, "n-best depth per utterance");
    app.add_option("--tokens", tokens, "reference length per utterance");
    app.add_option("--temperature", temperature, "score divisor");
    app.add_option("--seed", seed, "corpus RNG seed");
    CLI11_PARSE(app, argc, argv);

    std::printf("generating %zu utterances x %zu hypotheses x %zu tokens ...\n", utterances,
                hypotheses, tokens);
    const std::vector<NBestList> corpus =
        synthetic_corpus(utterances, hypotheses, tokens, seed);

    ConfidenceOptions options;
    options.temperature = temperature;

    std::vector<ConfidenceResult> serial_results;
    std::vector<ConfidenceResult> parallel_results;

    // Warm-up pass so first-touch allocation does not bias the serial number.
    run_once(corpus, options, ExecutionPolicy::Serial, serial_results);

    const double serial_s = run_once(corpus, options, ExecutionPolicy::Serial, serial_results);
    const double parallel_s =
        run_once(corpus, options, ExecutionPolicy::Parallel, parallel_results);

    size_t words = 0;
    for (const ConfidenceResult & r : serial_results) {
        words += r.best.words.size();
    }

    std::printf("serial:   %8.3f s  (%.0f words/s)\n", serial_s, words / serial_s);
    std::printf("parallel: %8.3f s  (%.0f words/s)\n", parallel_s, words / parallel_s);
    std::printf("speedup:  %8.2fx\n", serial_s / parallel_s);

    if (!same_transcripts(serial_results, parallel_results)) {
        std::printf("MISMATCH: serial and parallel transcripts differ\n");
        return 1;
    }
    std::printf("outputs identical across policies\n");
    return 0;
}
