#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hystoc/batch.hpp"
#include "hystoc/confnet.hpp"
#include "hystoc/core.hpp"
#include "hystoc/eval.hpp"
#include "hystoc/formats.hpp"
#include "hystoc/fusion.hpp"

namespace fs = std::filesystem;
using namespace hystoc;

namespace {

void write_file(const fs::path & path, const std::string & content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
    out.flush();
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

template <typename T>
void sort_by_utterance(std::vector<T> & items) {
    std::sort(items.begin(), items.end(),
              [](const T & a, const T & b) { return a.utterance_id < b.utterance_id; });
}

// Collects one entry per utterance per input file; every utterance must be
// present in every file (the systems share a VAD segmentation).
template <typename T>
std::vector<std::vector<T>> group_by_utterance(const std::vector<std::vector<T>> & per_file,
                                               const std::vector<std::string> & file_names,
                                               std::vector<std::string> & utterances) {
    std::set<std::string> ids;
    for (const auto & items : per_file) {
        for (const T & item : items) {
            ids.insert(item.utterance_id);
        }
    }

    std::vector<std::map<std::string, const T *>> by_id(per_file.size());
    for (size_t f = 0; f < per_file.size(); ++f) {
        for (const T & item : per_file[f]) {
            by_id[f].emplace(item.utterance_id, &item);
        }
    }

    std::vector<std::string> missing;
    for (const std::string & id : ids) {
        for (size_t f = 0; f < per_file.size(); ++f) {
            if (!by_id[f].contains(id)) {
                missing.push_back("'" + id + "' missing from " + file_names[f]);
            }
        }
    }
    if (!missing.empty()) {
        std::string message = "fusion inputs do not cover the same utterances:";
        for (const std::string & m : missing) {
            message += " " + m + ";";
        }
        message.pop_back();
        throw std::runtime_error(message);
    }

    std::vector<std::vector<T>> groups;
    groups.reserve(ids.size());
    for (const std::string & id : ids) {
        std::vector<T> group;
        group.reserve(per_file.size());
        for (size_t f = 0; f < per_file.size(); ++f) {
            group.push_back(*by_id[f].at(id));
        }
        groups.push_back(std::move(group));
        utterances.push_back(id);
    }
    return groups;
}

struct ConfidencesArgs {
    std::string nbest;
    double temperature = 1.0;
    std::optional<size_t> top_n;
    std::string sausage_out;
    std::string best_out;
};

void run_confidences(const ConfidencesArgs & args, ExecutionPolicy policy) {
    std::vector<NBestList> lists = parse_nbest(args.nbest);
    sort_by_utterance(lists);

    ConfidenceOptions options;
    options.temperature = args.temperature;
    options.top_n = args.top_n;
    options.want_network = !args.sausage_out.empty();
    if (options.want_network && args.temperature == 0.0) {
        throw std::runtime_error("--sausage requires --temperature > 0 (no network at T=0)");
    }

    const std::vector<ConfidenceResult> results = confidences_batch(lists, options, policy);

    if (!args.best_out.empty()) {
        std::vector<ConfidentTranscript> best;
        best.reserve(results.size());
        for (const ConfidenceResult & r : results) {
            best.push_back(r.best);
        }
        write_file(args.best_out, serialize_transcripts(best));
    }
    if (!args.sausage_out.empty()) {
        std::vector<Sausage> sausages;
        sausages.reserve(results.size());
        for (const ConfidenceResult & r : results) {
            sausages.push_back(to_sausage(*r.network));
        }
        write_file(args.sausage_out, serialize_sausage(sausages));
    }
}

struct RescoreArgs {
    std::string nbest;
    std::string aux;
    double lm_weight = 0.0;
    double insertion_bonus = 0.0;
    double am_weight = 1.0;
};

void run_rescore(const RescoreArgs & args) {
    std::vector<NBestList> lists = parse_nbest(args.nbest);
    sort_by_utterance(lists);
    const AuxScores aux = parse_aux_scores(args.aux);

    const RescoreWeights weights{args.lm_weight, args.insertion_bonus, args.am_weight};
    static const std::map<size_t, double> empty;
    std::vector<NBestList> rescored;
    rescored.reserve(lists.size());
    for (const NBestList & list : lists) {
        const auto it = aux.find(list.utterance_id);
        rescored.push_back(rescore(list, it == aux.end() ? empty : it->second, weights));
    }
    std::cout << serialize_nbest(rescored);
}

struct FuseRoverArgs {
    std::vector<std::string> inputs;
    double alpha = 0.5;
    double eps_conf = 0.0;
    std::string out;
};

void run_fuse_rover(const FuseRoverArgs & args, ExecutionPolicy policy) {
    std::vector<std::vector<ConfidentTranscript>> per_file;
    per_file.reserve(args.inputs.size());
    for (const std::string & path : args.inputs) {
        per_file.push_back(parse_transcripts(path));
    }
    std::vector<std::string> utterances;
    const auto groups = group_by_utterance(per_file, args.inputs, utterances);

    const RoverParams params{args.alpha, args.eps_conf};
    const std::vector<ConfidentTranscript> fused = rover_batch(groups, params, policy);
    write_file(args.out, serialize_transcripts(fused));
}

struct FuseHystocArgs {
    std::vector<std::string> inputs;
    std::string scheme = "direct";
    double temperature = 1.0;
    std::string sausage_out;
    std::string best_out;
};

void run_fuse_hystoc(const FuseHystocArgs & args, ExecutionPolicy policy) {
    std::vector<std::vector<NBestList>> per_file;
    per_file.reserve(args.inputs.size());
    for (const std::string & path : args.inputs) {
        per_file.push_back(parse_nbest(path, path));
    }
    std::vector<std::string> utterances;
    const auto groups = group_by_utterance(per_file, args.inputs, utterances);

    const FusionScheme scheme = parse_fusion_scheme(args.scheme);
    const std::vector<FusionResult> results =
        hystoc_fuse_batch(groups, scheme, args.temperature, policy);

    std::vector<ConfidentTranscript> best;
    best.reserve(results.size());
    for (const FusionResult & r : results) {
        best.push_back(r.best);
    }
    write_file(args.best_out, serialize_transcripts(best));

    if (!args.sausage_out.empty()) {
        std::vector<Sausage> sausages;
        sausages.reserve(results.size());
        for (const FusionResult & r : results) {
            sausages.push_back(to_sausage(r.cn));
        }
        write_file(args.sausage_out, serialize_sausage(sausages));
    }
}

struct WerArgs {
    std::string ref;
    std::string hyp;
};

void run_wer(const WerArgs & args) {
    const TranscriptMap refs = parse_refs(args.ref);
    const TranscriptMap hyps = parse_refs(args.hyp);
    const WerReport report = corpus_wer(refs, hyps);
    std::printf("WER %.2f %zu %zu %zu %zu\n", 100.0 * report.wer, report.substitutions,
                report.deletions, report.insertions, report.ref_words);
}

struct CalibrationArgs {
    std::string ref;
    std::string best;
    size_t cohort_size = 2500;
    std::string out;
};

void run_calibration(const CalibrationArgs & args) {
    const TranscriptMap refs = parse_refs(args.ref);
    std::vector<ConfidentTranscript> transcripts = parse_transcripts(args.best);
    sort_by_utterance(transcripts);

    std::vector<ScoredToken> pooled;
    for (const ConfidentTranscript & transcript : transcripts) {
        const auto ref = refs.find(transcript.utterance_id);
        if (ref == refs.end()) {
            throw std::runtime_error("utterance '" + transcript.utterance_id +
                                     "' has no reference");
        }
        const auto scored = mark_correctness(ref->second, transcript);
        pooled.insert(pooled.end(), scored.begin(), scored.end());
    }

    const auto cohorts = calibration_cohorts(std::move(pooled), args.cohort_size);
    std::string csv = "cohort,median_confidence,accuracy,count\n";
    for (const CalibrationCohort & cohort : cohorts) {
        char row[128];
        std::snprintf(row, sizeof row, "%zu,%.6f,%.6f,%zu\n", cohort.cohort_index,
                      cohort.median_confidence, cohort.accuracy, cohort.count);
        csv += row;
    }
    write_file(args.out, csv);
}

}  // namespace

int main(int argc, char ** argv) {
    CLI::App app{
        "hystoc: word-level confidences from scored n-best lists, system fusion and scoring"};
    app.require_subcommand(1);
    bool serial = false;
    app.add_flag("--serial", serial, "process utterances one by one instead of in parallel");

    ConfidencesArgs conf_args;
    auto * conf = app.add_subcommand(
        "confidences", "turn an n-best file into confident transcripts and sausages");
    conf->add_option("--nbest", conf_args.nbest, "n-best input file")->required();
    conf->add_option("--temperature", conf_args.temperature, "score divisor, 0 = plain 1-best")
        ->required();
    conf->add_option("--top-n", conf_args.top_n, "use only the N highest-scored hypotheses");
    conf->add_option("--sausage", conf_args.sausage_out, "write the normalized networks here");
    conf->add_option("--best", conf_args.best_out, "write best transcripts here");

    RescoreArgs rescore_args;
    auto * resc = app.add_subcommand("rescore", "mix aux scores into hypothesis scores");
    resc->add_option("--nbest", rescore_args.nbest, "n-best input file")->required();
    resc->add_option("--aux", rescore_args.aux, "aux score file: <utt-id> <rank> <score>")
        ->required();
    resc->add_option("--lm-weight", rescore_args.lm_weight, "weight of the aux score")
        ->required();
    resc->add_option("--insertion-bonus", rescore_args.insertion_bonus,
                     "log-score bonus per token")
        ->required();
    resc->add_option("--am-weight", rescore_args.am_weight, "weight of the original score");

    FuseRoverArgs rover_args;
    auto * rover = app.add_subcommand("fuse-rover", "confidence-weighted voting over transcripts");
    rover->add_option("--in", rover_args.inputs, "transcript file, one per system (repeat)")
        ->required();
    rover->add_option("--alpha", rover_args.alpha, "vote vs confidence interpolation in [0,1]")
        ->required();
    rover->add_option("--eps-conf", rover_args.eps_conf, "confidence of eps slots in [0,1]")
        ->required();
    rover->add_option("--out", rover_args.out, "fused transcript output")->required();

    FuseHystocArgs hystoc_args;
    auto * fuse = app.add_subcommand("fuse-hystoc", "pool n-best lists across systems");
    fuse->add_option("--in", hystoc_args.inputs, "n-best file, one per system (repeat)")
        ->required();
    fuse->add_option("--scheme", hystoc_args.scheme, "direct|normalized|normalized-rr")
        ->required();
    fuse->add_option("--temperature", hystoc_args.temperature, "score divisor, > 0")->required();
    fuse->add_option("--sausage", hystoc_args.sausage_out, "write the fused networks here");
    fuse->add_option("--best", hystoc_args.best_out, "write fused transcripts here")->required();

    WerArgs wer_args;
    auto * wer = app.add_subcommand("wer", "corpus word error rate");
    wer->add_option("--ref", wer_args.ref, "reference file: <utt-id> <token>*")->required();
    wer->add_option("--hyp", wer_args.hyp, "hypothesis file: <utt-id> <token>*")->required();

    CalibrationArgs cal_args;
    auto * cal = app.add_subcommand("calibration", "confidence vs accuracy cohort table");
    cal->add_option("--ref", cal_args.ref, "reference file")->required();
    cal->add_option("--best", cal_args.best, "confident transcript file")->required();
    cal->add_option("--cohort-size", cal_args.cohort_size, "tokens per cohort");
    cal->add_option("--out", cal_args.out, "CSV output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp & e) {
        return app.exit(e);
    } catch (const CLI::ParseError & e) {
        app.exit(e);
        return 1;
    }

    const ExecutionPolicy policy = serial ? ExecutionPolicy::Serial : ExecutionPolicy::Parallel;
    try {
        if (conf->parsed()) run_confidences(conf_args, policy);
        if (resc->parsed()) run_rescore(rescore_args);
        if (rover->parsed()) run_fuse_rover(rover_args, policy);
        if (fuse->parsed()) run_fuse_hystoc(hystoc_args, policy);
        if (wer->parsed()) run_wer(wer_args);
        if (cal->parsed()) run_calibration(cal_args);
    } catch (const std::exception & e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
