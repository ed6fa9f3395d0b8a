#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hystoc/confnet.hpp"
#include "hystoc/core.hpp"
#include "hystoc/eval.hpp"

namespace hystoc {

// Raised on malformed input; what() reads "origin:line: message".
class ParseError : public std::runtime_error {
  public:
    ParseError(std::string_view origin, size_t line, const std::string & message)
        : std::runtime_error(std::string(origin) + ":" + std::to_string(line) + ": " + message),
          line_(line) {}

    size_t line() const { return line_; }

  private:
    size_t line_;
};

// N-best lines: `<utt-id> <score> <token>*`. Lists come back grouped by
// utterance in first-appearance order, each sorted by decreasing score with
// file order breaking ties.
std::vector<NBestList> parse_nbest(const std::filesystem::path & path,
                                   std::string_view system_id = "");
std::vector<NBestList> parse_nbest_text(std::string_view text,
                                        std::string_view origin = "<string>",
                                        std::string_view system_id = "");
// Scores serialized to 17 significant digits so parsing restores them exactly.
std::string serialize_nbest(std::span<const NBestList> lists);

// Normalized confusion network: `<utt-id> <bin-index> <token-or-<eps>> <posterior>`.
struct Sausage {
    std::string utterance_id;
    std::vector<PosteriorBin> bins;
};

Sausage to_sausage(const ConfusionNetwork & cn);
std::vector<Sausage> parse_sausage(const std::filesystem::path & path);
std::vector<Sausage> parse_sausage_text(std::string_view text,
                                        std::string_view origin = "<string>");
std::string serialize_sausage(std::span<const Sausage> sausages);

// Confident transcripts: `<utt-id> <position> <word> <confidence>` with
// positions counting 0,1,2,... per utterance.
std::vector<ConfidentTranscript> parse_transcripts(const std::filesystem::path & path);
std::vector<ConfidentTranscript> parse_transcripts_text(std::string_view text,
                                                        std::string_view origin = "<string>");
std::string serialize_transcripts(std::span<const ConfidentTranscript> transcripts);

// References: `<utt-id> <token>*`, one line per utterance.
TranscriptMap parse_refs(const std::filesystem::path & path);
TranscriptMap parse_refs_text(std::string_view text, std::string_view origin = "<string>");

// Aux scores for rescoring: `<utt-id> <rank> <aux-score>`, rank is the
// 0-based position in the utterance's score-sorted n-best list.
using AuxScores = std::map<std::string, std::map<size_t, double>>;
AuxScores parse_aux_scores(const std::filesystem::path & path);
AuxScores parse_aux_scores_text(std::string_view text, std::string_view origin = "<string>");

}  // namespace hystoc
