#include "hystoc/formats.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

namespace hystoc {

namespace {

bool valid_utf8(std::string_view s) {
    const auto byte = [&](size_t k) { return static_cast<unsigned char>(s[k]); };
    size_t i = 0;
    while (i < s.size()) {
        const unsigned char c = byte(i);
        if (c < 0x80) {
            ++i;
            continue;
        }
        size_t len;
        if ((c & 0xE0) == 0xC0) {
            len = 2;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (size_t k = 1; k < len; ++k) {
            if ((byte(i + k) & 0xC0) != 0x80) return false;
        }
        if (len == 2 && c < 0xC2) return false;                         // overlong
        if (len == 3 && c == 0xE0 && byte(i + 1) < 0xA0) return false;  // overlong
        if (len == 3 && c == 0xED && byte(i + 1) >= 0xA0) return false; // surrogate
        if (len == 4 && c == 0xF0 && byte(i + 1) < 0x90) return false;  // overlong
        if (len == 4 && (c > 0xF4 || (c == 0xF4 && byte(i + 1) >= 0x90))) return false;
        i += len;
    }
    return true;
}

struct Field {
    std::string_view text;
    size_t column;  // 1-based byte offset
};

// Iterates data lines of a space/tab separated file: blank lines and
// `#` comments are skipped, CR and invalid UTF-8 are rejected, and fields
// must be separated by exactly one space or tab.
class LineParser {
  public:
    LineParser(std::istream & in, std::string_view origin) : in_(in), origin_(origin) {}

    bool next() {
        while (std::getline(in_, line_)) {
            ++line_no_;
            if (line_.find('\r') != std::string::npos) {
                fail("carriage return in line, expected LF line endings");
            }
            if (!valid_utf8(line_)) {
                fail("invalid UTF-8");
            }
            if (line_.empty() || line_[0] == '#') {
                continue;
            }
            split();
            return true;
        }
        return false;
    }

    size_t line_no() const { return line_no_; }
    const std::vector<Field> & fields() const { return fields_; }

    [[noreturn]] void fail(const std::string & message) const {
        throw ParseError(origin_, line_no_, message);
    }
    [[noreturn]] void fail_at(const Field & field, const std::string & message) const {
        throw ParseError(origin_, line_no_,
                         "column " + std::to_string(field.column) + ": " + message);
    }

    double parse_double(const Field & field, const char * what) const {
        double value = 0.0;
        const auto [end, ec] =
            std::from_chars(field.text.data(), field.text.data() + field.text.size(), value);
        if (ec != std::errc() || end != field.text.data() + field.text.size()) {
            fail_at(field, std::string(what) + " is not a decimal float: '" +
                               std::string(field.text) + "'");
        }
        return value;
    }

    size_t parse_index(const Field & field, const char * what) const {
        size_t value = 0;
        const auto [end, ec] =
            std::from_chars(field.text.data(), field.text.data() + field.text.size(), value);
        if (ec != std::errc() || end != field.text.data() + field.text.size()) {
            fail_at(field, std::string(what) + " is not a non-negative integer: '" +
                               std::string(field.text) + "'");
        }
        return value;
    }

    Token parse_word(const Field & field) const {
        try {
            return Token::word(std::string(field.text));
        } catch (const std::invalid_argument & e) {
            fail_at(field, e.what());
        }
    }

  private:
    void split() {
        fields_.clear();
        const std::string_view line(line_);
        size_t pos = 0;
        while (true) {
            const size_t end = line.find_first_of(" \t", pos);
            const std::string_view field =
                line.substr(pos, (end == std::string_view::npos ? line.size() : end) - pos);
            if (field.empty()) {
                throw ParseError(origin_, line_no_,
                                 "column " + std::to_string(pos + 1) +
                                     ": empty field (repeated or trailing separator)");
            }
            fields_.push_back({field, pos + 1});
            if (end == std::string_view::npos) break;
            pos = end + 1;
        }
    }

    std::istream & in_;
    std::string origin_;
    std::string line_;
    size_t line_no_ = 0;
    std::vector<Field> fields_;
};

std::ifstream open_input(const std::filesystem::path & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return in;
}

std::string format_double(const char * fmt, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, value);
    return buf;
}

std::vector<NBestList> parse_nbest_stream(std::istream & in, std::string_view origin,
                                          std::string_view system_id) {
    std::vector<NBestList> lists;
    std::map<std::string, size_t, std::less<>> by_utterance;

    LineParser parser(in, origin);
    while (parser.next()) {
        const auto & fields = parser.fields();
        if (fields.size() < 2) {
            parser.fail("expected `<utt-id> <score> <token>*`");
        }
        const double score = parser.parse_double(fields[1], "score");
        if (!std::isfinite(score)) {
            parser.fail_at(fields[1], "score must be finite");
        }
        Hypothesis hyp;
        hyp.score = score;
        hyp.tokens.reserve(fields.size() - 2);
        for (size_t i = 2; i < fields.size(); ++i) {
            hyp.tokens.push_back(parser.parse_word(fields[i]));
        }

        const std::string_view utt = fields[0].text;
        auto it = by_utterance.find(utt);
        if (it == by_utterance.end()) {
            it = by_utterance.emplace(std::string(utt), lists.size()).first;
            lists.push_back({std::string(utt), {}, std::string(system_id)});
        }
        lists[it->second].hypotheses.push_back(std::move(hyp));
    }
    for (NBestList & list : lists) {
        list.sort_hypotheses();
    }
    return lists;
}

std::vector<Sausage> parse_sausage_stream(std::istream & in, std::string_view origin) {
    std::vector<Sausage> sausages;
    std::map<std::string, size_t, std::less<>> by_utterance;

    LineParser parser(in, origin);
    while (parser.next()) {
        const auto & fields = parser.fields();
        if (fields.size() != 4) {
            parser.fail("expected `<utt-id> <bin-index> <token> <posterior>`");
        }
        const size_t bin_index = parser.parse_index(fields[1], "bin index");
        const Token token = fields[2].text == kEpsSurface ? Token::eps()
                                                          : parser.parse_word(fields[2]);
        const double posterior = parser.parse_double(fields[3], "posterior");
        if (!(posterior >= 0.0 && posterior <= 1.0)) {
            parser.fail_at(fields[3], "posterior out of [0,1]");
        }

        const std::string_view utt = fields[0].text;
        auto it = by_utterance.find(utt);
        if (it == by_utterance.end()) {
            it = by_utterance.emplace(std::string(utt), sausages.size()).first;
            sausages.push_back({std::string(utt), {}});
        }
        Sausage & sausage = sausages[it->second];

        if (bin_index == sausage.bins.size()) {
            sausage.bins.emplace_back();
        } else if (bin_index + 1 != sausage.bins.size()) {
            const std::string expected =
                sausage.bins.empty() ? "0"
                                     : std::to_string(sausage.bins.size() - 1) + " or " +
                                           std::to_string(sausage.bins.size());
            parser.fail_at(fields[1], "bin index out of order for utterance '" +
                                          std::string(utt) + "' (expected " + expected + ")");
        }
        if (!sausage.bins.back().emplace(token, posterior).second) {
            parser.fail_at(fields[2], "duplicate token in bin");
        }
    }

    for (const Sausage & sausage : sausages) {
        for (size_t b = 0; b < sausage.bins.size(); ++b) {
            double total = 0.0;
            for (const auto & [token, p] : sausage.bins[b]) {
                total += p;
            }
            if (std::abs(total - 1.0) > 5e-6) {
                throw ParseError(origin, 0,
                                 "posteriors of utterance '" + sausage.utterance_id + "' bin " +
                                     std::to_string(b) + " sum to " + format_double("%.8g", total));
            }
        }
    }
    return sausages;
}

std::vector<ConfidentTranscript> parse_transcripts_stream(std::istream & in,
                                                          std::string_view origin) {
    std::vector<ConfidentTranscript> transcripts;
    std::map<std::string, size_t, std::less<>> by_utterance;

    LineParser parser(in, origin);
    while (parser.next()) {
        const auto & fields = parser.fields();
        if (fields.size() != 4) {
            parser.fail("expected `<utt-id> <position> <word> <confidence>`");
        }
        const size_t position = parser.parse_index(fields[1], "position");
        const Token word = parser.parse_word(fields[2]);
        const double confidence = parser.parse_double(fields[3], "confidence");
        if (!(confidence > 0.0 && confidence <= 1.0)) {
            parser.fail_at(fields[3], "confidence out of (0,1]");
        }

        const std::string_view utt = fields[0].text;
        auto it = by_utterance.find(utt);
        if (it == by_utterance.end()) {
            it = by_utterance.emplace(std::string(utt), transcripts.size()).first;
            transcripts.push_back({std::string(utt), {}});
        }
        ConfidentTranscript & transcript = transcripts[it->second];
        if (position != transcript.words.size()) {
            parser.fail_at(fields[1], "expected position " +
                                          std::to_string(transcript.words.size()) +
                                          " for utterance '" + std::string(utt) + "'");
        }
        transcript.words.push_back({word, confidence});
    }
    return transcripts;
}

TranscriptMap parse_refs_stream(std::istream & in, std::string_view origin) {
    TranscriptMap refs;
    LineParser parser(in, origin);
    while (parser.next()) {
        const auto & fields = parser.fields();
        std::vector<Token> tokens;
        tokens.reserve(fields.size() - 1);
        for (size_t i = 1; i < fields.size(); ++i) {
            tokens.push_back(parser.parse_word(fields[i]));
        }
        if (!refs.emplace(std::string(fields[0].text), std::move(tokens)).second) {
            parser.fail_at(fields[0],
                           "duplicate reference for utterance '" + std::string(fields[0].text) + "'");
        }
    }
    return refs;
}

AuxScores parse_aux_scores_stream(std::istream & in, std::string_view origin) {
    AuxScores scores;
    LineParser parser(in, origin);
    while (parser.next()) {
        const auto & fields = parser.fields();
        if (fields.size() != 3) {
            parser.fail("expected `<utt-id> <rank> <aux-score>`");
        }
        const size_t rank = parser.parse_index(fields[1], "rank");
        const double score = parser.parse_double(fields[2], "aux score");
        if (!std::isfinite(score)) {
            parser.fail_at(fields[2], "aux score must be finite");
        }
        if (!scores[std::string(fields[0].text)].emplace(rank, score).second) {
            parser.fail_at(fields[1], "duplicate aux score for utterance '" +
                                          std::string(fields[0].text) + "' rank " +
                                          std::to_string(rank));
        }
    }
    return scores;
}

}  // namespace

std::vector<NBestList> parse_nbest(const std::filesystem::path & path,
                                   std::string_view system_id) {
    auto in = open_input(path);
    return parse_nbest_stream(in, path.string(), system_id);
}

std::vector<NBestList> parse_nbest_text(std::string_view text, std::string_view origin,
                                        std::string_view system_id) {
    std::istringstream in{std::string(text)};
    return parse_nbest_stream(in, origin, system_id);
}

std::string serialize_nbest(std::span<const NBestList> lists) {
    std::string out;
    for (const NBestList & list : lists) {
        for (const Hypothesis & hyp : list.hypotheses) {
            out += list.utterance_id;
            out += ' ';
            out += format_double("%.17g", hyp.score);
            for (const Token & token : hyp.tokens) {
                out += ' ';
                out += token.text();
            }
            out += '\n';
        }
    }
    return out;
}

Sausage to_sausage(const ConfusionNetwork & cn) {
    return {cn.utterance_id, normalize(cn)};
}

std::vector<Sausage> parse_sausage(const std::filesystem::path & path) {
    auto in = open_input(path);
    return parse_sausage_stream(in, path.string());
}

std::vector<Sausage> parse_sausage_text(std::string_view text, std::string_view origin) {
    std::istringstream in{std::string(text)};
    return parse_sausage_stream(in, origin);
}

std::string serialize_sausage(std::span<const Sausage> sausages) {
    std::string out;
    for (const Sausage & sausage : sausages) {
        for (size_t b = 0; b < sausage.bins.size(); ++b) {
            for (const auto & [token, posterior] : sausage.bins[b]) {
                out += sausage.utterance_id;
                out += ' ';
                out += std::to_string(b);
                out += ' ';
                out += token.surface();
                out += ' ';
                out += format_double("%.6g", posterior);
                out += '\n';
            }
        }
    }
    return out;
}

std::vector<ConfidentTranscript> parse_transcripts(const std::filesystem::path & path) {
    auto in = open_input(path);
    return parse_transcripts_stream(in, path.string());
}

std::vector<ConfidentTranscript> parse_transcripts_text(std::string_view text,
                                                        std::string_view origin) {
    std::istringstream in{std::string(text)};
    return parse_transcripts_stream(in, origin);
}

std::string serialize_transcripts(std::span<const ConfidentTranscript> transcripts) {
    std::string out;
    for (const ConfidentTranscript & transcript : transcripts) {
        for (size_t i = 0; i < transcript.words.size(); ++i) {
            out += transcript.utterance_id;
            out += ' ';
            out += std::to_string(i);
            out += ' ';
            out += transcript.words[i].token.text();
            out += ' ';
            out += format_double("%.6f", transcript.words[i].confidence);
            out += '\n';
        }
    }
    return out;
}

TranscriptMap parse_refs(const std::filesystem::path & path) {
    auto in = open_input(path);
    return parse_refs_stream(in, path.string());
}

TranscriptMap parse_refs_text(std::string_view text, std::string_view origin) {
    std::istringstream in{std::string(text)};
    return parse_refs_stream(in, origin);
}

AuxScores parse_aux_scores(const std::filesystem::path & path) {
    auto in = open_input(path);
    return parse_aux_scores_stream(in, path.string());
}

AuxScores parse_aux_scores_text(std::string_view text, std::string_view origin) {
    std::istringstream in{std::string(text)};
    return parse_aux_scores_stream(in, origin);
}

}  // namespace hystoc
