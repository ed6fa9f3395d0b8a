#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hystoc {

inline constexpr std::string_view kEpsSurface = "<eps>";

// A surface word or the reserved epsilon ("no word here") sentinel.
// Words are non-empty, contain no whitespace and never equal "<eps>".
class Token {
  public:
    static Token eps() { return Token("", true); }
    static Token word(std::string text);

    bool is_eps() const { return eps_; }
    const std::string & text() const { return text_; }
    std::string surface() const { return eps_ ? std::string(kEpsSurface) : text_; }

    // eps orders before every word, words order by text
    friend std::strong_ordering operator<=>(const Token & a, const Token & b) {
        if (a.eps_ != b.eps_) {
            return a.eps_ ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        return a.text_ <=> b.text_;
    }
    friend bool operator==(const Token & a, const Token & b) = default;

  private:
    Token(std::string text, bool eps) : text_(std::move(text)), eps_(eps) {}

    std::string text_;
    bool eps_;
};

// Mass in natural-log domain; -inf is exact zero mass, NaN is never valid.
struct LogMass {
    double log_value = -std::numeric_limits<double>::infinity();

    static LogMass zero() { return LogMass{}; }
    static LogMass from_log(double v);
    static LogMass from_linear(double p);

    double linear() const { return std::exp(log_value); }
    bool is_zero() const { return std::isinf(log_value) && log_value < 0.0; }

    friend bool operator==(const LogMass & a, const LogMass & b) = default;
};

// log(exp(a) + exp(b)) via max shift; identity on the other argument when one is zero.
LogMass log_add_exp(LogMass a, LogMass b);

// Per-entry probabilities summing to 1. Throws std::invalid_argument when the
// input is empty or every entry is zero mass (an empty bin).
std::vector<double> softmax(std::span<const LogMass> values);

// One transcription variant with its hypothesis-level log-score.
struct Hypothesis {
    std::vector<Token> tokens;  // non-eps words; may be empty
    double score = 0.0;         // natural log, finite on ingestion
};

// Ranked hypotheses for one utterance from one system.
struct NBestList {
    std::string utterance_id;
    std::vector<Hypothesis> hypotheses;  // non-increasing score, ties keep ingestion order
    std::string system_id;               // optional tag

    void sort_hypotheses();
};

// Whitespace splitting, no further normalization.
std::vector<Token> tokenize(std::string_view text);

std::string join_tokens(std::span<const Token> tokens);

}  // namespace hystoc
