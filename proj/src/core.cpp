#include "hystoc/core.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace hystoc {

Token Token::word(std::string text) {
    if (text.empty()) {
        throw std::invalid_argument("token: empty string");
    }
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            throw std::invalid_argument("token contains whitespace: '" + text + "'");
        }
    }
    if (text == kEpsSurface) {
        throw std::invalid_argument("token collides with the reserved epsilon symbol");
    }
    return Token(std::move(text), false);
}

LogMass LogMass::from_log(double v) {
    if (std::isnan(v) || (std::isinf(v) && v > 0.0)) {
        throw std::invalid_argument("log mass must be finite or -inf");
    }
    return LogMass{v};
}

LogMass LogMass::from_linear(double p) {
    if (std::isnan(p) || p < 0.0) {
        throw std::invalid_argument("linear mass must be >= 0");
    }
    return LogMass{std::log(p)};
}

LogMass log_add_exp(LogMass a, LogMass b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double hi = std::max(a.log_value, b.log_value);
    const double lo = std::min(a.log_value, b.log_value);
    return LogMass{hi + std::log1p(std::exp(lo - hi))};
}

std::vector<double> softmax(std::span<const LogMass> values) {
    if (values.empty()) {
        throw std::invalid_argument("softmax: empty input");
    }
    double hi = -std::numeric_limits<double>::infinity();
    for (const LogMass & v : values) {
        hi = std::max(hi, v.log_value);
    }
    if (std::isinf(hi)) {
        throw std::invalid_argument("softmax: every entry has zero mass");
    }
    std::vector<double> out(values.size());
    double denom = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
        out[i] = std::exp(values[i].log_value - hi);
        denom += out[i];
    }
    for (double & p : out) {
        p /= denom;
    }
    return out;
}

void NBestList::sort_hypotheses() {
    std::stable_sort(hypotheses.begin(), hypotheses.end(),
                     [](const Hypothesis & a, const Hypothesis & b) { return a.score > b.score; });
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) {
            tokens.push_back(Token::word(std::string(text.substr(start, i - start))));
        }
    }
    return tokens;
}

std::string join_tokens(std::span<const Token> tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += ' ';
        out += tokens[i].surface();
    }
    return out;
}

}  // namespace hystoc
