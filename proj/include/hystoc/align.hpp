#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hystoc/core.hpp"

namespace hystoc {

enum class EditKind { Match, Substitute, Delete, Insert };

// One step of an edit script. Match/Substitute carry both indices,
// Delete only ref_index, Insert only hyp_index.
struct EditOp {
    EditKind kind;
    std::optional<size_t> ref_index;
    std::optional<size_t> hyp_index;

    friend bool operator==(const EditOp & a, const EditOp & b) = default;
};

struct EditScript {
    std::vector<EditOp> ops;  // left to right along both sequences
    size_t distance = 0;      // count of non-Match ops
};

// Minimum unit-cost edit script aligning hyp against ref. Among cost-optimal
// scripts the backtrace prefers Match, then Substitute, then Delete, then
// Insert at each cell, walking from the bottom-right corner, so the output is
// deterministic.
EditScript levenshtein_align(std::span<const Token> hyp, std::span<const Token> ref);

struct ErrorCounts {
    size_t substitutions = 0;
    size_t deletions = 0;
    size_t insertions = 0;

    size_t total() const { return substitutions + deletions + insertions; }
    friend bool operator==(const ErrorCounts & a, const ErrorCounts & b) = default;
};

// S/D/I decomposition of the alignment of hyp against ref.
ErrorCounts word_error_count(std::span<const Token> ref, std::span<const Token> hyp);

}  // namespace hystoc
