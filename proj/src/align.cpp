#include "hystoc/align.hpp"

#include <algorithm>

namespace hystoc {

EditScript levenshtein_align(std::span<const Token> hyp, std::span<const Token> ref) {
    const size_t m = hyp.size();
    const size_t n = ref.size();

    // d[i][j] = distance between hyp[0..i) and ref[0..j)
    std::vector<std::vector<size_t>> d(m + 1, std::vector<size_t>(n + 1));
    for (size_t i = 0; i <= m; ++i) d[i][0] = i;
    for (size_t j = 0; j <= n; ++j) d[0][j] = j;
    for (size_t i = 1; i <= m; ++i) {
        for (size_t j = 1; j <= n; ++j) {
            const size_t sub = d[i - 1][j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1);
            const size_t del = d[i][j - 1] + 1;  // ref token absent from hyp
            const size_t ins = d[i - 1][j] + 1;  // hyp token absent from ref
            d[i][j] = std::min({sub, del, ins});
        }
    }

    EditScript script;
    script.distance = d[m][n];
    script.ops.reserve(std::max(m, n));

    size_t i = m;
    size_t j = n;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && hyp[i - 1] == ref[j - 1] && d[i - 1][j - 1] == d[i][j]) {
            script.ops.push_back({EditKind::Match, j - 1, i - 1});
            --i, --j;
        } else if (i > 0 && j > 0 && d[i - 1][j - 1] + 1 == d[i][j]) {
            script.ops.push_back({EditKind::Substitute, j - 1, i - 1});
            --i, --j;
        } else if (j > 0 && d[i][j - 1] + 1 == d[i][j]) {
            script.ops.push_back({EditKind::Delete, j - 1, std::nullopt});
            --j;
        } else {
            script.ops.push_back({EditKind::Insert, std::nullopt, i - 1});
            --i;
        }
    }
    std::reverse(script.ops.begin(), script.ops.end());
    return script;
}

ErrorCounts word_error_count(std::span<const Token> ref, std::span<const Token> hyp) {
    const EditScript script = levenshtein_align(hyp, ref);
    ErrorCounts counts;
    for (const EditOp & op : script.ops) {
        switch (op.kind) {
            case EditKind::Substitute: ++counts.substitutions; break;
            case EditKind::Delete: ++counts.deletions; break;
            case EditKind::Insert: ++counts.insertions; break;
            case EditKind::Match: break;
        }
    }
    return counts;
}

}  // namespace hystoc
