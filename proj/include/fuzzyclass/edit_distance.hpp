#ifndef FUZZYCLASS_EDIT_DISTANCE_HPP
#define FUZZYCLASS_EDIT_DISTANCE_HPP

#include <algorithm>
#include <cstddef>
#include <string_view>
#include <vector>

namespace fuzzyclass {

/// Restricted Damerau-Levenshtein (optimal string alignment) distance.
///
/// d(i,j) is the minimum of
///   d(i-1,j) + 1                      deletion
///   d(i,j-1) + 1                      insertion
///   d(i-1,j-1) + [s_i != t_j]         match / substitution
///   d(i-2,j-2) + [s_i != t_j]         transposition, only when
///                                     s_i == t_{j-1} and s_{i-1} == t_j
///
/// The transposition term keeps the mismatch indicator exactly as written in
/// the recurrence; since it is only reachable when the two adjacent symbols are
/// swapped, it is 1 unless the swapped pair is a repeated symbol.
/// Three rolling rows are enough because the recurrence looks back two rows.
inline std::size_t osa_distance(std::string_view s, std::string_view t) {
    const std::size_t n = s.size();
    const std::size_t m = t.size();
    if (n == 0) return m;
    if (m == 0) return n;

    std::vector<std::size_t> prev2(m + 1), prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;

    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t mismatch = s[i - 1] == t[j - 1] ? 0 : 1;
            std::size_t best = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + mismatch});
            if (i > 1 && j > 1 && s[i - 1] == t[j - 2] && s[i - 2] == t[j - 1])
                best = std::min(best, prev2[j - 2] + mismatch);
            cur[j] = best;
        }
        std::swap(prev2, prev);
        std::swap(prev, cur);
    }
    return prev[m];
}

/// Insertion/deletion distance (substitution costs 2, no transpositions).
/// This is the weighting the reference ssdeep scorer uses internally; it equals
/// |s| + |t| - 2 * LCS(s, t).
inline std::size_t indel_distance(std::string_view s, std::string_view t) {
    const std::size_t m = t.size();
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 0; i < s.size(); ++i) {
        cur[0] = i + 1;
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t del = prev[j + 1] + 1;
            const std::size_t ins = cur[j] + 1;
            const std::size_t sub = prev[j] + (s[i] == t[j] ? 0 : 2);
            cur[j + 1] = std::min({del, ins, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

} // namespace fuzzyclass

#endif // FUZZYCLASS_EDIT_DISTANCE_HPP
