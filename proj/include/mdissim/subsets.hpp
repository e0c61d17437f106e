#pragma once

// k-subsets of [n] = {1..n}: binomials, ranking, lexicographic enumeration.

#include <cstdint>
#include <span>
#include <type_traits>
#include <utility>
#include <stdexcept>
#include <vector>

namespace mdissim {

using Subset = std::vector<int>;

/// C(n, k) with 64-bit overflow detection.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        std::uint64_t num = n - k + i;
        if (result > UINT64_MAX / num) throw std::overflow_error("binomial overflow");
        result = result * num / i;
    }
    return result;
}

/// Colex rank of a strictly increasing 1-based subset.
inline std::size_t subset_rank(std::span<const int> sorted) {
    std::size_t rank = 0;
    for (std::size_t t = 0; t < sorted.size(); ++t)
        rank += static_cast<std::size_t>(binomial(static_cast<std::uint64_t>(sorted[t] - 1), t + 1));
    return rank;
}

inline bool is_strictly_increasing(std::span<const int> s) {
    for (std::size_t t = 1; t < s.size(); ++t)
        if (s[t - 1] >= s[t]) return false;
    return true;
}

/// Visits every k-subset of [n] in lexicographic order. The callback sees a
/// strictly increasing sequence; returning false from a bool-returning
/// callback stops the walk.
template <class Fn>
void for_each_subset(int n, int k, Fn&& fn) {
    if (k < 0 || k > n) return;
    Subset s(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) s[t] = t + 1;
    while (true) {
        if constexpr (std::is_same_v<decltype(fn(std::as_const(s))), bool>) {
            if (!fn(std::as_const(s))) return;
        } else {
            fn(std::as_const(s));
        }
        int t = k - 1;
        while (t >= 0 && s[t] == n - k + t + 1) --t;
        if (t < 0) return;
        ++s[t];
        for (int u = t + 1; u < k; ++u) s[u] = s[u - 1] + 1;
    }
}

/// All k-subsets of [n], lexicographic.
inline std::vector<Subset> subsets_of(int n, int k) {
    std::vector<Subset> out;
    for_each_subset(n, k, [&](const Subset& s) { out.push_back(s); });
    return out;
}

/// Elements of [n] not in `sorted`.
inline Subset complement(int n, std::span<const int> sorted) {
    Subset out;
    std::size_t t = 0;
    for (int v = 1; v <= n; ++v) {
        if (t < sorted.size() && sorted[t] == v) {
            ++t;
            continue;
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace mdissim
