#pragma once

// Reference computations used only by the tests. Each one takes a different
// route from the library code it checks.

#include "mdissim/mdissim.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using namespace mdissim;

// Pairwise distances by depth-first search from every leaf.
inline DistanceMatrix dfs_distances(const WeightedTree& t) {
    int n = t.leaf_count();
    DistanceMatrix d(n);
    for (int i = 1; i <= n; ++i) {
        std::vector<std::optional<Rational>> dist(t.node_count());
        std::vector<NodeId> stack{t.leaf(i)};
        dist[t.leaf(i)] = Rational(0);
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            for (const auto& inc : t.neighbors(v)) {
                if (dist[inc.node]) continue;
                dist[inc.node] = Rational(*dist[v] + t.edges()[inc.edge].weight);
                stack.push_back(inc.node);
            }
        }
        for (int j = i + 1; j <= n; ++j) d.set(i, j, *dist[t.leaf(j)]);
    }
    return d;
}

// Weight of the smallest subtree containing `leaves`, by repeatedly deleting
// degree-1 nodes that are not in the set.
inline Rational pruned_subtree_weight(const WeightedTree& t, const std::vector<int>& leaves) {
    std::vector<std::set<std::size_t>> incident(t.node_count());
    for (std::size_t e = 0; e < t.edges().size(); ++e) {
        incident[t.edges()[e].a].insert(e);
        incident[t.edges()[e].b].insert(e);
    }
    std::vector<bool> keep(t.node_count(), false);
    for (int v : leaves) keep[t.leaf(v)] = true;
    std::vector<bool> edge_alive(t.edges().size(), true);
    bool changed = true;
    while (changed) {
        changed = false;
        for (NodeId v = 0; v < t.node_count(); ++v) {
            if (keep[v] || incident[v].size() != 1) continue;
            std::size_t e = *incident[v].begin();
            NodeId other = t.edges()[e].a == v ? t.edges()[e].b : t.edges()[e].a;
            incident[v].clear();
            incident[other].erase(e);
            edge_alive[e] = false;
            changed = true;
        }
    }
    Rational total = 0;
    for (std::size_t e = 0; e < t.edges().size(); ++e)
        if (edge_alive[e]) total += t.edges()[e].weight;
    return total;
}

// Half the shortest closed walk through `subset`, trying every ordering by
// plain recursion (no symmetry reduction).
inline Rational all_orders_tour(const DistanceMatrix& d, const std::vector<int>& subset) {
    std::optional<Rational> best;
    std::vector<int> order{subset[0]};
    std::vector<bool> used(subset.size(), false);
    used[0] = true;
    auto rec = [&](auto&& self, Rational acc) -> void {
        if (order.size() == subset.size()) {
            Rational total = acc + d(order.back(), order.front());
            if (!best || total < *best) best = total;
            return;
        }
        for (std::size_t t = 1; t < subset.size(); ++t) {
            if (used[t]) continue;
            used[t] = true;
            Rational step = acc + d(order.back(), subset[t]);
            order.push_back(subset[t]);
            self(self, step);
            order.pop_back();
            used[t] = false;
        }
    };
    rec(rec, Rational(0));
    return Rational(*best / 2);
}

struct LinearSolve {
    std::size_t rank = 0;
    bool consistent = true;
    std::optional<DistanceMatrix> unique;  // set when consistent with full column rank
};

// Gauss-Jordan elimination on the system (X(i,j) + X(i,k) + X(j,k)) / 2 = W(i,j,k),
// one row per triple and one unknown per pair.
inline LinearSolve solve_triple_system(const DissimTensor& w) {
    int n = w.size();
    std::vector<std::pair<int, int>> pairs;
    std::map<std::pair<int, int>, std::size_t> column;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            column[{i, j}] = pairs.size();
            pairs.emplace_back(i, j);
        }
    std::size_t cols = pairs.size();
    std::vector<std::vector<Rational>> rows;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            for (int k = j + 1; k <= n; ++k) {
                std::vector<Rational> row(cols + 1, Rational(0));
                row[column[{i, j}]] = Rational(1, 2);
                row[column[{i, k}]] = Rational(1, 2);
                row[column[{j, k}]] = Rational(1, 2);
                row[cols] = w({i, j, k});
                rows.push_back(std::move(row));
            }

    LinearSolve out;
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && rows[p][c] == 0) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[r]);
        Rational inv = 1 / rows[r][c];
        for (auto& x : rows[r]) x *= inv;
        for (std::size_t o = 0; o < rows.size(); ++o) {
            if (o == r || rows[o][c] == 0) continue;
            Rational f = rows[o][c];
            for (std::size_t k = 0; k <= cols; ++k) rows[o][k] -= f * rows[r][k];
        }
        pivot_col.push_back(c);
        ++r;
    }
    out.rank = r;
    for (std::size_t o = r; o < rows.size(); ++o)
        if (rows[o][cols] != 0) out.consistent = false;
    if (out.consistent && out.rank == cols) {
        DistanceMatrix x(n);
        for (std::size_t k = 0; k < r; ++k) x.set(pairs[pivot_col[k]].first, pairs[pivot_col[k]].second, rows[k][cols]);
        out.unique = x;
    }
    return out;
}

// Laplace expansion along the bottom row.
inline PuiseuxPoly det3_bottom_row(const PuiseuxMatrix3& m) {
    auto minor = [&](int skip) {
        std::array<int, 2> c{};
        int t = 0;
        for (int k = 0; k < 3; ++k)
            if (k != skip) c[static_cast<std::size_t>(t++)] = k;
        return m[0][c[0]] * m[1][c[1]] - m[0][c[1]] * m[1][c[0]];
    };
    return m[2][0] * minor(0) - m[2][1] * minor(1) + m[2][2] * minor(2);
}

inline std::uint64_t double_factorial(int k) {
    std::uint64_t out = 1;
    for (int v = k; v > 1; v -= 2) out *= static_cast<std::uint64_t>(v);
    return out;
}

// Four-point condition over all ordered 4-tuples drawn from [n], repeats allowed.
inline bool four_point_all_tuples(const DistanceMatrix& d) {
    int n = d.size();
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k)
                for (int l = 1; l <= n; ++l) {
                    std::vector<Rational> v{Rational(d(i, j) + d(k, l)), Rational(d(i, k) + d(j, l)),
                                            Rational(d(i, l) + d(j, k))};
                    Rational top = *std::max_element(v.begin(), v.end());
                    if (std::count(v.begin(), v.end(), top) < 2) return false;
                }
    return true;
}

// Random rational matrix with entries p/q, p in [-lo, hi], q in [1, den].
inline DistanceMatrix random_matrix(int n, Rng& rng, long lo, long hi, long den) {
    DistanceMatrix d(n);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            long p = static_cast<long>(uniform_below(rng, static_cast<std::uint64_t>(hi + lo + 1))) - lo;
            long r = 1 + static_cast<long>(uniform_below(rng, static_cast<std::uint64_t>(den)));
            Rational v{Integer(p), Integer(r)};
            v.canonicalize();
            d.set(i, j, v);
        }
    return d;
}

}  // namespace oracle
