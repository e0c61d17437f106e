#pragma once

// Tree algorithms: leaf distances, Steiner (minimal spanning subtree)
// weights, well-numbering, contraction, random generation, topology
// enumeration and exact reconstruction from a tree metric.

#include "mdissim/distance_matrix.hpp"
#include "mdissim/newick.hpp"
#include "mdissim/tropical.hpp"
#include "mdissim/verdict.hpp"
#include "mdissim/weighted_tree.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdissim {

/// D(i,j) = total weight of the unique path between leaves i and j.
inline DistanceMatrix distance_matrix(const WeightedTree& tree) {
    int n = tree.leaf_count();
    DistanceMatrix d(n);
    for (int i = 1; i < n; ++i) {
        RootedView view = rooted_view(tree, tree.leaf(i));
        for (int j = i + 1; j <= n; ++j) d.set(i, j, view.depth[tree.leaf(j)]);
    }
    return d;
}

namespace detail {

/// Edge sets of leaf-to-leaf paths, found by climbing to the common ancestor
/// in a fixed rooting.
class PathFinder {
public:
    explicit PathFinder(const WeightedTree& tree) : view_(rooted_view(tree, 0)), level_(tree.node_count(), 0) {
        for (NodeId v : view_.preorder)
            if (view_.parent[v]) level_[v] = level_[*view_.parent[v]] + 1;
    }

    template <class Fn>
    void for_each_edge_on_path(NodeId a, NodeId b, Fn&& fn) const {
        while (a != b) {
            if (level_[a] >= level_[b]) {
                fn(view_.parent_edge[a]);
                a = *view_.parent[a];
            } else {
                fn(view_.parent_edge[b]);
                b = *view_.parent[b];
            }
        }
    }

    /// Nodes from a to b inclusive, in order.
    std::vector<NodeId> path_nodes(NodeId a, NodeId b) const {
        std::vector<NodeId> front, back;
        while (a != b) {
            if (level_[a] >= level_[b]) {
                front.push_back(a);
                a = *view_.parent[a];
            } else {
                back.push_back(b);
                b = *view_.parent[b];
            }
        }
        front.push_back(a);
        front.insert(front.end(), back.rbegin(), back.rend());
        return front;
    }

private:
    RootedView view_;
    std::vector<std::size_t> level_;
};

inline void check_leaf_set(const WeightedTree& tree, std::span<const int> leaves) {
    std::set<int> seen;
    for (int v : leaves) {
        if (v < 1 || v > tree.leaf_count())
            throw std::invalid_argument("leaf " + std::to_string(v) + " is not in the tree");
        if (!seen.insert(v).second) throw std::invalid_argument("leaf " + std::to_string(v) + " listed twice");
    }
}

/// Edge mask of the union of all pairwise paths between `leaves`.
inline std::vector<bool> steiner_edges(const WeightedTree& tree, std::span<const int> leaves) {
    PathFinder paths(tree);
    std::vector<bool> used(tree.edges().size(), false);
    for (std::size_t a = 0; a < leaves.size(); ++a)
        for (std::size_t b = a + 1; b < leaves.size(); ++b)
            paths.for_each_edge_on_path(tree.leaf(leaves[a]), tree.leaf(leaves[b]),
                                        [&](std::size_t e) { used[e] = true; });
    return used;
}

}  // namespace detail

/// Weight of the smallest subtree containing the leaves V, computed as the
/// union of all pairwise paths.
inline Rational steiner_weight(const WeightedTree& tree, std::span<const int> leaves) {
    if (leaves.size() < 2) throw std::invalid_argument("steiner_weight needs at least two leaves");
    detail::check_leaf_set(tree, leaves);
    std::vector<bool> used = detail::steiner_edges(tree, leaves);
    Rational total = 0;
    for (std::size_t e = 0; e < used.size(); ++e)
        if (used[e]) total += tree.edges()[e].weight;
    return total;
}

inline Rational steiner_weight(const WeightedTree& tree, std::initializer_list<int> leaves) {
    return steiner_weight(tree, std::span<const int>(leaves.begin(), leaves.size()));
}

/// True iff leaves a and b form a cherry of the minimal subtree spanning
/// `leaves` (after degree-2 nodes of that subtree are suppressed).
inline bool is_cherry_of_subtree(const WeightedTree& tree, std::span<const int> leaves, int a, int b) {
    detail::check_leaf_set(tree, leaves);
    if (std::find(leaves.begin(), leaves.end(), a) == leaves.end() ||
        std::find(leaves.begin(), leaves.end(), b) == leaves.end() || a == b)
        throw std::invalid_argument("cherry candidates must be two distinct members of the leaf set");
    std::vector<bool> used = detail::steiner_edges(tree, leaves);
    std::vector<int> degree(tree.node_count(), 0);
    for (std::size_t e = 0; e < used.size(); ++e)
        if (used[e]) {
            ++degree[tree.edges()[e].a];
            ++degree[tree.edges()[e].b];
        }
    detail::PathFinder paths(tree);
    std::vector<NodeId> path = paths.path_nodes(tree.leaf(a), tree.leaf(b));
    int branching = 0;
    for (std::size_t t = 1; t + 1 < path.size(); ++t)
        if (degree[path[t]] >= 3) ++branching;
    return branching <= 1;
}

// ---------------------------------------------------------------------------
// Well-numbering

/// Finite-support sequence of naturals, ordered by the first differing entry
/// (missing entries read as 0).
struct AlphaLabel {
    std::vector<unsigned> digits;

    std::size_t depth() const {
        return static_cast<std::size_t>(std::count_if(digits.begin(), digits.end(), [](unsigned d) { return d != 0; }));
    }

    friend int compare(const AlphaLabel& x, const AlphaLabel& y) {
        std::size_t len = std::max(x.digits.size(), y.digits.size());
        for (std::size_t t = 0; t < len; ++t) {
            unsigned a = t < x.digits.size() ? x.digits[t] : 0;
            unsigned b = t < y.digits.size() ? y.digits[t] : 0;
            if (a != b) return a < b ? -1 : 1;
        }
        return 0;
    }
    friend bool operator<(const AlphaLabel& x, const AlphaLabel& y) { return compare(x, y) < 0; }
    friend bool operator==(const AlphaLabel& x, const AlphaLabel& y) { return compare(x, y) == 0; }
};

struct WellNumbering {
    RootedView view;
    std::vector<AlphaLabel> alpha;  // per node
    std::vector<int> relabel;       // relabel[old leaf] = new leaf, 1-based

    /// The tree with leaves renumbered so that alpha increases with the label.
    WeightedTree apply(const WeightedTree& tree) const { return relabel_leaves(tree, relabel); }
};

/// Labels every node by appending the child's position (1, 2, ...) to its
/// parent's label, starting from (0, 0, ...) at `root`; children are taken in
/// order of their smallest leaf. Leaves are then renumbered by increasing
/// label.
inline WellNumbering well_number(const WeightedTree& tree, NodeId root) {
    WellNumbering out;
    out.view = rooted_view(tree, root);
    out.alpha.assign(tree.node_count(), AlphaLabel{});
    for (NodeId v : out.view.preorder) {
        unsigned position = 0;
        for (NodeId c : out.view.children[v]) {
            AlphaLabel label = out.alpha[v];
            label.digits.push_back(++position);
            out.alpha[c] = std::move(label);
        }
    }
    std::vector<int> leaves;
    for (int i = 1; i <= tree.leaf_count(); ++i) leaves.push_back(i);
    std::sort(leaves.begin(), leaves.end(),
              [&](int x, int y) { return out.alpha[tree.leaf(x)] < out.alpha[tree.leaf(y)]; });
    out.relabel.assign(static_cast<std::size_t>(tree.leaf_count()) + 1, 0);
    for (std::size_t t = 0; t < leaves.size(); ++t) out.relabel[leaves[t]] = static_cast<int>(t) + 1;
    return out;
}

// ---------------------------------------------------------------------------
// Contraction

struct Contraction {
    WeightedTree tree;
    Rational collapsed_weight;     // weight of the minimal subtree [R]
    int contracted_label = 1;      // label of the leaf standing for R
    std::vector<int> label_map;    // label_map[old] = new label; members of R map to contracted_label
};

/// Collapses the minimal subtree spanning R to a single leaf, labelled 1; the
/// remaining leaves keep their relative order as 2, 3, .... When the collapsed
/// node still branches, the new leaf hangs from it by a zero-weight edge.
inline Contraction contract_subtree(const WeightedTree& tree, std::span<const int> r) {
    if (r.empty()) throw std::invalid_argument("contract_subtree needs a non-empty leaf set");
    detail::check_leaf_set(tree, r);
    int n = tree.leaf_count();
    if (static_cast<int>(r.size()) >= n) throw std::invalid_argument("contract_subtree: R must leave a leaf outside");

    std::vector<bool> used = detail::steiner_edges(tree, r);
    std::vector<bool> inside(tree.node_count(), false);
    for (int v : r) inside[tree.leaf(v)] = true;
    Contraction out;
    out.collapsed_weight = 0;
    for (std::size_t e = 0; e < used.size(); ++e)
        if (used[e]) {
            inside[tree.edges()[e].a] = inside[tree.edges()[e].b] = true;
            out.collapsed_weight += tree.edges()[e].weight;
        }

    out.label_map.assign(static_cast<std::size_t>(n) + 1, 0);
    std::vector<bool> in_r(static_cast<std::size_t>(n) + 1, false);
    for (int v : r) in_r[v] = true;
    int next = 2;
    for (int i = 1; i <= n; ++i) out.label_map[i] = in_r[i] ? 1 : next++;

    detail::TreeBuilder b;
    std::vector<NodeId> map(tree.node_count());
    NodeId collapsed = b.add_node();
    for (NodeId v = 0; v < tree.node_count(); ++v) {
        if (inside[v]) {
            map[v] = collapsed;
        } else {
            int old = tree.label(v);
            map[v] = b.add_node(old ? out.label_map[old] : 0);
        }
    }
    for (std::size_t e = 0; e < used.size(); ++e) {
        if (used[e]) continue;
        const Edge& edge = tree.edges()[e];
        b.add_edge(map[edge.a], map[edge.b], edge.weight);
    }
    if (b.degree(collapsed) == 1) {
        b.set_label(collapsed, 1);
    } else {
        NodeId leaf = b.add_node(1);
        b.add_edge(collapsed, leaf, Rational(0));
    }
    out.tree = b.freeze(n - static_cast<int>(r.size()) + 1);
    return out;
}

inline Contraction contract_subtree(const WeightedTree& tree, std::initializer_list<int> r) {
    return contract_subtree(tree, std::span<const int>(r.begin(), r.size()));
}

// ---------------------------------------------------------------------------
// Random trees and topology enumeration

enum class TreeShape { caterpillar, uniform_topology };

/// Edge weights p/q with p in [1, max_numerator] (or [0, ...] when zeros
/// are allowed) and q in [1, max_denominator].
struct WeightSampler {
    long max_numerator = 10;
    long max_denominator = 4;
    bool allow_zero = false;
};

using Rng = std::mt19937_64;

/// Uniform integer in [0, bound). Rejection sampling keeps the sequence
/// identical across standard libraries.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below(0)");
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

inline Rational sample_weight(Rng& rng, const WeightSampler& s) {
    long lo = s.allow_zero ? 0 : 1;
    long num = lo + static_cast<long>(uniform_below(rng, static_cast<std::uint64_t>(s.max_numerator - lo + 1)));
    long den = 1 + static_cast<long>(uniform_below(rng, static_cast<std::uint64_t>(s.max_denominator)));
    Rational w(num, den);
    w.canonicalize();
    return w;
}

namespace detail {

/// Unrooted binary topology built by inserting leaf k (k = 4..n) into edge
/// `choices[k-4]` of the current tree; edges are kept in insertion order.
struct InsertionTree {
    TreeBuilder builder;
    std::vector<std::pair<NodeId, NodeId>> edges;

    explicit InsertionTree(int n, std::span<const std::size_t> choices) {
        NodeId centre = builder.add_node();
        for (int k = 1; k <= 3; ++k) {
            NodeId leaf = builder.add_node(k);
            builder.add_edge(centre, leaf, Rational(1));
            edges.emplace_back(centre, leaf);
        }
        for (int k = 4; k <= n; ++k) {
            auto [a, b] = edges.at(choices[static_cast<std::size_t>(k - 4)]);
            NodeId mid = builder.subdivide(a, b, Rational(0));
            NodeId leaf = builder.add_node(k);
            builder.add_edge(mid, b, Rational(1));
            builder.add_edge(a, mid, Rational(1));
            builder.add_edge(mid, leaf, Rational(1));
            edges.at(choices[static_cast<std::size_t>(k - 4)]) = {a, mid};
            edges.emplace_back(mid, b);
            edges.emplace_back(mid, leaf);
        }
    }
};

}  // namespace detail

/// Deterministic random binary tree with n leaves. `uniform_topology` draws
/// each of the (2n-5)!! unrooted topologies with equal probability.
inline WeightedTree random_tree(int n, std::uint64_t seed, TreeShape shape = TreeShape::uniform_topology,
                                const WeightSampler& sampler = {}) {
    if (n < 3) throw std::invalid_argument("random_tree needs n >= 3");
    if (sampler.max_numerator < 1 || sampler.max_denominator < 1)
        throw std::invalid_argument("weight sampler bounds must be positive");
    Rng rng(seed);
    detail::TreeBuilder b;
    std::vector<std::pair<NodeId, NodeId>> edges;

    if (shape == TreeShape::uniform_topology) {
        std::vector<std::size_t> choices;
        for (int k = 4; k <= n; ++k) choices.push_back(uniform_below(rng, static_cast<std::uint64_t>(2 * k - 5)));
        detail::InsertionTree t(n, choices);
        b = std::move(t.builder);
        edges = std::move(t.edges);
    } else {
        std::vector<int> order(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) order[i] = i + 1;
        for (std::size_t i = order.size() - 1; i > 0; --i)
            std::swap(order[i], order[uniform_below(rng, i + 1)]);
        std::vector<NodeId> spine;
        for (int t = 0; t < n - 2; ++t) spine.push_back(b.add_node());
        for (std::size_t t = 1; t < spine.size(); ++t) edges.emplace_back(spine[t - 1], spine[t]);
        auto hang = [&](NodeId at, int label) { edges.emplace_back(at, b.add_node(label)); };
        hang(spine.front(), order[0]);
        for (int t = 0; t < n - 2; ++t) hang(spine[static_cast<std::size_t>(t)], order[static_cast<std::size_t>(t) + 1]);
        hang(spine.back(), order[static_cast<std::size_t>(n) - 1]);
    }
    for (auto [a, c] : edges) b.add_edge(a, c, sample_weight(rng, sampler));
    return b.freeze(n);
}

/// (2n-5)!!, the number of unrooted binary leaf-labelled topologies.
inline std::uint64_t topology_count(int n) {
    if (n < 3) throw std::invalid_argument("topology_count needs n >= 3");
    std::uint64_t count = 1;
    for (std::uint64_t k = 3; k + 5 <= 2 * static_cast<std::uint64_t>(n); k += 2) count *= k;
    return count;
}

/// Walks every unrooted binary topology on n leaves exactly once, as trees
/// with unit edge weights, in leaf-insertion (odometer) order.
class TopologyIterator {
public:
    static constexpr int default_cap = 8;

    explicit TopologyIterator(int n, int cap = default_cap) : n_(n) {
        if (n < 3 || n > cap)
            throw std::invalid_argument("enumerate_topologies: n must lie in [3, " + std::to_string(cap) + "], got " +
                                        std::to_string(n));
        choices_.assign(static_cast<std::size_t>(n - 3), 0);
    }

    std::optional<WeightedTree> next() {
        if (done_) return std::nullopt;
        detail::InsertionTree t(n_, choices_);
        WeightedTree out = t.builder.freeze(n_);
        advance();
        return out;
    }

    int leaves() const noexcept { return n_; }

private:
    void advance() {
        for (std::size_t t = choices_.size(); t-- > 0;) {
            std::size_t k = t + 4;
            if (++choices_[t] < 2 * k - 5) return;
            choices_[t] = 0;
        }
        done_ = true;
    }

    int n_;
    std::vector<std::size_t> choices_;
    bool done_ = false;
};

inline TopologyIterator enumerate_topologies(int n, int cap = TopologyIterator::default_cap) {
    return TopologyIterator(n, cap);
}

// ---------------------------------------------------------------------------
// Realisations

/// Rooted equidistant tree realising an ultrametric: clusters are merged at
/// height D/2 in increasing order of D, ties forming one multifurcation.
inline WeightedTree build_equidistant(const DistanceMatrix& d) {
    if (!d.non_negative()) throw std::invalid_argument("build_equidistant: negative entry");
    if (Verdict v = is_ultrametric(d); !v) throw verdict_error("build_equidistant: not an ultrametric", v);

    struct Cluster {
        NodeId node;
        int representative;
        Rational height;
    };
    int n = d.size();
    detail::TreeBuilder b;
    std::vector<Cluster> clusters;
    for (int i = 1; i <= n; ++i) clusters.push_back({b.add_node(i), i, Rational(0)});

    while (clusters.size() > 1) {
        Rational low = d(clusters[0].representative, clusters[1].representative);
        for (std::size_t x = 0; x < clusters.size(); ++x)
            for (std::size_t y = x + 1; y < clusters.size(); ++y)
                low = std::min(low, d(clusters[x].representative, clusters[y].representative));
        // at the minimum level "D == low" is an equivalence on clusters
        std::vector<Cluster> next;
        std::vector<bool> taken(clusters.size(), false);
        for (std::size_t x = 0; x < clusters.size(); ++x) {
            if (taken[x]) continue;
            std::vector<std::size_t> group{x};
            for (std::size_t y = x + 1; y < clusters.size(); ++y)
                if (!taken[y] && d(clusters[x].representative, clusters[y].representative) == low) group.push_back(y);
            if (group.size() == 1) {
                next.push_back(clusters[x]);
                continue;
            }
            Rational height = half(low);
            NodeId parent = b.add_node();
            for (std::size_t g : group) {
                taken[g] = true;
                b.add_edge(parent, clusters[g].node, Rational(height - clusters[g].height));
            }
            next.push_back({parent, clusters[x].representative, height});
        }
        clusters = std::move(next);
    }
    b.set_root(clusters.front().node);
    return b.freeze(n);
}

/// The unique tree realising a tree metric, built by exact leaf insertion
/// and normalised (no degree-2 nodes, no zero-length internal edges). Two
/// leaves are joined through a midpoint node.
inline WeightedTree reconstruct_tree(const DistanceMatrix& d) {
    int n = d.size();
    if (Verdict v = four_point_check(d, false); !v) throw verdict_error("reconstruct_tree: not a tree metric", v);

    detail::TreeBuilder b;
    std::vector<NodeId> leaf(static_cast<std::size_t>(n) + 1);
    leaf[1] = b.add_node(1);
    leaf[2] = b.add_node(2);
    b.add_edge(leaf[1], leaf[2], d(1, 2));
    if (n == 2) {
        b.subdivide(leaf[1], leaf[2], half(d(1, 2)));
        return b.freeze(2);
    }

    auto path = [&](NodeId from, NodeId to) {
        std::vector<std::optional<NodeId>> parent(b.capacity());
        std::vector<bool> seen(b.capacity(), false);
        std::vector<NodeId> queue{from};
        seen[from] = true;
        for (std::size_t q = 0; q < queue.size(); ++q)
            for (const auto& [u, w] : b.adjacent(queue[q]))
                if (!seen[u]) {
                    seen[u] = true;
                    parent[u] = queue[q];
                    queue.push_back(u);
                }
        std::vector<NodeId> nodes{to};
        while (nodes.back() != from) nodes.push_back(*parent[nodes.back()]);
        std::reverse(nodes.begin(), nodes.end());
        return nodes;
    };

    for (int k = 3; k <= n; ++k) {
        // the attachment point lies on the placed pair minimising the pendant length
        int bi = 1, bj = 2;
        Rational best_pendant = half(d(1, k) + d(2, k) - d(1, 2));
        for (int i = 1; i < k; ++i)
            for (int j = i + 1; j < k; ++j) {
                Rational p = half(d(i, k) + d(j, k) - d(i, j));
                if (p < best_pendant) {
                    best_pendant = p;
                    bi = i;
                    bj = j;
                }
            }
        Rational offset = half(d(bi, k) + d(bi, bj) - d(bj, k));
        std::vector<NodeId> nodes = path(leaf[bi], leaf[bj]);

        // cumulative distances along the path; interior path nodes are internal
        std::vector<Rational> at(nodes.size(), Rational(0));
        for (std::size_t t = 1; t < nodes.size(); ++t) at[t] = at[t - 1] + b.weight(nodes[t - 1], nodes[t]);
        std::size_t last = nodes.size() - 1;

        std::optional<NodeId> attach;
        for (std::size_t t = 1; t < last && !attach; ++t)
            if (at[t] == offset) attach = nodes[t];
        for (std::size_t t = 0; t < last && !attach; ++t)
            if (at[t] < offset && offset < at[t + 1]) attach = b.subdivide(nodes[t], nodes[t + 1], offset - at[t]);
        if (!attach && offset <= at[0]) attach = b.subdivide(nodes[0], nodes[1], Rational(0));
        if (!attach && offset >= at[last])
            attach = b.subdivide(nodes[last - 1], nodes[last], b.weight(nodes[last - 1], nodes[last]));
        if (!attach) throw std::logic_error("reconstruct_tree: attachment point not found");
        leaf[k] = b.add_node(k);
        b.add_edge(*attach, leaf[k], best_pendant);
    }
    b.normalise();
    WeightedTree tree = b.freeze(n);
    if (distance_matrix(tree) != d) throw std::logic_error("reconstruct_tree: realisation does not reproduce D");
    return tree;
}

}  // namespace mdissim
