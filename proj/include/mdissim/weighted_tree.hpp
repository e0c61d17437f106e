#pragma once

#include "mdissim/rational.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdissim {

using NodeId = std::size_t;

struct Edge {
    NodeId a;
    NodeId b;
    Rational weight;
};

struct Incidence {
    NodeId node;
    std::size_t edge;
};

/// A tree whose degree-1 nodes carry the leaf labels 1..n, with non-negative
/// rational edge weights and an optional root. Immutable after construction.
class WeightedTree {
public:
    WeightedTree() = default;

    /// `leaf_nodes[k]` is the node carrying label k+1.
    WeightedTree(std::size_t node_count, std::vector<Edge> edges, std::vector<NodeId> leaf_nodes,
                 std::optional<NodeId> root = std::nullopt)
        : node_count_(node_count), edges_(std::move(edges)), leaf_nodes_(std::move(leaf_nodes)), root_(root) {
        validate();
    }

    std::size_t node_count() const noexcept { return node_count_; }
    int leaf_count() const noexcept { return static_cast<int>(leaf_nodes_.size()); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::optional<NodeId> root() const noexcept { return root_; }

    NodeId leaf(int label) const {
        if (label < 1 || label > leaf_count())
            throw std::out_of_range("leaf label " + std::to_string(label) + " out of range");
        return leaf_nodes_[static_cast<std::size_t>(label - 1)];
    }

    /// Leaf label of `node`, or 0 for internal nodes.
    int label(NodeId node) const { return labels_.at(node); }
    bool is_leaf(NodeId node) const { return labels_.at(node) != 0; }

    const std::vector<Incidence>& neighbors(NodeId node) const { return adjacency_.at(node); }
    std::size_t degree(NodeId node) const { return adjacency_.at(node).size(); }

    WeightedTree with_root(std::optional<NodeId> root) const {
        return WeightedTree(node_count_, edges_, leaf_nodes_, root);
    }

    bool strictly_positive() const {
        return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return sgn(e.weight) > 0; });
    }

    bool has_degree_two_vertices() const {
        for (NodeId v = 0; v < node_count_; ++v)
            if (!is_leaf(v) && degree(v) == 2) return true;
        return false;
    }

    Rational total_weight() const {
        Rational sum = 0;
        for (const auto& e : edges_) sum += e.weight;
        return sum;
    }

private:
    void validate() {
        auto fail = [](const std::string& why) { throw std::invalid_argument("invalid tree: " + why); };
        if (leaf_nodes_.size() < 2) fail("at least two leaves are required");
        if (edges_.size() + 1 != node_count_) fail("a tree on k nodes has k-1 edges");
        if (root_ && *root_ >= node_count_) fail("root is not a node");

        adjacency_.assign(node_count_, {});
        for (std::size_t t = 0; t < edges_.size(); ++t) {
            const Edge& e = edges_[t];
            if (e.a >= node_count_ || e.b >= node_count_ || e.a == e.b) fail("edge with bad endpoints");
            if (sgn(e.weight) < 0) fail("negative edge weight " + to_string(e.weight));
            adjacency_[e.a].push_back({e.b, t});
            adjacency_[e.b].push_back({e.a, t});
        }

        labels_.assign(node_count_, 0);
        for (std::size_t k = 0; k < leaf_nodes_.size(); ++k) {
            NodeId v = leaf_nodes_[k];
            if (v >= node_count_) fail("leaf node out of range");
            if (labels_[v] != 0) fail("node carries two leaf labels");
            labels_[v] = static_cast<int>(k + 1);
        }

        std::vector<bool> seen(node_count_, false);
        std::vector<NodeId> stack{0};
        seen[0] = true;
        std::size_t reached = 1;
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            for (const auto& inc : adjacency_[v])
                if (!seen[inc.node]) {
                    seen[inc.node] = true;
                    ++reached;
                    stack.push_back(inc.node);
                }
        }
        if (reached != node_count_) fail("graph is not connected");

        for (NodeId v = 0; v < node_count_; ++v) {
            if (labels_[v] != 0 && adjacency_[v].size() != 1)
                fail("leaf " + std::to_string(labels_[v]) + " must have degree 1");
            if (labels_[v] == 0 && adjacency_[v].size() <= 1) fail("unlabelled node of degree <= 1");
        }
    }

    std::size_t node_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<NodeId> leaf_nodes_;
    std::optional<NodeId> root_;
    std::vector<std::vector<Incidence>> adjacency_;
    std::vector<int> labels_;
};

/// Parent/child structure of a tree hung from `root`.
struct RootedView {
    NodeId root = 0;
    std::vector<std::optional<NodeId>> parent;
    std::vector<std::size_t> parent_edge;
    std::vector<std::vector<NodeId>> children;  // ordered by smallest leaf label below
    std::vector<Rational> depth;                // weighted distance from root
    std::vector<int> min_leaf;                  // smallest leaf label in the subtree
    std::vector<NodeId> preorder;

    bool is_ancestor(NodeId a, NodeId b) const {
        for (std::optional<NodeId> v = b; v; v = parent[*v])
            if (*v == a) return true;
        return false;
    }
};

inline RootedView rooted_view(const WeightedTree& tree, NodeId root) {
    std::size_t count = tree.node_count();
    if (root >= count) throw std::invalid_argument("root " + std::to_string(root) + " is not a node of the tree");
    RootedView view;
    view.root = root;
    view.parent.assign(count, std::nullopt);
    view.parent_edge.assign(count, 0);
    view.children.assign(count, {});
    view.depth.assign(count, Rational(0));
    view.min_leaf.assign(count, 0);

    std::vector<bool> seen(count, false);
    std::vector<NodeId> stack{root};
    seen[root] = true;
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        view.preorder.push_back(v);
        for (const auto& inc : tree.neighbors(v)) {
            if (seen[inc.node]) continue;
            seen[inc.node] = true;
            view.parent[inc.node] = v;
            view.parent_edge[inc.node] = inc.edge;
            view.depth[inc.node] = view.depth[v] + tree.edges()[inc.edge].weight;
            view.children[v].push_back(inc.node);
            stack.push_back(inc.node);
        }
    }
    for (auto it = view.preorder.rbegin(); it != view.preorder.rend(); ++it) {
        NodeId v = *it;
        int best = tree.label(v);
        for (NodeId c : view.children[v])
            if (best == 0 || view.min_leaf[c] < best) best = view.min_leaf[c];
        view.min_leaf[v] = best;
    }
    for (auto& kids : view.children)
        std::sort(kids.begin(), kids.end(), [&](NodeId x, NodeId y) { return view.min_leaf[x] < view.min_leaf[y]; });
    // preorder consistent with the sorted child order
    view.preorder.clear();
    stack.assign(1, root);
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        view.preorder.push_back(v);
        for (auto c = view.children[v].rbegin(); c != view.children[v].rend(); ++c) stack.push_back(*c);
    }
    return view;
}

/// Root used when a tree has none: the internal neighbour of leaf 1.
inline NodeId default_root(const WeightedTree& tree) {
    if (tree.root() && !tree.is_leaf(*tree.root())) return *tree.root();
    return tree.neighbors(tree.leaf(1)).front().node;
}

/// Leaf relabelling: leaf i of `tree` becomes leaf perm[i] (perm is 1-based).
inline WeightedTree relabel_leaves(const WeightedTree& tree, std::span<const int> perm) {
    int n = tree.leaf_count();
    if (static_cast<int>(perm.size()) != n + 1) throw std::invalid_argument("permutation size mismatch");
    std::vector<NodeId> leaves(static_cast<std::size_t>(n), 0);
    std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
    for (int i = 1; i <= n; ++i) {
        int to = perm[i];
        if (to < 1 || to > n || used[to]) throw std::invalid_argument("not a permutation of the leaf labels");
        used[to] = true;
        leaves[static_cast<std::size_t>(to - 1)] = tree.leaf(i);
    }
    return WeightedTree(tree.node_count(), tree.edges(), std::move(leaves), tree.root());
}

namespace detail {

/// Editable tree used while building or rewriting trees; frozen into a
/// WeightedTree with compacted node ids.
class TreeBuilder {
public:
    NodeId add_node(int label = 0) {
        adj_.emplace_back();
        labels_.push_back(label);
        alive_.push_back(true);
        return adj_.size() - 1;
    }

    void add_edge(NodeId a, NodeId b, const Rational& w) {
        adj_[a][b] = w;
        adj_[b][a] = w;
    }

    void remove_edge(NodeId a, NodeId b) {
        adj_[a].erase(b);
        adj_[b].erase(a);
    }

    Rational weight(NodeId a, NodeId b) const { return adj_[a].at(b); }

    /// Splits edge a-b by a new node at distance `offset` from a.
    NodeId subdivide(NodeId a, NodeId b, const Rational& offset) {
        Rational w = weight(a, b);
        remove_edge(a, b);
        NodeId mid = add_node();
        add_edge(a, mid, offset);
        add_edge(mid, b, Rational(w - offset));
        return mid;
    }

    /// Merges b into a along their (zero-weight) edge.
    void contract(NodeId a, NodeId b) {
        remove_edge(a, b);
        for (auto [c, w] : std::map<NodeId, Rational>(adj_[b])) {
            remove_edge(b, c);
            add_edge(a, c, w);
        }
        alive_[b] = false;
        if (root_ == b) root_ = a;
    }

    /// Removes an unlabelled degree-2 node, joining its two edges.
    void suppress(NodeId v) {
        auto it = adj_[v].begin();
        auto [x, wx] = *it;
        auto [y, wy] = *std::next(it);
        remove_edge(v, x);
        remove_edge(v, y);
        add_edge(x, y, Rational(wx + wy));
        alive_[v] = false;
        if (root_ == v) root_.reset();
    }

    const std::map<NodeId, Rational>& adjacent(NodeId v) const { return adj_[v]; }
    std::size_t degree(NodeId v) const { return adj_[v].size(); }
    int label(NodeId v) const { return labels_[v]; }
    void set_label(NodeId v, int label) { labels_[v] = label; }
    bool alive(NodeId v) const { return alive_[v]; }
    std::size_t capacity() const { return adj_.size(); }
    void set_root(std::optional<NodeId> r) { root_ = r; }

    /// Contracts zero-weight internal edges and suppresses unlabelled degree-2
    /// nodes (the root included) until neither applies.
    void normalise() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (NodeId v = 0; v < capacity(); ++v) {
                if (!alive_[v] || labels_[v] != 0) continue;
                for (const auto& [u, w] : adj_[v]) {
                    if (labels_[u] == 0 && sgn(w) == 0) {
                        contract(v, u);
                        changed = true;
                        break;
                    }
                }
            }
            for (NodeId v = 0; v < capacity(); ++v) {
                if (alive_[v] && labels_[v] == 0 && adj_[v].size() == 2) {
                    suppress(v);
                    changed = true;
                }
            }
        }
    }

    WeightedTree freeze(int leaf_count) const {
        std::vector<NodeId> remap(capacity(), static_cast<NodeId>(-1));
        NodeId next = 0;
        for (NodeId v = 0; v < capacity(); ++v)
            if (alive_[v]) remap[v] = next++;
        std::vector<Edge> edges;
        for (NodeId v = 0; v < capacity(); ++v) {
            if (!alive_[v]) continue;
            for (const auto& [u, w] : adj_[v])
                if (v < u) edges.push_back({remap[v], remap[u], w});
        }
        std::vector<NodeId> leaves(static_cast<std::size_t>(leaf_count), static_cast<NodeId>(-1));
        for (NodeId v = 0; v < capacity(); ++v)
            if (alive_[v] && labels_[v] > 0) leaves.at(static_cast<std::size_t>(labels_[v] - 1)) = remap[v];
        std::optional<NodeId> root;
        if (root_ && alive_[*root_]) root = remap[*root_];
        return WeightedTree(next, std::move(edges), std::move(leaves), root);
    }

    static TreeBuilder from(const WeightedTree& tree) {
        TreeBuilder b;
        for (NodeId v = 0; v < tree.node_count(); ++v) b.add_node(tree.label(v));
        for (const auto& e : tree.edges()) b.add_edge(e.a, e.b, e.weight);
        b.root_ = tree.root();
        return b;
    }

private:
    std::vector<std::map<NodeId, Rational>> adj_;
    std::vector<int> labels_;
    std::vector<bool> alive_;
    std::optional<NodeId> root_;
};

}  // namespace detail

/// Drops the root, contracts zero-weight internal edges and suppresses
/// degree-2 nodes. Two-leaf trees keep a single midpoint node.
inline WeightedTree normalised(const WeightedTree& tree) {
    if (tree.leaf_count() == 2) {
        detail::TreeBuilder b;
        NodeId mid = b.add_node();
        Rational d = 0;
        for (const auto& e : tree.edges()) d += e.weight;
        Rational h = half(d);
        b.add_edge(mid, b.add_node(1), h);
        b.add_edge(mid, b.add_node(2), h);
        return b.freeze(2);
    }
    auto b = detail::TreeBuilder::from(tree);
    b.set_root(std::nullopt);
    b.normalise();
    return b.freeze(tree.leaf_count());
}

}  // namespace mdissim
