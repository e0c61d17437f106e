#pragma once

// Newick I/O with exact rational branch lengths ("p/q" or terminating
// decimals). Leaf labels must be the integers 1..n.

#include "mdissim/rational.hpp"
#include "mdissim/weighted_tree.hpp"

#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mdissim {

class newick_error : public std::runtime_error {
public:
    newick_error(const std::string& what, std::size_t position)
        : std::runtime_error("newick: " + what + " at offset " + std::to_string(position)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

namespace detail {

class NewickParser {
public:
    explicit NewickParser(std::string_view text) : text_(text) {}

    WeightedTree parse() {
        NodeId root = subtree();
        skip_space();
        if (peek() == ':') {
            ++pos_;
            length();  // a root branch length carries no information
        }
        skip_space();
        if (peek() != ';') throw newick_error("expected ';'", pos_);
        ++pos_;
        skip_space();
        if (pos_ != text_.size()) throw newick_error("trailing characters after ';'", pos_);

        int n = static_cast<int>(leaf_positions_.size());
        for (int k = 1; k <= n; ++k)
            if (!leaf_positions_.count(k))
                throw newick_error("missing leaf label " + std::to_string(k) + " (labels must be 1.." +
                                       std::to_string(n) + ")",
                                   0);
        builder_.set_root(root);
        try {
            return builder_.freeze(n);
        } catch (const std::invalid_argument& e) {
            throw newick_error(e.what(), 0);
        }
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    NodeId subtree() {
        skip_space();
        if (peek() == '(') {
            std::size_t open = pos_++;
            NodeId node = builder_.add_node();
            while (true) {
                NodeId child = subtree();
                skip_space();
                if (peek() != ':') throw newick_error("expected ':' and a branch length", pos_);
                ++pos_;
                builder_.add_edge(node, child, length());
                skip_space();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                if (peek() == ')') {
                    ++pos_;
                    break;
                }
                throw newick_error("expected ',' or ')' in group opened at " + std::to_string(open), pos_);
            }
            skip_space();
            if (std::isalnum(static_cast<unsigned char>(peek())))
                throw newick_error("internal node labels are not supported", pos_);
            return node;
        }
        return leaf();
    }

    NodeId leaf() {
        std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (start == pos_) throw newick_error("expected a leaf label or '('", pos_);
        std::string digits(text_.substr(start, pos_ - start));
        if (digits.size() > 9) throw newick_error("leaf label too large", start);
        int label = std::stoi(digits);
        if (label < 1) throw newick_error("leaf labels start at 1", start);
        if (!leaf_positions_.emplace(label, start).second)
            throw newick_error("duplicate leaf label " + std::to_string(label), start);
        return builder_.add_node(label);
    }

    Rational length() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '/' || c == '-' || c == '+')
                ++pos_;
            else
                break;
        }
        if (start == pos_) throw newick_error("missing branch length", start);
        Rational w;
        try {
            w = parse_rational(text_.substr(start, pos_ - start));
        } catch (const std::invalid_argument& e) {
            throw newick_error(e.what(), start);
        }
        if (sgn(w) < 0) throw newick_error("negative branch length " + to_string(w), start);
        return w;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    TreeBuilder builder_;
    std::map<int, std::size_t> leaf_positions_;
};

inline void write_newick(std::ostream& out, const WeightedTree& tree, const RootedView& view, NodeId v,
                         bool weights) {
    if (tree.is_leaf(v)) {
        out << tree.label(v);
    } else {
        out << '(';
        bool first = true;
        for (NodeId c : view.children[v]) {
            if (!first) out << ',';
            first = false;
            write_newick(out, tree, view, c, weights);
        }
        out << ')';
    }
    if (view.parent[v] && weights) out << ':' << to_string(tree.edges()[view.parent_edge[v]].weight);
}

}  // namespace detail

inline WeightedTree parse_newick(std::string_view text) { return detail::NewickParser(text).parse(); }

/// Newick text rooted at the tree's root (or its default root), children
/// ordered by their smallest leaf label.
inline std::string serialize_newick(const WeightedTree& tree, bool weights = true) {
    std::ostringstream out;
    if (tree.node_count() == 2) {
        out << "(1" << (weights ? ":0" : "") << ",2";
        if (weights) out << ':' << to_string(tree.edges().front().weight);
        out << ");";
        return out.str();
    }
    RootedView view = rooted_view(tree, default_root(tree));
    detail::write_newick(out, tree, view, view.root, weights);
    out << ';';
    return out.str();
}

/// A string identifying the tree up to leaf-preserving isomorphism,
/// ignoring the root, degree-2 nodes and zero-length internal edges.
inline std::string canonical_newick(const WeightedTree& tree, bool weights = true) {
    return serialize_newick(normalised(tree), weights);
}

inline bool isomorphic(const WeightedTree& a, const WeightedTree& b) {
    return a.leaf_count() == b.leaf_count() && canonical_newick(a) == canonical_newick(b);
}

/// Same unweighted shape (zero-length internal edges still contracted).
inline bool same_topology(const WeightedTree& a, const WeightedTree& b) {
    return a.leaf_count() == b.leaf_count() && canonical_newick(a, false) == canonical_newick(b, false);
}

}  // namespace mdissim
