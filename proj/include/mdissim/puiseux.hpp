#pragma once

// Finite Puiseux polynomials (rational exponents, rational coefficients) and
// the valuation certificate: a 3 x n matrix whose 3 x 3 minors have
// valuations equal to minus the 3-dissimilarity map of a tree.

#include "mdissim/dissim.hpp"
#include "mdissim/dissim_tensor.hpp"
#include "mdissim/newick.hpp"
#include "mdissim/parallel.hpp"
#include "mdissim/rational.hpp"
#include "mdissim/trees.hpp"
#include "mdissim/verdict.hpp"

#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdissim {

struct PuiseuxTerm {
    Rational exponent;
    Rational coefficient;

    bool operator==(const PuiseuxTerm&) const = default;
};

/// Finite sum of c * t^q. Exponents strictly increase and no coefficient is
/// zero; the empty sum is the zero polynomial.
class PuiseuxPoly {
public:
    PuiseuxPoly() = default;

    static PuiseuxPoly monomial(const Rational& coefficient, const Rational& exponent) {
        PuiseuxPoly p;
        if (sgn(coefficient) != 0) p.terms_.push_back({exponent, coefficient});
        return p;
    }

    static PuiseuxPoly constant(const Rational& c) { return monomial(c, Rational(0)); }

    /// Any term list; like exponents are merged and zeros dropped.
    static PuiseuxPoly from_terms(const std::vector<PuiseuxTerm>& terms) {
        std::map<Rational, Rational> acc;
        for (const auto& t : terms) acc[t.exponent] += t.coefficient;
        return from_map(acc);
    }

    const std::vector<PuiseuxTerm>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    /// Smallest exponent; nullopt stands for +infinity (zero polynomial).
    std::optional<Rational> val() const {
        if (terms_.empty()) return std::nullopt;
        return terms_.front().exponent;
    }

    /// Largest exponent; nullopt stands for -infinity (zero polynomial).
    std::optional<Rational> deg() const {
        if (terms_.empty()) return std::nullopt;
        return terms_.back().exponent;
    }

    /// Substitutes t -> t^factor, i.e. maps every exponent q to factor * q.
    PuiseuxPoly substitute_power(const Rational& factor) const {
        if (sgn(factor) == 0) throw std::invalid_argument("substitute_power by 0 collapses the polynomial");
        std::vector<PuiseuxTerm> out;
        for (const auto& t : terms_) out.push_back({Rational(t.exponent * factor), t.coefficient});
        if (sgn(factor) < 0) std::reverse(out.begin(), out.end());
        PuiseuxPoly p;
        p.terms_ = std::move(out);
        return p;
    }

    PuiseuxPoly operator-() const {
        PuiseuxPoly p = *this;
        for (auto& t : p.terms_) t.coefficient = -t.coefficient;
        return p;
    }

    friend PuiseuxPoly operator+(const PuiseuxPoly& a, const PuiseuxPoly& b) {
        std::map<Rational, Rational> acc;
        for (const auto& t : a.terms_) acc[t.exponent] += t.coefficient;
        for (const auto& t : b.terms_) acc[t.exponent] += t.coefficient;
        return from_map(acc);
    }

    friend PuiseuxPoly operator-(const PuiseuxPoly& a, const PuiseuxPoly& b) { return a + (-b); }

    friend PuiseuxPoly operator*(const PuiseuxPoly& a, const PuiseuxPoly& b) {
        std::map<Rational, Rational> acc;
        for (const auto& x : a.terms_)
            for (const auto& y : b.terms_) acc[Rational(x.exponent + y.exponent)] += x.coefficient * y.coefficient;
        return from_map(acc);
    }

    PuiseuxPoly& operator+=(const PuiseuxPoly& o) { return *this = *this + o; }

    bool operator==(const PuiseuxPoly&) const = default;

private:
    static PuiseuxPoly from_map(const std::map<Rational, Rational>& acc) {
        PuiseuxPoly p;
        for (const auto& [e, c] : acc)
            if (sgn(c) != 0) p.terms_.push_back({e, c});
        return p;
    }

    std::vector<PuiseuxTerm> terms_;
};

inline std::optional<Rational> val(const PuiseuxPoly& p) { return p.val(); }
inline std::optional<Rational> deg(const PuiseuxPoly& p) { return p.deg(); }

inline std::string to_string(const PuiseuxPoly& p) {
    if (p.is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& t : p.terms()) {
        Rational c = t.coefficient;
        if (!first) out << (sgn(c) < 0 ? " - " : " + ");
        else if (sgn(c) < 0) out << "-";
        first = false;
        Rational mag = abs(c);
        bool unit = mag == 1;
        if (sgn(t.exponent) == 0) {
            out << to_string(mag);
            continue;
        }
        if (!unit) out << to_string(mag);
        out << "t";
        if (t.exponent != 1) out << "^(" << to_string(t.exponent) << ")";
    }
    return out.str();
}

using PuiseuxMatrix3 = std::array<std::array<PuiseuxPoly, 3>, 3>;

/// Laplace expansion along the first row.
inline PuiseuxPoly det3(const PuiseuxMatrix3& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// ---------------------------------------------------------------------------
// Certificate

/// An edge of the equidistant tree, identified by the leaves below it.
struct LabeledEdge {
    std::vector<int> clade;
    Rational height;  // height of the edge's upper node
    long label = 0;
};

struct Certificate3 {
    std::string newick;             // the certified tree
    int n = 0;
    Rational E;                     // rerooting constant, max_i D(i,n)
    std::string equidistant_newick; // the equidistant tree on leaves 1..n-1
    std::vector<LabeledEdge> edges;
    std::vector<PuiseuxPoly> x;                   // x_1 .. x_n
    std::array<std::vector<PuiseuxPoly>, 3> matrix;  // 3 x n, after t -> t^(-1/2)

    PuiseuxMatrix3 minor(int i, int j, int k) const {
        PuiseuxMatrix3 out;
        std::array<int, 3> cols{i, j, k};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) out[r][c] = matrix[r].at(static_cast<std::size_t>(cols[c] - 1));
        return out;
    }
};

namespace detail {

struct CertificateFrame {
    DistanceMatrix d;
    Rational e;
    DistanceMatrix rerooted;
    WeightedTree equidistant;
    RootedView view;
    std::vector<NodeId> edge_children;  // one per edge of the equidistant tree, preorder
    Rational top;                       // root height F
};

inline CertificateFrame certificate_frame(const WeightedTree& tree) {
    int n = tree.leaf_count();
    if (n < 3) throw std::invalid_argument("certificate needs n >= 3 leaves");
    if (!tree.strictly_positive()) throw std::invalid_argument("certificate needs strictly positive edge weights");
    CertificateFrame f;
    f.d = distance_matrix(tree);
    f.e = f.d(1, n);
    for (int i = 2; i < n; ++i) f.e = std::max(f.e, f.d(i, n));
    f.rerooted = reroot_ultrametric(f.d, f.e);
    std::vector<int> head(static_cast<std::size_t>(n - 1));
    std::iota(head.begin(), head.end(), 1);
    f.equidistant = build_equidistant(f.rerooted.restricted(head));
    f.view = rooted_view(f.equidistant, *f.equidistant.root());
    for (NodeId v : f.view.preorder)
        if (f.view.parent[v]) f.edge_children.push_back(v);
    f.top = f.view.depth[f.equidistant.leaf(1)];
    return f;
}

inline std::vector<int> leaves_below(const WeightedTree& tree, const RootedView& view, NodeId v) {
    std::vector<int> out;
    std::vector<NodeId> stack{v};
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        if (tree.is_leaf(u)) out.push_back(tree.label(u));
        for (NodeId c : view.children[u]) stack.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline Certificate3 assemble(const WeightedTree& tree, const CertificateFrame& f, std::span<const long> labels) {
    int n = tree.leaf_count();
    if (labels.size() != f.edge_children.size())
        throw std::invalid_argument("certificate needs one label per edge of the equidistant tree");
    Certificate3 c;
    c.newick = serialize_newick(tree);
    c.n = n;
    c.E = f.e;
    c.equidistant_newick = serialize_newick(f.equidistant);

    std::vector<PuiseuxPoly> edge_term(f.equidistant.node_count());
    for (std::size_t t = 0; t < f.edge_children.size(); ++t) {
        NodeId child = f.edge_children[t];
        Rational height = f.top - f.view.depth[*f.view.parent[child]];
        c.edges.push_back({leaves_below(f.equidistant, f.view, child), height, labels[t]});
        edge_term[child] = PuiseuxPoly::monomial(Rational(labels[t]), Rational(2 * height));
    }
    for (int i = 1; i < n; ++i) {
        PuiseuxPoly sum;
        for (NodeId v = f.equidistant.leaf(i); f.view.parent[v]; v = *f.view.parent[v]) sum += edge_term[v];
        c.x.push_back(std::move(sum));
    }
    c.x.push_back(PuiseuxPoly::monomial(Rational(1), Rational(2 * f.e)));

    for (int i = 1; i <= n; ++i) {
        Rational shift = i == n ? Rational(-2 * f.e) : Rational(2 * (f.d(i, n) - f.e));
        PuiseuxPoly scale = PuiseuxPoly::monomial(Rational(1), shift);
        const PuiseuxPoly& xi = c.x[static_cast<std::size_t>(i - 1)];
        std::array<PuiseuxPoly, 3> column{scale, scale * xi, scale * xi * xi};
        for (int r = 0; r < 3; ++r) c.matrix[r].push_back(column[r].substitute_power(Rational(-1, 2)));
    }
    return c;
}

inline bool degrees_match(const Certificate3& c, const DistanceMatrix& rerooted) {
    for (int i = 1; i <= c.n; ++i)
        for (int j = i + 1; j <= c.n; ++j) {
            auto dg = (c.x[static_cast<std::size_t>(j - 1)] - c.x[static_cast<std::size_t>(i - 1)]).deg();
            if (!dg || *dg != rerooted(i, j)) return false;
        }
    return true;
}

}  // namespace detail

/// Certificate with caller-chosen edge labels (one per edge of the
/// equidistant tree, in preorder), without checking for cancellation.
inline Certificate3 assemble_certificate(const WeightedTree& tree, std::span<const long> labels) {
    return detail::assemble(tree, detail::certificate_frame(tree), labels);
}

/// Number of labels assemble_certificate expects for `tree`.
inline std::size_t certificate_label_count(const WeightedTree& tree) {
    return detail::certificate_frame(tree).edge_children.size();
}

/// Builds the valuation certificate of a tree with strictly positive
/// rational weights. Labels are the distinct integers 1, 2, ... in preorder;
/// should a leading coefficient cancel, other distinct labels are tried.
inline Certificate3 build_certificate(const WeightedTree& tree) {
    detail::CertificateFrame f = detail::certificate_frame(tree);
    for (long stride = 1; stride <= 13; stride += 2) {
        std::vector<long> labels;
        for (std::size_t t = 0; t < f.edge_children.size(); ++t) labels.push_back(1 + stride * static_cast<long>(t));
        Certificate3 c = detail::assemble(tree, f, labels);
        if (detail::degrees_match(c, f.rerooted)) return c;
    }
    throw std::logic_error("build_certificate: no label assignment avoided cancellation");
}

struct CertificateRow {
    std::array<int, 3> triple;
    Rational expected;
    std::optional<Rational> neg_val;  // -val(det M(i,j,k)); nullopt if the minor vanishes

    bool holds() const { return neg_val && *neg_val == expected; }
};

/// -val of every 3 x 3 minor next to the tensor entry it should equal.
inline std::vector<CertificateRow> certificate_table(const Certificate3& c, const DissimTensor& w, unsigned jobs = 1) {
    if (w.order() != 3 || w.size() != c.n)
        throw std::invalid_argument("certificate and tensor dimensions differ");
    for (const auto& row : c.matrix)
        if (static_cast<int>(row.size()) != c.n) throw std::invalid_argument("certificate matrix has wrong width");
    std::vector<Subset> triples = subsets_of(c.n, 3);
    std::vector<CertificateRow> rows(triples.size());
    detail::parallel_for(triples.size(), jobs, [&](std::size_t t) {
        const Subset& s = triples[t];
        CertificateRow r{{s[0], s[1], s[2]}, w(s), std::nullopt};
        if (auto v = det3(c.minor(s[0], s[1], s[2])).val()) r.neg_val = Rational(-*v);
        rows[t] = std::move(r);
    });
    return rows;
}

/// Passes iff -val(det M(i,j,k)) = W(i,j,k) for every triple.
inline Verdict verify_certificate(const Certificate3& c, const DissimTensor& w, unsigned jobs = 1) {
    for (const auto& r : certificate_table(c, w, jobs)) {
        if (r.holds()) continue;
        Witness wit{{}, {r.triple[0], r.triple[1], r.triple[2]}, {r.expected}};
        if (r.neg_val) wit.values.push_back(*r.neg_val);
        return Verdict::fail(std::move(wit), r.neg_val ? "minor valuation differs (expected, -val)"
                                                       : "minor vanishes identically");
    }
    return Verdict::ok();
}

}  // namespace mdissim
