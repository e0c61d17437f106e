#pragma once

// Max-plus predicates: corner-locus membership, the four-point condition,
// ultrametricity and the three-term tropical Plücker relations.

#include "mdissim/dissim_tensor.hpp"
#include "mdissim/distance_matrix.hpp"
#include "mdissim/parallel.hpp"
#include "mdissim/subsets.hpp"
#include "mdissim/verdict.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdissim {

/// True iff the maximum of `values` occurs at two or more positions.
inline bool max_twice(std::span<const Rational> values) {
    if (values.empty()) throw std::invalid_argument("max_twice of an empty list");
    const Rational* best = &values[0];
    int count = 1;
    for (std::size_t t = 1; t < values.size(); ++t) {
        int c = cmp(values[t], *best);
        if (c > 0) {
            best = &values[t];
            count = 1;
        } else if (c == 0) {
            ++count;
        }
    }
    return count >= 2;
}

inline bool max_twice(std::initializer_list<Rational> values) {
    return max_twice(std::span<const Rational>(values.begin(), values.size()));
}

/// One term lambda + sum_i a_i x_i of a tropical (max-plus) polynomial.
template <class Key>
struct TropTerm {
    Rational coefficient;
    std::map<Key, long> exponents;
};

template <class Key>
struct TropValue {
    Rational value;
    std::vector<std::size_t> argmax;  // indices of all maximising terms

    /// The point lies on the tropical hypersurface (corner locus).
    bool on_hypersurface() const { return argmax.size() >= 2; }
};

template <class Key>
TropValue<Key> eval_trop_poly(std::span<const TropTerm<Key>> terms, const std::map<Key, Rational>& point) {
    if (terms.empty()) throw std::invalid_argument("tropical polynomial without terms");
    TropValue<Key> out;
    for (std::size_t t = 0; t < terms.size(); ++t) {
        Rational v = terms[t].coefficient;
        for (const auto& [key, power] : terms[t].exponents) {
            auto it = point.find(key);
            if (it == point.end()) throw std::invalid_argument("point lacks a coordinate used by the polynomial");
            v += Rational(power) * it->second;
        }
        if (out.argmax.empty() || v > out.value) {
            out.value = v;
            out.argmax.assign(1, t);
        } else if (v == out.value) {
            out.argmax.push_back(t);
        }
    }
    return out;
}

template <class Key>
TropValue<Key> eval_trop_poly(const std::vector<TropTerm<Key>>& terms, const std::map<Key, Rational>& point) {
    return eval_trop_poly(std::span<const TropTerm<Key>>(terms), point);
}

/// The three pairing sums D(i,j)+D(k,l), D(i,k)+D(j,l), D(i,l)+D(j,k).
inline std::array<Rational, 3> pairing_sums(const DistanceMatrix& d, int i, int j, int k, int l) {
    return {Rational(d(i, j) + d(k, l)), Rational(d(i, k) + d(j, l)), Rational(d(i, l) + d(j, k))};
}

namespace detail {

template <class Fn>
void for_each_quadruple(int n, bool strict, Fn&& fn) {
    if (strict) {
        for_each_subset(n, 4, [&](const Subset& q) { return fn(q[0], q[1], q[2], q[3]); });
        return;
    }
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j)
            for (int k = j; k <= n; ++k)
                for (int l = k; l <= n; ++l)
                    if (!fn(i, j, k, l)) return;
}

}  // namespace detail

/// Every quadruple at which the four-point condition fails, lexicographic.
/// With `strict` only distinct quadruples are examined; otherwise repeated
/// indices are allowed, which adds non-negativity and the triangle inequality.
inline std::vector<Witness> four_point_violations(const DistanceMatrix& d, bool strict = false) {
    std::vector<Witness> out;
    detail::for_each_quadruple(d.size(), strict, [&](int i, int j, int k, int l) {
        auto s = pairing_sums(d, i, j, k, l);
        if (!max_twice(s)) out.push_back(Witness{{}, {i, j, k, l}, {s[0], s[1], s[2]}});
        return true;
    });
    return out;
}

/// Four-point condition; the witness is the lexicographically first
/// violating quadruple.
inline Verdict four_point_check(const DistanceMatrix& d, bool strict = false) {
    std::optional<Witness> first;
    detail::for_each_quadruple(d.size(), strict, [&](int i, int j, int k, int l) {
        auto s = pairing_sums(d, i, j, k, l);
        if (max_twice(s)) return true;
        first = Witness{{}, {i, j, k, l}, {s[0], s[1], s[2]}};
        return false;
    });
    if (first) return Verdict::fail(*first, "maximum pairing sum attained once");
    if (strict && d.size() < 4) return Verdict::ok("no distinct quadruple");
    return Verdict::ok();
}

/// Ultrametric test over distinct triples: the maximum of D(i,j), D(i,k),
/// D(j,k) must be attained at least twice.
inline Verdict is_ultrametric(const DistanceMatrix& d) {
    std::optional<Witness> first;
    for_each_subset(d.size(), 3, [&](const Subset& t) {
        std::array<Rational, 3> v{d(t[0], t[1]), d(t[0], t[2]), d(t[1], t[2])};
        if (max_twice(v)) return true;
        first = Witness{{}, t, {v[0], v[1], v[2]}};
        return false;
    });
    if (first) return Verdict::fail(*first, "maximum of the triple attained once");
    return Verdict::ok();
}

namespace detail {

inline Rational tensor_at(const DissimTensor& w, const Subset& r, int a, int b) {
    Subset idx = r;
    idx.push_back(a);
    idx.push_back(b);
    return w(idx);
}

inline std::optional<Witness> first_plucker_violation(const DissimTensor& w, const Subset& r) {
    Subset rest = complement(w.size(), r);
    std::optional<Witness> found;
    for_each_subset(static_cast<int>(rest.size()), 4, [&](const Subset& pos) {
        int i = rest[pos[0] - 1], j = rest[pos[1] - 1], k = rest[pos[2] - 1], l = rest[pos[3] - 1];
        std::array<Rational, 3> s{Rational(tensor_at(w, r, i, j) + tensor_at(w, r, k, l)),
                                  Rational(tensor_at(w, r, i, k) + tensor_at(w, r, j, l)),
                                  Rational(tensor_at(w, r, i, l) + tensor_at(w, r, j, k))};
        if (max_twice(s)) return true;
        found = Witness{r, {i, j, k, l}, {s[0], s[1], s[2]}};
        return false;
    });
    return found;
}

}  // namespace detail

/// Membership in the three-term tropical Grassmannian: for every
/// (m-2)-subset R and distinct i,j,k,l outside R, the maximum of
/// W(Rij)+W(Rkl), W(Rik)+W(Rjl), W(Ril)+W(Rjk) is attained at least twice.
/// The witness is the first failure in lexicographic order of (R, ijkl).
inline Verdict in_Tmn(const DissimTensor& w, unsigned jobs = 1) {
    int n = w.size(), m = w.order();
    if (n < m + 2) return Verdict::ok("vacuous: n < m + 2 leaves no quadruple outside R");
    std::vector<Subset> groups = subsets_of(n, m - 2);
    std::vector<std::optional<Witness>> found(groups.size());
    detail::parallel_for(groups.size(), jobs,
                         [&](std::size_t g) { found[g] = detail::first_plucker_violation(w, groups[g]); });
    for (auto& f : found)
        if (f) return Verdict::fail(std::move(*f), "three-term Plücker maximum attained once");
    return Verdict::ok();
}

}  // namespace mdissim
