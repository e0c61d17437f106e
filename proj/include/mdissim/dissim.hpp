#pragma once

// m-dissimilarity maps from pairwise dissimilarities: the tour formula
// phi_m (half the shortest closed tour through the m leaves), its m = 3 closed
// form and inverse, the m = 3 membership decision, and the m = 4
// pairing-coordinate characterisation.

#include "mdissim/dissim_tensor.hpp"
#include "mdissim/distance_matrix.hpp"
#include "mdissim/parallel.hpp"
#include "mdissim/subsets.hpp"
#include "mdissim/trees.hpp"
#include "mdissim/tropical.hpp"
#include "mdissim/verdict.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdissim {

// ---------------------------------------------------------------------------
// phi_m

enum class PhiMethod { automatic, brute_force, dynamic_programming };

struct PhiOptions {
    PhiMethod method = PhiMethod::automatic;
    unsigned jobs = 1;
    /// automatic switches from tour enumeration to subset DP above this m
    int dp_threshold = 6;
};

/// Sum of D over consecutive leaves of the closed tour.
inline Rational cycle_sum(const DistanceMatrix& d, std::span<const int> tour) {
    Rational sum = 0;
    for (std::size_t t = 0; t < tour.size(); ++t) sum += d(tour[t], tour[(t + 1) % tour.size()]);
    return sum;
}

/// Shortest closed tour through `subset`, enumerating (m-1)!/2 tours: the
/// first leaf is fixed and a tour is kept only if its second leaf precedes
/// its last (reversal gives the same sum).
inline Rational shortest_tour_brute_force(const DistanceMatrix& d, std::span<const int> subset) {
    std::size_t m = subset.size();
    if (m < 2) throw std::invalid_argument("a tour needs at least two leaves");
    std::vector<int> rest(subset.begin() + 1, subset.end());
    std::sort(rest.begin(), rest.end());
    std::vector<int> tour(m);
    tour[0] = subset[0];
    std::optional<Rational> best;
    do {
        if (rest.size() >= 2 && rest.front() > rest.back()) continue;
        std::copy(rest.begin(), rest.end(), tour.begin() + 1);
        Rational s = cycle_sum(d, tour);
        if (!best || s < *best) best = s;
    } while (std::next_permutation(rest.begin(), rest.end()));
    return *best;
}

/// Shortest closed tour through `subset` by dynamic programming over the
/// subsets of the non-start leaves.
inline Rational shortest_tour_dp(const DistanceMatrix& d, std::span<const int> subset) {
    std::size_t m = subset.size();
    if (m < 2) throw std::invalid_argument("a tour needs at least two leaves");
    if (m > 24) throw std::invalid_argument("tour DP limited to 24 leaves");
    std::size_t k = m - 1;  // leaves other than the start
    std::size_t full = (std::size_t{1} << k) - 1;
    std::vector<std::optional<Rational>> best((full + 1) * k);
    auto cell = [&](std::size_t mask, std::size_t j) -> std::optional<Rational>& { return best[mask * k + j]; };
    int start = subset[0];
    for (std::size_t j = 0; j < k; ++j) cell(std::size_t{1} << j, j) = d(start, subset[j + 1]);
    for (std::size_t mask = 1; mask <= full; ++mask) {
        for (std::size_t j = 0; j < k; ++j) {
            const auto& here = cell(mask, j);
            if (!(mask >> j & 1) || !here) continue;
            for (std::size_t next = 0; next < k; ++next) {
                if (mask >> next & 1) continue;
                Rational candidate = *here + d(subset[j + 1], subset[next + 1]);
                auto& slot = cell(mask | std::size_t{1} << next, next);
                if (!slot || candidate < *slot) slot = std::move(candidate);
            }
        }
    }
    std::optional<Rational> tour;
    for (std::size_t j = 0; j < k; ++j) {
        Rational closed = *cell(full, j) + d(subset[j + 1], start);
        if (!tour || closed < *tour) tour = closed;
    }
    return *tour;
}

/// One entry of phi_m: half the shortest closed tour through `subset`.
inline Rational phi_entry(const DistanceMatrix& d, std::span<const int> subset, const PhiOptions& opts = {}) {
    bool dp = opts.method == PhiMethod::dynamic_programming ||
              (opts.method == PhiMethod::automatic && static_cast<int>(subset.size()) > opts.dp_threshold);
    return half(dp ? shortest_tour_dp(d, subset) : shortest_tour_brute_force(d, subset));
}

/// The m-dissimilarity map given by the tour formula; on tree metrics every
/// entry is the weight of the subtree spanned by the m leaves.
inline DissimTensor phi_m(const DistanceMatrix& d, int m, const PhiOptions& opts = {}) {
    int n = d.size();
    if (m < 2 || m > n)
        throw std::invalid_argument("phi_m needs 2 <= m <= n, got m=" + std::to_string(m) + " n=" + std::to_string(n));
    DissimTensor out(n, m);
    std::vector<Subset> subsets = subsets_of(n, m);
    detail::parallel_for(subsets.size(), opts.jobs, [&](std::size_t s) {
        out.at_rank(subset_rank(subsets[s])) = phi_entry(d, subsets[s], opts);
    });
    return out;
}

/// A closed tour through an m-subset, starting at the subset's first leaf.
struct CycleSum {
    std::vector<int> subset;
    std::vector<int> tour;
    Rational value;
};

struct TourMinimum {
    Rational value;                       // the phi entry: half the shortest tour
    Rational tour_length;                 // the shortest tour itself
    std::vector<std::vector<int>> tours;  // every minimising tour, lexicographic
};

/// Evaluates all (m-1)! cyclic orders of `subset` and returns every minimiser.
inline TourMinimum phi_m_with_argmin(const DistanceMatrix& d, int m, std::span<const int> subset) {
    if (static_cast<int>(subset.size()) != m)
        throw std::invalid_argument("subset size " + std::to_string(subset.size()) + " differs from m=" +
                                    std::to_string(m));
    if (m < 2) throw std::invalid_argument("phi_m_with_argmin needs m >= 2");
    std::vector<int> rest(subset.begin() + 1, subset.end());
    std::sort(rest.begin(), rest.end());
    std::vector<int> tour(static_cast<std::size_t>(m));
    tour[0] = subset[0];
    TourMinimum out;
    bool first = true;
    do {
        std::copy(rest.begin(), rest.end(), tour.begin() + 1);
        Rational s = cycle_sum(d, tour);
        if (first || s < out.tour_length) {
            out.tour_length = s;
            out.tours.assign(1, tour);
            first = false;
        } else if (s == out.tour_length) {
            out.tours.push_back(tour);
        }
    } while (std::next_permutation(rest.begin(), rest.end()));
    out.value = half(out.tour_length);
    return out;
}

/// Tour read backwards from the same start.
inline std::vector<int> reversed_tour(std::span<const int> tour) {
    std::vector<int> out{tour[0]};
    for (std::size_t t = tour.size() - 1; t >= 1; --t) out.push_back(tour[t]);
    return out;
}

/// Tour with leaves a and b exchanged, rotated back to start at `start`.
inline std::vector<int> swapped_tour(std::span<const int> tour, int a, int b, int start) {
    std::vector<int> out(tour.begin(), tour.end());
    for (int& v : out) v = v == a ? b : v == b ? a : v;
    std::rotate(out.begin(), std::find(out.begin(), out.end(), start), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// m = 3

/// X(i,j,k) = (X(i,j) + X(i,k) + X(j,k)) / 2.
inline DissimTensor phi_3(const DistanceMatrix& d) {
    int n = d.size();
    if (n < 3) throw std::invalid_argument("phi_3 needs n >= 3");
    DissimTensor out(n, 3);
    for_each_subset(n, 3, [&](const Subset& t) {
        out.at_rank(subset_rank(t)) = half(d(t[0], t[1]) + d(t[0], t[2]) + d(t[1], t[2]));
    });
    return out;
}

enum class InvertMethod { closed_form, elimination };

struct Invert3Result {
    DistanceMatrix candidate;  // the solution of the determined part of the system
    Verdict verdict;           // pass iff phi_3(candidate) reproduces the tensor

    bool ok() const { return verdict.pass; }
};

namespace detail {

inline void require_invertible_shape(const DissimTensor& w) {
    if (w.order() != 3) throw std::invalid_argument("invert3 needs a 3-dissimilarity tensor");
    if (w.size() < 5)
        throw std::invalid_argument("invert3 needs n >= 5: for n <= 4 the pairwise values are not determined");
}

/// With T(i,j) = sum_k W(i,j,k), U(i) = sum_j T(i,j) and S the total:
/// sum of X = 2S/(n-2), row sums r(i) = (U(i) - 2S/(n-2))/(n-3), and
/// X(i,j) = (2T(i,j) - r(i) - r(j))/(n-4).
inline DistanceMatrix invert3_closed_form(const DissimTensor& w) {
    int n = w.size();
    DistanceMatrix pair_sums(n);
    Rational total = 0;
    for_each_subset(n, 3, [&](const Subset& t) {
        const Rational& v = w.at_rank(subset_rank(t));
        total += v;
        pair_sums.set(t[0], t[1], pair_sums(t[0], t[1]) + v);
        pair_sums.set(t[0], t[2], pair_sums(t[0], t[2]) + v);
        pair_sums.set(t[1], t[2], pair_sums(t[1], t[2]) + v);
    });
    Rational all_pairs = Rational(2 * total) / (n - 2);
    std::vector<Rational> row(static_cast<std::size_t>(n) + 1, Rational(0));
    for (int i = 1; i <= n; ++i) {
        Rational u = 0;
        for (int j = 1; j <= n; ++j)
            if (j != i) u += pair_sums(i, j);
        row[i] = Rational(u - all_pairs) / (n - 3);
    }
    DistanceMatrix x(n);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) x.set(i, j, Rational(2 * pair_sums(i, j) - row[i] - row[j]) / (n - 4));
    return x;
}

/// Gaussian elimination on X(i,j) + X(i,k) + X(j,k) = 2 W(i,j,k); rows that
/// reduce to 0 = c are left for the verification step to report.
inline DistanceMatrix invert3_elimination(const DissimTensor& w) {
    int n = w.size();
    std::size_t cols = static_cast<std::size_t>(n) * (n - 1) / 2;
    auto col = [n](int i, int j) {
        std::size_t a = static_cast<std::size_t>(i - 1), b = static_cast<std::size_t>(j - 1);
        return a * (2 * static_cast<std::size_t>(n) - a - 1) / 2 + (b - a - 1);
    };
    std::vector<std::vector<Rational>> rows;
    for_each_subset(n, 3, [&](const Subset& t) {
        std::vector<Rational> r(cols + 1, Rational(0));
        r[col(t[0], t[1])] = 1;
        r[col(t[0], t[2])] = 1;
        r[col(t[1], t[2])] = 1;
        r[cols] = 2 * w.at_rank(subset_rank(t));
        rows.push_back(std::move(r));
    });
    std::vector<std::size_t> pivot_col;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
        std::size_t p = rank;
        while (p < rows.size() && sgn(rows[p][c]) == 0) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[rank]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || sgn(rows[r][c]) == 0) continue;
            Rational f = rows[r][c] / rows[rank][c];
            for (std::size_t k = c; k <= cols; ++k) rows[r][k] -= f * rows[rank][k];
        }
        pivot_col.push_back(c);
        ++rank;
    }
    if (rank < cols) throw std::logic_error("invert3: system unexpectedly rank deficient");
    DistanceMatrix x(n);
    std::vector<Rational> solution(cols);
    for (std::size_t r = 0; r < rank; ++r) solution[pivot_col[r]] = rows[r][cols] / rows[r][pivot_col[r]];
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) x.set(i, j, solution[col(i, j)]);
    return x;
}

}  // namespace detail

/// Solves phi_3(X) = W and verifies the solution; the witness of a failed
/// verification is the first triple where phi_3(X) and W differ.
inline Invert3Result invert3_checked(const DissimTensor& w, InvertMethod method = InvertMethod::closed_form) {
    detail::require_invertible_shape(w);
    Invert3Result out{method == InvertMethod::closed_form ? detail::invert3_closed_form(w)
                                                          : detail::invert3_elimination(w),
                      Verdict::ok()};
    DissimTensor back = phi_3(out.candidate);
    for_each_subset(w.size(), 3, [&](const Subset& t) {
        std::size_t r = subset_rank(t);
        if (back.at_rank(r) == w.at_rank(r)) return true;
        out.verdict = Verdict::fail(Witness{{}, t, {w.at_rank(r), back.at_rank(r)}},
                                    "tensor is not in the image of phi_3 (given, reproduced)");
        return false;
    });
    return out;
}

inline DistanceMatrix invert3(const DissimTensor& w, InvertMethod method = InvertMethod::closed_form) {
    Invert3Result r = invert3_checked(w, method);
    if (!r.ok()) throw verdict_error("invert3", r.verdict);
    return r.candidate;
}

struct Membership3 {
    enum class Stage { not_in_image, four_point_failure, member };

    bool member = false;
    Stage stage = Stage::not_in_image;
    Verdict verdict;                       // witness triple or quadruple when not a member
    std::optional<DistanceMatrix> matrix;  // the unique preimage, when it exists
    std::optional<WeightedTree> tree;      // realisation, when the preimage is a metric
    bool cross_check = true;               // Plücker-side consequence confirmed
};

/// Decides whether W is the 3-dissimilarity map of a tree (n >= 5): invert
/// phi_3, then apply the four-point condition to the preimage.
inline Membership3 membership3(const DissimTensor& w) {
    detail::require_invertible_shape(w);
    Membership3 out;
    Invert3Result inv = invert3_checked(w);
    if (!inv.ok()) {
        out.verdict = inv.verdict;
        return out;
    }
    out.matrix = inv.candidate;
    Verdict fp = four_point_check(inv.candidate, true);
    if (!fp) {
        out.stage = Membership3::Stage::four_point_failure;
        out.verdict = fp;
        // With S outside the quadruple, W(S,i,j) + W(S,k,l) = (C + X(i,j) + X(k,l))/2
        // for a common C, so the Plücker triple at R = {S} must fail as well.
        const auto& q = fp.witness->indices;
        Subset outside = complement(w.size(), Subset{q[0], q[1], q[2], q[3]});
        int s = outside.front();
        auto at = [&](int a, int b) { return w({s, a, b}); };
        std::array<Rational, 3> sums{Rational(at(q[0], q[1]) + at(q[2], q[3])),
                                     Rational(at(q[0], q[2]) + at(q[1], q[3])),
                                     Rational(at(q[0], q[3]) + at(q[1], q[2]))};
        out.cross_check = !max_twice(sums);
        return out;
    }
    out.member = true;
    out.stage = Membership3::Stage::member;
    out.verdict = Verdict::ok();
    out.cross_check = in_Tmn(w).pass;
    if (four_point_check(inv.candidate, false)) out.tree = reconstruct_tree(inv.candidate);
    return out;
}

/// D'(i,j) = 2E + D(i,j) - D(i,n) - D(j,n): a tree metric that is
/// ultrametric on [n-1], with D'(i,n) = 2E.
inline DistanceMatrix reroot_ultrametric(const DistanceMatrix& d, const Rational& e) {
    int n = d.size();
    if (Verdict v = four_point_check(d, false); !v) throw verdict_error("reroot_ultrametric: not a tree metric", v);
    for (int i = 1; i < n; ++i)
        if (e < d(i, n))
            throw std::invalid_argument("reroot_ultrametric: E=" + to_string(e) + " is below D(" + std::to_string(i) +
                                        "," + std::to_string(n) + ")=" + to_string(d(i, n)));
    DistanceMatrix out(n);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) out.set(i, j, Rational(2 * e + d(i, j) - d(i, n) - d(j, n)));

    std::vector<int> head(static_cast<std::size_t>(n - 1));
    std::iota(head.begin(), head.end(), 1);
    if (!four_point_check(out, false) || (n >= 4 && !is_ultrametric(out.restricted(head))))
        throw std::logic_error("reroot_ultrametric: result fails its own postcondition");
    return out;
}

// ---------------------------------------------------------------------------
// m = 4: pairing coordinates

/// Coordinates X(A;B) for ordered pairs of disjoint unordered pairs A, B.
/// Per quadruple a<b<c<d the six values are stored in the order
/// (ab;cd), (ac;bd), (ad;bc), (bd;ac), (bc;ad), (cd;ab).
class PiPoint {
public:
    PiPoint() = default;
    explicit PiPoint(int n) : n_(n) {
        if (n < 4) throw std::invalid_argument("pairing coordinates need n >= 4");
        values_.resize(static_cast<std::size_t>(binomial(n, 4)));
    }

    int size() const noexcept { return n_; }

    /// Number of coordinates: C(n,2) * C(n-2,2).
    std::size_t dimension() const { return values_.size() * 6; }

    Rational operator()(int i, int j, int k, int l) const {
        auto [q, s] = locate(i, j, k, l);
        return values_[q][s];
    }

    void set(int i, int j, int k, int l, const Rational& v) {
        auto [q, s] = locate(i, j, k, l);
        values_[q][s] = v;
    }

    const std::array<Rational, 6>& quadruple(std::span<const int> sorted) const {
        return values_.at(subset_rank(sorted));
    }

    /// The two pairs for slot `s` of the sorted quadruple.
    static std::array<int, 4> slot_pairs(std::span<const int> q, int s) {
        static constexpr int layout[6][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2},
                                             {1, 3, 0, 2}, {1, 2, 0, 3}, {2, 3, 0, 1}};
        return {q[layout[s][0]], q[layout[s][1]], q[layout[s][2]], q[layout[s][3]]};
    }

    bool operator==(const PiPoint&) const = default;

private:
    std::pair<std::size_t, int> locate(int i, int j, int k, int l) const {
        Subset q{i, j, k, l};
        std::sort(q.begin(), q.end());
        if (!is_strictly_increasing(q) || q.front() < 1 || q.back() > n_)
            throw std::invalid_argument("pairing coordinate needs four distinct leaves in range");
        int lo = std::min(i, j), hi = std::max(i, j);
        int s = -1;
        for (int t = 0; t < 6; ++t) {
            auto p = slot_pairs(q, t);
            if (p[0] == lo && p[1] == hi) s = t;
        }
        return {subset_rank(q), s};
    }

    int n_ = 0;
    std::vector<std::array<Rational, 6>> values_;
};

/// X(i,j;k,l) = (X(i,j) + X(k,l) + min(X(i,k)+X(j,l), X(i,l)+X(j,k))) / 2.
inline PiPoint pi4(const DistanceMatrix& d) {
    int n = d.size();
    if (n < 4) throw std::invalid_argument("pi4 needs n >= 4");
    PiPoint out(n);
    for_each_subset(n, 4, [&](const Subset& q) {
        for (int s = 0; s < 6; ++s) {
            auto [i, j, k, l] = PiPoint::slot_pairs(q, s);
            Rational cross = std::min(Rational(d(i, k) + d(j, l)), Rational(d(i, l) + d(j, k)));
            out.set(i, j, k, l, half(d(i, j) + d(k, l) + cross));
        }
    });
    return out;
}

/// Every quadruple whose six coordinates are not all equal.
inline std::vector<Witness> l_violations(const PiPoint& p) {
    std::vector<Witness> out;
    for_each_subset(p.size(), 4, [&](const Subset& q) {
        const auto& v = p.quadruple(q);
        if (std::all_of(v.begin(), v.end(), [&](const Rational& x) { return x == v[0]; })) return;
        out.push_back(Witness{{}, q, {v.begin(), v.end()}});
    });
    return out;
}

/// Membership in the coincidence subspace L.
inline Verdict in_L(const PiPoint& p) {
    std::optional<Witness> first;
    for_each_subset(p.size(), 4, [&](const Subset& q) {
        const auto& v = p.quadruple(q);
        if (std::all_of(v.begin(), v.end(), [&](const Rational& x) { return x == v[0]; })) return true;
        first = Witness{{}, q, {v.begin(), v.end()}};
        return false;
    });
    if (first) return Verdict::fail(*first, "pairing coordinates differ");
    return Verdict::ok();
}

/// Projection of a point of L to one value per quadruple.
inline DissimTensor p_project(const PiPoint& p) {
    if (Verdict v = in_L(p); !v) throw verdict_error("p_project: point is not in L", v);
    DissimTensor out(p.size(), 4);
    for_each_subset(p.size(), 4, [&](const Subset& q) { out.at_rank(subset_rank(q)) = p.quadruple(q)[0]; });
    return out;
}

struct M4Row {
    std::array<int, 4> quadruple;
    std::array<Rational, 3> sums;  // a = ij|kl, b = ik|jl, c = il|jk
    bool max_twice = false;
    bool coordinates_equal = false;  // the six pairing coordinates coincide
    bool min_identity = false;       // a+min(b,c) = b+min(a,c) = c+min(a,b)

    bool equivalent() const { return max_twice == coordinates_equal && max_twice == min_identity; }
};

struct M4Report {
    std::vector<M4Row> rows;
    bool all_equivalent = true;
    bool all_pass = true;  // every quadruple satisfies the four-point condition
};

/// Per quadruple: the pairing sums, whether the maximum repeats, whether the
/// pairing coordinates coincide and whether the min identities hold.
inline M4Report verify_m4_characterization(const DistanceMatrix& d) {
    M4Report report;
    if (d.size() < 4) return report;
    PiPoint p = pi4(d);
    for_each_subset(d.size(), 4, [&](const Subset& q) {
        M4Row row;
        row.quadruple = {q[0], q[1], q[2], q[3]};
        row.sums = pairing_sums(d, q[0], q[1], q[2], q[3]);
        const auto& [a, b, c] = row.sums;
        row.max_twice = max_twice(row.sums);
        const auto& v = p.quadruple(q);
        row.coordinates_equal = std::all_of(v.begin(), v.end(), [&](const Rational& x) { return x == v[0]; });
        Rational x = a + std::min(b, c), y = b + std::min(a, c), z = c + std::min(a, b);
        row.min_identity = x == y && y == z;
        report.all_equivalent = report.all_equivalent && row.equivalent();
        report.all_pass = report.all_pass && row.max_twice;
        report.rows.push_back(std::move(row));
    });
    return report;
}

}  // namespace mdissim
