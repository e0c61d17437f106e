#pragma once

#include "mdissim/rational.hpp"
#include "mdissim/subsets.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdissim {

/// Symmetric dissimilarity on [n] with implicit zero diagonal. Entries are
/// keyed on unordered pairs, so symmetry holds by construction.
class DistanceMatrix {
public:
    DistanceMatrix() = default;

    explicit DistanceMatrix(int n) : n_(n) {
        if (n < 2) throw std::invalid_argument("distance matrix needs n >= 2, got " + std::to_string(n));
        entries_.resize(static_cast<std::size_t>(n) * (n - 1) / 2);
    }

    /// Every off-diagonal entry set to `value`.
    static DistanceMatrix constant(int n, const Rational& value) {
        DistanceMatrix d(n);
        for (auto& e : d.entries_) e = value;
        return d;
    }

    int size() const noexcept { return n_; }

    Rational operator()(int i, int j) const {
        if (i == j) {
            check_index(i);
            return Rational(0);
        }
        return entries_[index(i, j)];
    }

    void set(int i, int j, const Rational& value) {
        if (i == j) throw std::invalid_argument("diagonal entries of a distance matrix are fixed at 0");
        entries_[index(i, j)] = value;
    }

    /// Pair entries in lexicographic order of (i, j), i < j.
    std::span<const Rational> raw() const noexcept { return entries_; }

    bool non_negative() const {
        for (const auto& e : entries_)
            if (sgn(e) < 0) return false;
        return true;
    }

    /// The matrix on `labels` (strictly increasing), relabelled 1..k.
    DistanceMatrix restricted(std::span<const int> labels) const {
        DistanceMatrix out(static_cast<int>(labels.size()));
        for (std::size_t a = 0; a < labels.size(); ++a)
            for (std::size_t b = a + 1; b < labels.size(); ++b)
                out.set(static_cast<int>(a) + 1, static_cast<int>(b) + 1, (*this)(labels[a], labels[b]));
        return out;
    }

    /// Entry (perm[i], perm[j]) of the result equals entry (i, j) here.
    /// `perm` is 1-based: perm[0] is ignored.
    DistanceMatrix permuted(std::span<const int> perm) const {
        DistanceMatrix out(n_);
        for (int i = 1; i <= n_; ++i)
            for (int j = i + 1; j <= n_; ++j) out.set(perm[i], perm[j], (*this)(i, j));
        return out;
    }

    DistanceMatrix& operator+=(const DistanceMatrix& other) {
        require_same_size(other);
        for (std::size_t t = 0; t < entries_.size(); ++t) entries_[t] += other.entries_[t];
        return *this;
    }

    friend DistanceMatrix operator+(DistanceMatrix a, const DistanceMatrix& b) { return a += b; }

    friend DistanceMatrix operator*(const Rational& s, DistanceMatrix a) {
        for (auto& e : a.entries_) e *= s;
        return a;
    }

    bool operator==(const DistanceMatrix&) const = default;

private:
    void check_index(int i) const {
        if (i < 1 || i > n_)
            throw std::out_of_range("leaf index " + std::to_string(i) + " outside [1," + std::to_string(n_) + "]");
    }

    std::size_t index(int i, int j) const {
        check_index(i);
        check_index(j);
        if (i > j) std::swap(i, j);
        // row-major upper triangle
        std::size_t a = static_cast<std::size_t>(i - 1);
        std::size_t b = static_cast<std::size_t>(j - 1);
        std::size_t nn = static_cast<std::size_t>(n_);
        return a * (2 * nn - a - 1) / 2 + (b - a - 1);
    }

    void require_same_size(const DistanceMatrix& other) const {
        if (other.n_ != n_) throw std::invalid_argument("distance matrix size mismatch");
    }

    int n_ = 0;
    std::vector<Rational> entries_;
};

}  // namespace mdissim
