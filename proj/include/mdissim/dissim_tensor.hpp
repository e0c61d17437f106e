#pragma once

#include "mdissim/rational.hpp"
#include "mdissim/subsets.hpp"

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdissim {

/// A rational value per m-subset of [n]. Entries for index tuples with
/// repeats are zero by definition and are not stored.
class DissimTensor {
public:
    DissimTensor() = default;

    DissimTensor(int n, int m) : n_(n), m_(m) {
        if (m < 2 || m > n)
            throw std::invalid_argument("tensor needs 2 <= m <= n, got n=" + std::to_string(n) +
                                        " m=" + std::to_string(m));
        entries_.resize(static_cast<std::size_t>(binomial(n, m)));
    }

    int size() const noexcept { return n_; }
    int order() const noexcept { return m_; }
    std::size_t entry_count() const noexcept { return entries_.size(); }

    /// Indices may be given in any order; repeated indices yield 0.
    Rational operator()(std::span<const int> indices) const {
        Subset s = normalise(indices);
        if (!is_strictly_increasing(s)) return Rational(0);
        return entries_[subset_rank(s)];
    }

    Rational operator()(std::initializer_list<int> indices) const {
        return (*this)(std::span<const int>(indices.begin(), indices.size()));
    }

    void set(std::span<const int> indices, const Rational& value) {
        Subset s = normalise(indices);
        if (!is_strictly_increasing(s)) throw std::invalid_argument("tensor index has repeated entries");
        entries_[subset_rank(s)] = value;
    }

    void set(std::initializer_list<int> indices, const Rational& value) {
        set(std::span<const int>(indices.begin(), indices.size()), value);
    }

    /// Entry at a colex rank; see subset_rank.
    const Rational& at_rank(std::size_t rank) const { return entries_.at(rank); }
    Rational& at_rank(std::size_t rank) { return entries_.at(rank); }

    DissimTensor& operator+=(const DissimTensor& other) {
        if (other.n_ != n_ || other.m_ != m_) throw std::invalid_argument("tensor shape mismatch");
        for (std::size_t t = 0; t < entries_.size(); ++t) entries_[t] += other.entries_[t];
        return *this;
    }
    friend DissimTensor operator+(DissimTensor a, const DissimTensor& b) { return a += b; }

    bool operator==(const DissimTensor&) const = default;

private:
    Subset normalise(std::span<const int> indices) const {
        if (static_cast<int>(indices.size()) != m_)
            throw std::invalid_argument("tensor index needs " + std::to_string(m_) + " entries");
        Subset s(indices.begin(), indices.end());
        for (int v : s)
            if (v < 1 || v > n_) throw std::out_of_range("tensor index " + std::to_string(v) + " out of range");
        std::sort(s.begin(), s.end());
        return s;
    }

    int n_ = 0;
    int m_ = 0;
    std::vector<Rational> entries_;
};

}  // namespace mdissim
