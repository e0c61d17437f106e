#pragma once

#include "mdissim/mdissim.hpp"

#include <string>

namespace fixtures {

using namespace mdissim;

inline const std::string quartet_newick = "((1:1,2:1):1,3:1,4:1);";

inline WeightedTree quartet() { return parse_newick(quartet_newick); }

inline DistanceMatrix quartet_matrix() {
    DistanceMatrix d(4);
    d.set(1, 2, 2);
    d.set(3, 4, 2);
    d.set(1, 3, 3);
    d.set(1, 4, 3);
    d.set(2, 3, 3);
    d.set(2, 4, 3);
    return d;
}

// All-ones matrix on five leaves and its perturbation with D'(4,5) = 2.
inline DistanceMatrix ones5() { return DistanceMatrix::constant(5, Rational(1)); }

inline DistanceMatrix ones5_bumped() {
    DistanceMatrix d = ones5();
    d.set(4, 5, 2);
    return d;
}

inline Rational q(long p, long r = 1) {
    Rational out{Integer(p), Integer(r)};
    out.canonicalize();
    return out;
}

}  // namespace fixtures
