#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace mdissim;
using fixtures::q;

TEST(MaxTwice, Examples) {
    EXPECT_TRUE(max_twice({Rational(3), Rational(3), Rational(1)}));
    EXPECT_FALSE(max_twice({Rational(3), Rational(2), Rational(1)}));
    EXPECT_TRUE(max_twice({Rational(5), Rational(5), Rational(5)}));
    EXPECT_FALSE(max_twice({Rational(7)}));
    EXPECT_THROW(max_twice(std::span<const Rational>{}), std::invalid_argument);
}

TEST(MaxTwice, InvariantUnderPermutationAndAffineMaps) {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Rational> v;
        for (int k = 0; k < 4; ++k) v.push_back(Rational(static_cast<long>(uniform_below(rng, 4))));
        bool base = max_twice(v);
        std::vector<Rational> shuffled = v;
        std::reverse(shuffled.begin(), shuffled.end());
        std::rotate(shuffled.begin(), shuffled.begin() + 1, shuffled.end());
        EXPECT_EQ(max_twice(shuffled), base);
        Rational scale = q(1 + static_cast<long>(uniform_below(rng, 5)), 3);
        Rational shift = q(static_cast<long>(uniform_below(rng, 9)) - 4, 7);
        std::vector<Rational> mapped;
        for (const auto& x : v) mapped.push_back(Rational(scale * x + shift));
        EXPECT_EQ(max_twice(mapped), base);
    }
}

TEST(TropPoly, PluckerAtQuartet) {
    DistanceMatrix d = fixtures::quartet_matrix();
    using Key = std::pair<int, int>;
    std::map<Key, Rational> point;
    for (int i = 1; i <= 4; ++i)
        for (int j = i + 1; j <= 4; ++j) point[{i, j}] = d(i, j);
    std::vector<TropTerm<Key>> terms{
        {Rational(0), {{{1, 2}, 1}, {{3, 4}, 1}}},
        {Rational(0), {{{1, 3}, 1}, {{2, 4}, 1}}},
        {Rational(0), {{{1, 4}, 1}, {{2, 3}, 1}}},
    };
    TropValue<Key> v = eval_trop_poly(terms, point);
    EXPECT_EQ(v.value, 6);
    EXPECT_EQ(v.argmax, (std::vector<std::size_t>{1, 2}));
    EXPECT_TRUE(v.on_hypersurface());
}

TEST(TropPoly, ZeroPointAndSingleTerm) {
    std::map<int, Rational> zero{{0, Rational(0)}, {1, Rational(0)}};
    std::vector<TropTerm<int>> terms{{Rational(0), {{0, 2}}}, {Rational(0), {{1, 1}}}, {Rational(0), {}}};
    auto v = eval_trop_poly(terms, zero);
    EXPECT_EQ(v.value, 0);
    EXPECT_EQ(v.argmax.size(), 3u);

    std::vector<TropTerm<int>> single{{Rational(5), {{0, 3}}}};
    std::map<int, Rational> p{{0, q(-2, 3)}};
    auto s = eval_trop_poly(single, p);
    EXPECT_EQ(s.value, 3);
    EXPECT_FALSE(s.on_hypersurface());

    std::map<int, Rational> missing{{1, Rational(0)}};
    EXPECT_THROW(eval_trop_poly(single, missing), std::invalid_argument);
    EXPECT_THROW(eval_trop_poly(std::vector<TropTerm<int>>{}, zero), std::invalid_argument);
}

TEST(FourPoint, Quartet) {
    Verdict v = four_point_check(fixtures::quartet_matrix());
    EXPECT_TRUE(v.pass);
    EXPECT_FALSE(v.witness);
    EXPECT_TRUE(four_point_check(fixtures::quartet_matrix(), true).pass);
}

TEST(FourPoint, BumpedOnesFailWithWitness) {
    for (bool strict : {false, true}) {
        Verdict v = four_point_check(fixtures::ones5_bumped(), strict);
        ASSERT_FALSE(v.pass);
        ASSERT_TRUE(v.witness);
        EXPECT_EQ(v.witness->indices, (std::vector<int>{1, 2, 4, 5}));
        EXPECT_EQ(v.witness->values, (std::vector<Rational>{Rational(3), Rational(2), Rational(2)}));
    }
}

TEST(FourPoint, OnesPass) { EXPECT_TRUE(four_point_check(fixtures::ones5()).pass); }

TEST(FourPoint, NonStrictCatchesTriangleAndSign) {
    DistanceMatrix tri(3);
    tri.set(1, 2, 1);
    tri.set(1, 3, 1);
    tri.set(2, 3, 5);
    Verdict v = four_point_check(tri);
    EXPECT_FALSE(v.pass);
    Verdict s = four_point_check(tri, true);
    EXPECT_TRUE(s.pass);
    EXPECT_FALSE(s.note.empty());

    DistanceMatrix neg(2);
    neg.set(1, 2, -1);
    EXPECT_FALSE(four_point_check(neg).pass);
}

TEST(FourPoint, MatchesAllTuplesOracle) {
    Rng rng(5);
    int agree_fail = 0, agree_pass = 0;
    for (int trial = 0; trial < 150; ++trial) {
        int n = 4 + trial % 3;
        DistanceMatrix d = trial % 2 ? distance_matrix(random_tree(n, static_cast<std::uint64_t>(trial)))
                                     : oracle::random_matrix(n, rng, 0, 3, 1);
        bool expected = oracle::four_point_all_tuples(d);
        EXPECT_EQ(four_point_check(d).pass, expected);
        (expected ? agree_pass : agree_fail)++;
        EXPECT_EQ(four_point_violations(d).empty(), expected);
    }
    EXPECT_GT(agree_fail, 10);
    EXPECT_GT(agree_pass, 10);
}

TEST(FourPoint, ViolationsListStartsWithWitness) {
    DistanceMatrix d = fixtures::ones5_bumped();
    auto all = four_point_violations(d, true);
    ASSERT_FALSE(all.empty());
    EXPECT_EQ(all.front().indices, four_point_check(d, true).witness->indices);
    // Every distinct quadruple containing both 4 and 5 breaks.
    EXPECT_EQ(all.size(), 3u);
}

TEST(Ultrametric, Examples) {
    DistanceMatrix d(3);
    d.set(1, 2, 2);
    d.set(1, 3, 4);
    d.set(2, 3, 4);
    EXPECT_TRUE(is_ultrametric(d).pass);
    EXPECT_TRUE(is_ultrametric(fixtures::quartet_matrix()).pass);

    DistanceMatrix bad(3);
    bad.set(1, 2, 1);
    bad.set(1, 3, 2);
    bad.set(2, 3, 3);
    Verdict v = is_ultrametric(bad);
    ASSERT_FALSE(v.pass);
    EXPECT_EQ(v.witness->indices, (std::vector<int>{1, 2, 3}));
}

TEST(Ultrametric, ImpliesFourPoint) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        int n = 4 + static_cast<int>(seed % 5);
        DistanceMatrix d = distance_matrix(random_tree(n, seed));
        Rational e = 0;
        for (int i = 1; i < n; ++i) e = std::max(e, d(i, n));
        DistanceMatrix u = reroot_ultrametric(d, e);
        std::vector<int> head;
        for (int i = 1; i < n; ++i) head.push_back(i);
        DistanceMatrix h = u.restricted(head);
        ASSERT_TRUE(is_ultrametric(h).pass);
        EXPECT_TRUE(four_point_check(h).pass);
    }
}

TEST(Tmn, TreeImagesPass) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        DistanceMatrix d = distance_matrix(random_tree(6, seed));
        EXPECT_TRUE(in_Tmn(phi_3(d)).pass);
        EXPECT_TRUE(in_Tmn(phi_m(d, 4), 2).pass);
    }
}

TEST(Tmn, OrderTwoAgreesWithStrictFourPoint) {
    Rng rng(17);
    int fails = 0;
    for (int trial = 0; trial < 100; ++trial) {
        int n = 4 + trial % 4;
        DistanceMatrix d = trial % 3 == 0 ? distance_matrix(random_tree(n, static_cast<std::uint64_t>(trial)))
                                          : oracle::random_matrix(n, rng, 2, 4, 2);
        DissimTensor w(n, 2);
        for_each_subset(n, 2, [&](const Subset& s) { w.set(s, d(s[0], s[1])); });
        Verdict a = in_Tmn(w), b = four_point_check(d, true);
        EXPECT_EQ(a.pass, b.pass);
        if (!a.pass) {
            ++fails;
            EXPECT_EQ(a.witness->indices, b.witness->indices);
            EXPECT_EQ(a.witness->values, b.witness->values);
        }
    }
    EXPECT_GT(fails, 20);
}

TEST(Tmn, VacuousWhenTooSmall) {
    DissimTensor w(4, 3);
    Verdict v = in_Tmn(w);
    EXPECT_TRUE(v.pass);
    EXPECT_FALSE(v.note.empty());
}

TEST(Tmn, PerturbationDetectedForMostSeeds) {
    int detected = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        DistanceMatrix d = distance_matrix(random_tree(6, seed));
        DissimTensor w = phi_3(d);
        std::size_t slot = static_cast<std::size_t>(seed) % w.entry_count();
        w.at_rank(slot) += 1;
        Verdict v = in_Tmn(w);
        if (v.pass) continue;
        ++detected;
        // Witness values recompute from the tensor.
        const Witness& wit = *v.witness;
        ASSERT_EQ(wit.fixed.size(), 1u);
        int r = wit.fixed[0];
        const auto& x = wit.indices;
        EXPECT_EQ(wit.values[0], w({r, x[0], x[1]}) + w({r, x[2], x[3]}));
        EXPECT_EQ(wit.values[1], w({r, x[0], x[2]}) + w({r, x[1], x[3]}));
        EXPECT_EQ(wit.values[2], w({r, x[0], x[3]}) + w({r, x[1], x[2]}));
    }
    EXPECT_GE(detected, 40);
}

TEST(Tmn, ParallelMatchesSerial) {
    DistanceMatrix d = distance_matrix(random_tree(8, 4));
    DissimTensor w = phi_m(d, 4);
    w.set({2, 3, 5, 7}, w({2, 3, 5, 7}) + 3);
    Verdict a = in_Tmn(w, 1), b = in_Tmn(w, 4);
    EXPECT_EQ(a.pass, b.pass);
    ASSERT_FALSE(a.pass);
    EXPECT_EQ(a.witness->fixed, b.witness->fixed);
    EXPECT_EQ(a.witness->indices, b.witness->indices);
}
