#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "orienteer/quad.hpp"

using namespace orn;

TEST(Quad, EllFundamentalPart) {
    EXPECT_EQ(ell_fundamental_part(-752, 2), -47);
    EXPECT_EQ(ell_fundamental_part(-188, 2), -47);
    EXPECT_EQ(ell_fundamental_part(-32, 2), -8);
    EXPECT_EQ(ell_fundamental_part(-423, 3), -47);
    EXPECT_EQ(ell_fundamental_part(-47, 2), -47);
    EXPECT_EQ(ell_fundamental_part(-47, 3), -47);
    EXPECT_EQ(ell_fundamental_part(-75, 5), -3);
    EXPECT_THROW(ell_fundamental_part(-5, 2), math_error);
}

TEST(Quad, OrderFromDisc) {
    auto O = QuadOrder::from_disc(-188);
    EXPECT_EQ(O.fundamental_disc, -47);
    EXPECT_EQ(O.conductor, 2);
    auto O2 = QuadOrder::from_disc(-47);
    EXPECT_EQ(O2.fundamental_disc, -47);
    EXPECT_EQ(O2.conductor, 1);
    auto O3 = QuadOrder::from_disc(-144);
    EXPECT_EQ(O3.fundamental_disc, -4);
    EXPECT_EQ(O3.conductor, 6);
    EXPECT_THROW(QuadOrder::from_disc(-6), math_error);
}

TEST(Quad, KroneckerEulerCriterion) {
    EXPECT_EQ(kronecker(-47, 2), 1);
    EXPECT_EQ(kronecker(-188, 2), 0);
    EXPECT_EQ(kronecker(-47, 47), 0);
    for (i64 q : {3, 5, 7, 11, 13, 179}) {
        for (i64 a = -20; a <= 20; a++) {
            if (a % q == 0) continue;
            u64 e = powm((u64)(((a % q) + q) % q), ((u64)q - 1) / 2, (u64)q);
            int euler = (e == 1) ? 1 : -1;
            EXPECT_EQ(kronecker(a, q), euler) << "a=" << a << " q=" << q;
        }
    }
}

TEST(Quad, ClassNumbers) {
    EXPECT_EQ(class_group(QuadOrder::from_disc(-47)).h(), 5u);
    EXPECT_EQ(class_group(QuadOrder::from_disc(-3)).h(), 1u);
    EXPECT_EQ(class_group(QuadOrder::from_disc(-4)).h(), 1u);
    EXPECT_EQ(class_group(QuadOrder::from_disc(-188)).h(), 5u);
    EXPECT_EQ(class_group(QuadOrder::from_disc(-23)).h(), 3u);
}

TEST(Quad, ClassNumberSum) {
    EXPECT_EQ(class_number_sum(QuadOrder::from_disc(-188)), 10u);
    EXPECT_EQ(class_number_sum(QuadOrder::from_disc(-47)), 5u);
    EXPECT_EQ(class_number_sum(QuadOrder::from_disc(-3)), 1u);
}

TEST(Quad, CompositionGroupLaws) {
    for (i64 D : {-47, -188, -23, -71}) {
        auto G = class_group(QuadOrder::from_disc(D));
        QuadForm id = G.identity();
        for (const auto& f : G.forms) {
            EXPECT_EQ(compose_forms(f, id), f);
            // inverse is the opposite form
            QuadForm inv = reduce_form({f.a, -f.b, f.c});
            EXPECT_EQ(compose_forms(f, inv), id);
        }
        // each translation row is a permutation of the group
        for (const auto& f : G.forms) {
            std::set<std::pair<i64, std::pair<i64, i64>>> seen;
            for (const auto& g : G.forms) {
                QuadForm h = compose_forms(f, g);
                EXPECT_EQ(form_disc(h), D);
                seen.insert({h.a, {h.b, h.c}});
            }
            EXPECT_EQ(seen.size(), G.forms.size());
        }
        // associativity spot check
        if (G.forms.size() >= 3) {
            const auto &a = G.forms[0], &b = G.forms[1], &c = G.forms[2];
            EXPECT_EQ(compose_forms(compose_forms(a, b), c), compose_forms(a, compose_forms(b, c)));
        }
    }
}

TEST(Quad, Cornacchia) {
    auto r1 = cornacchia(1, 1);
    ASSERT_TRUE(r1);
    EXPECT_EQ(*r1, std::make_pair((u64)1, (u64)0));
    auto r2 = cornacchia(1, 2);
    ASSERT_TRUE(r2);
    EXPECT_EQ(*r2, std::make_pair((u64)1, (u64)1));
    auto r3 = cornacchia(1, 13);
    ASSERT_TRUE(r3);
    EXPECT_EQ(r3->first * r3->first + r3->second * r3->second, 13u);
    auto r4 = cornacchia(47, 83);
    ASSERT_TRUE(r4);
    EXPECT_EQ(*r4, std::make_pair((u64)6, (u64)1));
    EXPECT_FALSE(cornacchia(1, 7));
    EXPECT_FALSE(cornacchia(3, 5));
    for (u64 m : {101, 103, 107, 109, 113}) {
        for (u64 d = 1; d < 20; d++) {
            auto r = cornacchia(d, m);
            if (r) EXPECT_EQ(r->first * r->first + d * r->second * r->second, m);
        }
    }
}

TEST(Quad, PrimeAbove) {
    auto O = QuadOrder::from_disc(-47);
    auto l2 = prime_above(O, 2);
    ASSERT_TRUE(l2);
    EXPECT_EQ(l2->a, 0);  // tau = omega
    EXPECT_EQ(l2->b, 1);
    EXPECT_EQ(ideal_form(*l2), (QuadForm{2, 1, 6}));
    EXPECT_EQ(class_group(O).order_of(ideal_form(*l2)), 5u);

    // 13 is inert in Q(sqrt(-47))
    EXPECT_EQ(kronecker(-47, 13), -1);
    EXPECT_FALSE(prime_above(O, 13));

    // the root convention: tau = -lambda + omega has norm divisible by ell
    for (i64 D : {-47, -188, -23, -71, -3, -4, -8}) {
        auto Od = QuadOrder::from_disc(D);
        for (u64 ell : {2, 3, 5, 7, 11, 13}) {
            auto l = prime_above(Od, ell);
            if (kronecker(D, (i64)ell) == -1) {
                EXPECT_FALSE(l) << "D=" << D << " ell=" << ell;
                continue;
            }
            ASSERT_TRUE(l) << "D=" << D << " ell=" << ell;
            i64 t = Od.omega_trace(), n = Od.omega_norm();
            i64 norm = l->a * l->a + l->a * t + n;
            EXPECT_EQ(((norm % (i64)ell) + (i64)ell) % (i64)ell, 0);
        }
    }
}

TEST(Quad, RamifiedAndSplitFormOrder) {
    // ramified prime: the class has order dividing 2
    auto O = QuadOrder::from_disc(-47);
    auto l47 = prime_above(O, 47);
    ASSERT_TRUE(l47);
    auto G = class_group(O);
    u64 ord = G.order_of(ideal_form(*l47));
    EXPECT_TRUE(ord == 1 || ord == 2);
}
