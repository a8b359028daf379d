#include <gtest/gtest.h>

#include <random>

#include "orienteer/poly.hpp"

using namespace orn;

namespace {

const Level* F179() { return prime_field(179); }
const Level* F179_2() { return field_extend(F179(), 2); }

FieldElem random_elem(const Level* L, std::mt19937_64& rng) {
    std::vector<u64> flat(L->deg_over_prime);
    for (auto& x : flat) x = rng() % L->p;
    return elem_from_flat(L, flat);
}

Poly random_monic(const Level* L, int deg, std::mt19937_64& rng) {
    std::vector<FieldElem> c;
    for (int i = 0; i < deg; i++) c.push_back(random_elem(L, rng));
    c.push_back(FieldElem::one(L));
    return Poly(L, std::move(c));
}

}  // namespace

TEST(Field, PrimeFieldBasics) {
    const Level* F = F179();
    FieldElem a(F, (u64)100), b(F, (u64)150);
    EXPECT_EQ((a + b).v, 71u);
    EXPECT_EQ((a * b).v, (100ull * 150ull) % 179);
    EXPECT_TRUE((a - a).is_zero());
    EXPECT_TRUE((a * inverse(a)).is_one());
}

TEST(Field, QuadraticExtensionIsXSquaredPlusOne) {
    const Level* F2 = F179_2();
    ASSERT_EQ(F2->deg, 2u);
    // modulus x^2 + 1
    EXPECT_TRUE(F2->modulus[0].is_one());
    EXPECT_TRUE(F2->modulus[1].is_zero());
    EXPECT_TRUE(F2->modulus[2].is_one());
    // i^2 = -1
    FieldElem i = elem_from_flat(F2, {0, 1});
    EXPECT_EQ(i * i, -FieldElem::one(F2));
}

TEST(Field, ExtendByOneIsIdentity) {
    EXPECT_EQ(field_extend(F179(), 1), F179());
    EXPECT_EQ(field_extend(F179_2(), 1), F179_2());
}

TEST(Field, DegreeFourTowerModulusIrreducible) {
    const Level* F2 = F179_2();
    const Level* F4 = field_extend(F2, 2);
    ASSERT_EQ(F4->deg_over_prime, 4u);
    // exhaustive root check of the degree-2 modulus over F_{179^2}
    for (u64 n = 0; n < 179 * 179; n++) {
        FieldElem x = elem_from_index(F2, n);
        FieldElem val = (x * x) * F4->modulus[2] + x * F4->modulus[1] + F4->modulus[0];
        EXPECT_FALSE(val.is_zero()) << "modulus has a root in the base field";
    }
    // determinism: rebuilding gives the same pointer
    EXPECT_EQ(field_extend(F2, 2), F4);
}

TEST(Field, SqrtExamples) {
    const Level* F = F179();
    FieldElem r;
    ASSERT_TRUE(fq_sqrt(FieldElem::one(F), &r));
    EXPECT_TRUE(r.is_one());
    EXPECT_FALSE(fq_sqrt(-FieldElem::one(F), &r));  // 179 = 3 mod 4
    // 3^2 = 9 = 188 mod 179
    ASSERT_TRUE(fq_sqrt(FieldElem(F, (u64)9), &r));
    EXPECT_EQ(r.v, 3u);
}

TEST(Field, SqrtRandomRoundTrip) {
    std::mt19937_64 rng(7);
    for (const Level* L : {F179(), F179_2(), field_extend(F179_2(), 2)}) {
        for (int trial = 0; trial < 30; trial++) {
            FieldElem a = random_elem(L, rng);
            FieldElem sq = a * a;
            FieldElem r;
            ASSERT_TRUE(fq_sqrt(sq, &r));
            EXPECT_TRUE(r == a || r == -a);
        }
    }
}

TEST(Field, FrobeniusIsAutomorphismFixingPrimeField) {
    std::mt19937_64 rng(11);
    const Level* L = field_extend(F179_2(), 3);
    for (int trial = 0; trial < 100; trial++) {
        FieldElem a = random_elem(L, rng), b = random_elem(L, rng);
        EXPECT_EQ(frobenius(a * b), frobenius(a) * frobenius(b));
        EXPECT_EQ(frobenius(a + b), frobenius(a) + frobenius(b));
    }
    for (u64 n = 0; n < 179; n++) {
        FieldElem a(L, n);
        EXPECT_EQ(frobenius(a), a);
    }
    // something outside F_p moves
    FieldElem i = lift_to(elem_from_flat(F179_2(), {0, 1}), L);
    EXPECT_NE(frobenius(i), i);
}

TEST(Field, InverseRandom) {
    std::mt19937_64 rng(13);
    for (const Level* L : {F179_2(), field_extend(F179_2(), 2), field_extend(F179_2(), 3)}) {
        for (int trial = 0; trial < 100; trial++) {
            FieldElem a = random_elem(L, rng);
            if (a.is_zero()) continue;
            EXPECT_TRUE((a * inverse(a)).is_one());
        }
    }
}

TEST(Field, LiftAndLowerRoundTrip) {
    std::mt19937_64 rng(17);
    const Level* F2 = F179_2();
    const Level* F8 = field_extend(field_extend(F2, 2), 2);
    for (int trial = 0; trial < 50; trial++) {
        FieldElem a = random_elem(F2, rng);
        FieldElem up = lift_to(a, F8);
        FieldElem down;
        ASSERT_TRUE(try_lower(up, F2, &down));
        EXPECT_EQ(down, a);
    }
    // a generic element of F8 does not lower
    FieldElem gen = elem_from_flat(F8, {0, 0, 0, 0, 1, 0, 0, 0});
    FieldElem down;
    EXPECT_FALSE(try_lower(gen, F2, &down));
}

TEST(Poly, ArithmeticMatchesEvaluation) {
    std::mt19937_64 rng(19);
    const Level* L = F179_2();
    for (int trial = 0; trial < 20; trial++) {
        Poly f = random_monic(L, 5, rng), g = random_monic(L, 7, rng);
        FieldElem xi = random_elem(L, rng);
        EXPECT_EQ((f + g).eval(xi), f.eval(xi) + g.eval(xi));
        EXPECT_EQ((f * g).eval(xi), f.eval(xi) * g.eval(xi));
        Poly q, r;
        poly_divmod(f * g + f, g, &q, &r);
        EXPECT_EQ(q * g + r, f * g + f);
    }
}

TEST(Poly, KaratsubaAgreesWithSchoolbook) {
    std::mt19937_64 rng(23);
    const Level* L = F179();
    Poly f = random_monic(L, 150, rng), g = random_monic(L, 130, rng);
    Poly prod = f * g;  // goes through the Karatsuba branch
    // naive reference
    std::vector<FieldElem> ref(150 + 130 + 1, FieldElem::zero(L));
    for (int i = 0; i <= 150; i++)
        for (int j = 0; j <= 130; j++) ref[i + j] = ref[i + j] + f.coeff(i) * g.coeff(j);
    EXPECT_EQ(prod, Poly(L, ref));
}

TEST(Poly, GcdRecoversCommonFactor) {
    std::mt19937_64 rng(29);
    const Level* L = F179_2();
    for (int trial = 0; trial < 20; trial++) {
        Poly h = random_monic(L, 4, rng);
        Poly f = random_monic(L, 3, rng) * h;
        Poly g = random_monic(L, 5, rng) * h;
        Poly d = poly_gcd(f, g);
        EXPECT_TRUE((d % h).is_zero());
    }
}

TEST(Poly, NthRootExamples) {
    const Level* L = F179();
    auto r = poly_nth_root(poly_pow(Poly::x(L), 9), 9);
    ASSERT_TRUE(r.has_value());
    EXPECT_EQ(*r, Poly::x(L));

    Poly P = Poly::from_ints(
        L, {178, 0, 9, 0, 143, 0, 84, 0, 53, 0, 126, 0, 95, 0, 36, 0, 170, 0, 1});
    auto p0 = poly_nth_root(P, 9);
    ASSERT_TRUE(p0.has_value());
    EXPECT_EQ(*p0, Poly::from_ints(L, {178, 0, 1}));

    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; trial++) {
        Poly g = random_monic(L, 4, rng);
        auto back = poly_nth_root(poly_pow(g, 4), 4);
        ASSERT_TRUE(back.has_value());
        EXPECT_EQ(*back, g);
    }
    EXPECT_FALSE(poly_nth_root(Poly::from_ints(L, {1, 1, 1}), 2).has_value());
}

TEST(Poly, NthRootRandomAcrossN) {
    std::mt19937_64 rng(37);
    const Level* L = F179_2();
    for (u64 n : {4ull, 9ull, 25ull}) {
        for (int trial = 0; trial < 10; trial++) {
            Poly g = random_monic(L, 3 + (int)(rng() % 18), rng);
            auto back = poly_nth_root(poly_pow(g, n), n);
            ASSERT_TRUE(back.has_value());
            EXPECT_EQ(*back, g);
        }
    }
}

TEST(Poly, RootsDeterministicAndComplete) {
    const Level* L = F179_2();
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; trial++) {
        std::vector<FieldElem> rts;
        Poly f = Poly::constant(FieldElem::one(L));
        for (int i = 0; i < 5; i++) {
            FieldElem r = random_elem(L, rng);
            rts.push_back(r);
            f = f * (Poly::x(L) - Poly::constant(r));
        }
        auto found = poly_roots(f);
        std::sort(rts.begin(), rts.end(), [](auto& a, auto& b) { return lex_less(a, b); });
        rts.erase(std::unique(rts.begin(), rts.end()), rts.end());
        ASSERT_EQ(found.size(), rts.size());
        for (size_t i = 0; i < rts.size(); i++) EXPECT_EQ(found[i], rts[i]);
    }
    // polynomial with no roots in F_p: x^2+1 over F_179
    EXPECT_TRUE(poly_roots(Poly::from_ints(F179(), {1, 0, 1})).empty());
}

TEST(RatFunc, ReduceAndOps) {
    const Level* L = F179();
    RatFunc f = ratfunc_reduce(Poly::from_ints(L, {-1, 0, 1}), Poly::from_ints(L, {-1, 1}));
    EXPECT_EQ(f.num, Poly::from_ints(L, {1, 1}));
    EXPECT_EQ(f.den, Poly::constant(FieldElem::one(L)));

    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 20; trial++) {
        RatFunc a(random_monic(L, 3, rng), random_monic(L, 2, rng));
        RatFunc b(random_monic(L, 2, rng), random_monic(L, 4, rng));
        for (int k = 0; k < 20; k++) {
            FieldElem xi = random_elem(L, rng);
            auto av = a.eval(xi), bv = b.eval(xi);
            if (!av || !bv) continue;
            auto sv = (a + b).eval(xi);
            auto pv = (a * b).eval(xi);
            if (sv) EXPECT_EQ(*sv, *av + *bv);
            if (pv) EXPECT_EQ(*pv, *av * *bv);
        }
    }
}

TEST(RatFunc, ComposeMatchesEvaluation) {
    const Level* L = F179_2();
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 10; trial++) {
        RatFunc outer(random_monic(L, 3, rng), random_monic(L, 2, rng));
        RatFunc inner(random_monic(L, 2, rng), random_monic(L, 2, rng));
        RatFunc comp = ratfunc_compose(outer, inner);
        for (int k = 0; k < 20; k++) {
            FieldElem xi = random_elem(L, rng);
            auto iv = inner.eval(xi);
            if (!iv) continue;
            auto ov = outer.eval(*iv);
            auto cv = comp.eval(xi);
            if (!ov || !cv) continue;
            EXPECT_EQ(*cv, *ov);
        }
    }
}
