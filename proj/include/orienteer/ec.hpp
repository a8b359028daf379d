#ifndef ORIENTEER_EC_HPP
#define ORIENTEER_EC_HPP

// Short Weierstrass curves y^2 = x^3 + ax + b over a tower level: group law,
// division polynomials, multiplication maps, torsion bases, Frobenius and
// isomorphisms.  All complexity targets are desk scale (tiny p).

#include <array>

#include "poly.hpp"

namespace orn {

struct Curve {
    const Level* lvl = nullptr;
    FieldElem a, b;

    Curve() = default;
    Curve(const Level* L, FieldElem a_, FieldElem b_)
        : lvl(L), a(lift_to(a_, L)), b(lift_to(b_, L)) {
        FieldElem disc = FieldElem(L, (u64)4) * a * a * a + FieldElem(L, (u64)27) * b * b;
        if (disc.is_zero()) throw math_error("Curve: singular equation");
    }
    Curve(const Level* L, i64 a_, i64 b_) : Curve(L, FieldElem(L, a_), FieldElem(L, b_)) {}

    u64 p() const { return lvl->p; }

    Poly rhs() const {  // x^3 + a x + b
        return Poly(lvl, {b, a, FieldElem::zero(lvl), FieldElem::one(lvl)});
    }

    FieldElem j_invariant() const {
        FieldElem a3 = FieldElem(lvl, (u64)4) * a * a * a;
        FieldElem den = a3 + FieldElem(lvl, (u64)27) * b * b;
        return FieldElem(lvl, (u64)1728) * a3 * inverse(den);
    }

    bool same_equation(const Curve& o) const { return a == o.a && b == o.b; }
};

inline Curve curve_lift(const Curve& E, const Level* L) {
    return Curve(L, lift_to(E.a, L), lift_to(E.b, L));
}

struct Point {
    Curve E;
    bool inf = true;
    FieldElem x, y;

    Point() = default;
    explicit Point(const Curve& E_) : E(E_), inf(true) {}
    Point(const Curve& E_, FieldElem x_, FieldElem y_)
        : E(E_), inf(false), x(lift_to(x_, E_.lvl)), y(lift_to(y_, E_.lvl)) {
        FieldElem lhs = y * y;
        FieldElem rhs = (x * x + E.a) * x + E.b;
        if (!(lhs == rhs)) throw math_error("Point: not on curve");
    }

    bool is_identity() const { return inf; }
};

inline Point point_lift(const Point& P, const Level* L) {
    Curve E = curve_lift(P.E, L);
    if (P.inf) return Point(E);
    return Point(E, lift_to(P.x, L), lift_to(P.y, L));
}

// level-coercing equality (compares coordinates, same curve equation assumed)
inline bool operator==(const Point& P, const Point& Q) {
    if (P.inf || Q.inf) return P.inf && Q.inf;
    return P.x == Q.x && P.y == Q.y;
}
inline bool operator!=(const Point& P, const Point& Q) { return !(P == Q); }

inline Point operator-(const Point& P) {
    if (P.inf) return P;
    Point R = P;
    R.y = -R.y;
    return R;
}

inline Point operator+(const Point& P, const Point& Q) {
    if (P.inf) return Q;
    if (Q.inf) return P;
    // allow operands at different levels
    if (P.E.lvl != Q.E.lvl) {
        const Level* L = detail::level_contains(P.E.lvl, Q.E.lvl) ? P.E.lvl : Q.E.lvl;
        return point_lift(P, L) + point_lift(Q, L);
    }
    const Curve& E = P.E;
    if (P.x == Q.x) {
        if (P.y == -Q.y) return Point(E);  // includes 2-torsion doubling to O
        // doubling
        FieldElem lam = (FieldElem(E.lvl, (u64)3) * P.x * P.x + E.a) *
                        inverse(FieldElem(E.lvl, (u64)2) * P.y);
        FieldElem x3 = lam * lam - P.x - P.x;
        FieldElem y3 = lam * (P.x - x3) - P.y;
        return Point(E, x3, y3);
    }
    FieldElem lam = (Q.y - P.y) * inverse(Q.x - P.x);
    FieldElem x3 = lam * lam - P.x - Q.x;
    FieldElem y3 = lam * (P.x - x3) - P.y;
    return Point(E, x3, y3);
}

inline Point operator-(const Point& P, const Point& Q) { return P + (-Q); }

inline Point scalar_mul(i64 n, const Point& P) {
    if (P.inf) return P;
    Point base = n < 0 ? -P : P;
    u64 k = n < 0 ? (u64)(-n) : (u64)n;
    Point R(P.E);
    while (k) {
        if (k & 1) R = R + base;
        base = base + base;
        k >>= 1;
    }
    return R;
}

inline Point linear_combination(const Point& P, const Point& Q, i64 a, i64 b) {
    return scalar_mul(a, P) + scalar_mul(b, Q);
}

inline i64 point_order(const Point& P, i64 bound = 1000000) {
    Point R = P;
    for (i64 n = 1; n <= bound; n++) {
        if (R.inf) return n;
        R = R + P;
    }
    throw math_error("point_order: exceeded bound");
}

// ---- division polynomials
//
// psi_n = g_n            for n odd,
// psi_n = (2y) * g_n     for n even,
// with y^2 replaced by W(x) = x^3 + ax + b throughout.

namespace detail {

inline std::vector<Poly> divpoly_g(const Curve& E, unsigned upto) {
    const Level* L = E.lvl;
    const Poly W = E.rhs();
    const Poly W2_16 = W * W * FieldElem(L, (u64)16);
    std::vector<Poly> g(std::max(upto + 3, 5u), Poly::zero(L));
    Poly one = Poly::constant(FieldElem::one(L));
    const FieldElem &a = E.a, &b = E.b;
    g[0] = Poly::zero(L);
    g[1] = one;
    g[2] = one;
    // psi3 = 3x^4 + 6a x^2 + 12b x - a^2
    g[3] = Poly(L, {-(a * a), FieldElem(L, (u64)12) * b, FieldElem(L, (u64)6) * a,
                    FieldElem::zero(L), FieldElem(L, (u64)3)});
    // psi4 = 2y * 2(x^6 + 5a x^4 + 20b x^3 - 5a^2 x^2 - 4ab x - 8b^2 - a^3)
    g[4] = Poly(L, {-(FieldElem(L, (u64)8) * b * b + a * a * a),
                    -(FieldElem(L, (u64)4) * a * b), -(FieldElem(L, (u64)5) * a * a),
                    FieldElem(L, (u64)20) * b, FieldElem(L, (u64)5) * a,
                    FieldElem::zero(L), FieldElem::one(L)}) *
           FieldElem(L, (u64)2);
    auto G = [&](i64 i) -> Poly {
        if (i < 0) return -g[(size_t)(-i)];  // psi_{-n} = -psi_n
        return g[(size_t)i];
    };
    for (unsigned n = 5; n < g.size(); n++) {
        unsigned m = n / 2;
        if (n & 1) {
            Poly t1 = G(m + 2) * G(m) * G(m) * G(m);
            Poly t2 = G(m - 1) * G(m + 1) * G(m + 1) * G(m + 1);
            if (m % 2 == 0)
                g[n] = W2_16 * t1 - t2;
            else
                g[n] = t1 - W2_16 * t2;
        } else {
            g[n] = G(m) * (G(m + 2) * G(m - 1) * G(m - 1) - G(m - 2) * G(m + 1) * G(m + 1));
        }
    }
    return g;
}

}  // namespace detail

inline Poly division_polynomial(const Curve& E, unsigned N) {
    if (N == 0) throw math_error("division_polynomial: N >= 1");
    auto g = detail::divpoly_g(E, N);
    return poly_monic(g[N]);
}

// [N](x,y) = (X_N(x), Y_N(x) * y)
inline std::pair<RatFunc, RatFunc> multiplication_map(const Curve& E, unsigned N) {
    const Level* L = E.lvl;
    if (N == 0) throw math_error("multiplication_map: N >= 1");
    if (N == 1) return {RatFunc::x(L), RatFunc::constant(FieldElem::one(L))};
    if (L->p != 0 && N % L->p == 0) throw math_error("multiplication_map: p | N");
    auto g = detail::divpoly_g(E, N + 2);
    auto G = [&](i64 i) -> Poly {
        if (i < 0) return -g[(size_t)(-i)];
        return g[(size_t)i];
    };
    const Poly W = E.rhs();
    Poly num_x, den_x, num_y, den_y;
    Poly xpoly = Poly::x(L);
    Poly gN2 = G(N) * G(N);
    Poly omega = G(N + 2) * G(N - 1) * G(N - 1) - G(N - 2) * G(N + 1) * G(N + 1);
    if (N & 1) {
        num_x = xpoly * gN2 - W * G(N + 1) * G(N - 1) * FieldElem(L, (u64)4);
        den_x = gN2;
        num_y = omega;
        den_y = gN2 * G(N);
    } else {
        Poly W4 = W * FieldElem(L, (u64)4);
        num_x = xpoly * gN2 * W4 - G(N + 1) * G(N - 1);
        den_x = gN2 * W4;
        num_y = omega;
        den_y = gN2 * G(N) * W * W * FieldElem(L, (u64)16);
    }
    return {ratfunc_reduce(num_x, den_x), ratfunc_reduce(num_y, den_y)};
}

// ---- Frobenius

inline FieldElem coeff_frobenius(const FieldElem& a) { return pow_u128(a, a.lvl->p); }

inline Curve frobenius_transport(const Curve& E) {
    return Curve(E.lvl, coeff_frobenius(E.a), coeff_frobenius(E.b));
}
inline Point frobenius_transport_point(const Point& P) {
    Curve E = frobenius_transport(P.E);
    if (P.inf) return Point(E);
    return Point(E, coeff_frobenius(P.x), coeff_frobenius(P.y));
}
// the p-power Frobenius isogeny image of a point (same as coordinatewise p-power)
inline Point frobenius_point(const Point& P) { return frobenius_transport_point(P); }

// ---- supersingularity (exact count over F_{p^2} at desk scale)

inline bool is_supersingular(const Curve& E0) {
    const Level* base = prime_field(E0.lvl->p);
    const Level* F2 = field_extend(base, 2);
    Curve E = E0;
    if (E.lvl != F2) {
        FieldElem a2, b2;
        Curve El = curve_lift(E, E.lvl->deg_over_prime <= 2 ? F2 : E.lvl);
        if (El.lvl != F2) {
            if (!try_lower(E.a, F2, &a2) || !try_lower(E.b, F2, &b2))
                throw math_error("is_supersingular: curve not defined over F_{p^2}");
            El = Curve(F2, a2, b2);
        }
        E = El;
    }
    u64 p = E.p();
    BigUint half = F2->q;
    half.sub_small(1);
    half.shr1();
    u128 count = 1;  // identity
    for (u64 n = 0; n < p * p; n++) {
        FieldElem x = elem_from_index(F2, n);
        FieldElem w = (x * x + E.a) * x + E.b;
        if (w.is_zero()) {
            count += 1;
            continue;
        }
        FieldElem chi = pow_big(w, half);
        count += chi.is_one() ? 2 : 0;
    }
    i128 t = (i128)((u128)p * p + 1) - (i128)count;
    return t % (i128)p == 0;
}

// Frobenius of the base field of E acting as a scalar: returns lambda in
// {p, -p, ...} such that pi(P) = [lambda]P for all P, or nullopt.
// Only meaningful for curves over F_{p^2}.
inline std::optional<i64> frobenius_scalar(const Curve& E) {
    const Level* L = E.lvl;
    if (L->deg_over_prime != 2) return std::nullopt;
    u64 p = E.p();
    // sample a few points
    int found = 0;
    i64 lambda = 0;
    for (u64 n = 1; n < p * p && found < 3; n++) {
        FieldElem x = elem_from_index(L, n);
        FieldElem w = (x * x + E.a) * x + E.b;
        FieldElem y;
        if (!fq_sqrt(w, &y)) continue;
        Point P(E, x, y);
        Point piP(E, pow_u128(P.x, p * (u128)p), pow_u128(P.y, p * (u128)p));
        Point pP = scalar_mul((i64)p, P);
        i64 this_lambda;
        if (piP == pP)
            this_lambda = (i64)p;
        else if (piP == -pP)
            this_lambda = -(i64)p;
        else
            return std::nullopt;
        if (found == 0)
            lambda = this_lambda;
        else if (lambda != this_lambda)
            return std::nullopt;  // ambiguous small point; keep sampling semantics simple
        found++;
    }
    if (found < 3) return std::nullopt;
    return lambda;
}

// ---- torsion bases

namespace detail {

// x-coordinates of the nontrivial N-torsion over the level of E
inline std::vector<FieldElem> torsion_x_coords(const Curve& E, unsigned N) {
    std::vector<FieldElem> xs;
    if (N % 2 == 0) {
        for (const auto& r : poly_roots(E.rhs())) xs.push_back(r);
    }
    if (N > 2) {
        Poly psi = division_polynomial(E, N);
        for (const auto& r : poly_roots(psi)) xs.push_back(r);
    }
    std::sort(xs.begin(), xs.end(),
              [](const FieldElem& a, const FieldElem& b) { return lex_less(a, b); });
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

inline std::optional<Point> lift_x(const Curve& E, const FieldElem& x) {
    FieldElem w = (x * x + E.a) * x + E.b;
    FieldElem y;
    if (!fq_sqrt(w, &y)) return std::nullopt;
    return Point(E, x, y);
}

}  // namespace detail

// Basis of E[q] for prime q over a suitable extension of E's field.
// Deterministic: sorted roots, lexicographically least square roots.
inline std::pair<Point, Point> torsion_basis_prime(const Curve& E0, unsigned q) {
    if (E0.p() == q) throw math_error("torsion_basis: q = p unsupported");
    auto lam = frobenius_scalar(E0);
    unsigned m_hint = 0;
    if (lam) {
        // E[q] rational over the degree-m extension with lambda^m = 1 mod q
        i64 l = ((*lam % (i64)q) + (i64)q) % (i64)q;
        if (l == 0) throw math_error("torsion_basis: p | q impossible here");
        u64 acc = 1;
        for (unsigned m = 1; m <= 4 * q * q; m++) {
            acc = (acc * (u64)l) % q;
            if (acc == 1 % q) { m_hint = m; break; }
        }
    }
    std::vector<unsigned> tries;
    if (m_hint) tries = {m_hint};
    else tries = {1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48};
    for (unsigned m : tries) {
        const Level* L = field_extend(E0.lvl, m);
        Curve E = curve_lift(E0, L);
        auto xs = detail::torsion_x_coords(E, q);
        std::vector<Point> pts;
        for (const auto& x : xs) {
            auto P = detail::lift_x(E, x);
            if (P) pts.push_back(*P);
        }
        // need the full group: (q^2-1)/2 x-coordinates for odd q, 3 for q=2
        size_t need = q == 2 ? 3 : (size_t)(q * q - 1) / 2;
        if (pts.size() < need) continue;
        // choose P = first point, Q = first point independent of P
        const Point& P = pts[0];
        for (size_t i = 1; i < pts.size(); i++) {
            bool dep = false;
            Point R(E);
            for (unsigned k = 0; k < q; k++) {
                if (R == pts[i] || R == -pts[i]) { dep = true; break; }
                R = R + P;
            }
            if (!dep) return {P, pts[i]};
        }
    }
    throw math_error("torsion_basis_prime: extension search failed");
}

// Preimage of P under [q]: deterministic choice among solutions of [q]X = P.
inline std::optional<Point> divide_point(const Point& P, unsigned q) {
    const Curve& E = P.E;
    auto [X, Y] = multiplication_map(E, q);
    Poly eq = P.inf ? X.den : X.num - X.den * P.x;
    for (const auto& r : poly_roots(eq)) {
        auto C = detail::lift_x(E, r);
        if (!C) continue;
        Point img = scalar_mul(q, *C);
        if (img == P) return *C;
        if (img == -P) return -*C;
    }
    return std::nullopt;
}

// Basis of E[N] for N coprime to p, over a common extension.
inline std::pair<Point, Point> torsion_basis(const Curve& E0, u64 N) {
    if (N < 2) throw math_error("torsion_basis: N >= 2");
    auto fac = factor_u64(N);
    std::vector<std::pair<Point, Point>> parts;
    const Level* top = E0.lvl;
    for (auto [q, k] : fac) {
        auto [P, Q] = torsion_basis_prime(E0, (unsigned)q);
        for (unsigned j = 1; j < k; j++) {
            std::optional<Point> P2 = divide_point(P, (unsigned)q);
            std::optional<Point> Q2 = divide_point(Q, (unsigned)q);
            if (!P2 || !Q2) {
                // grow the field and retry this lift
                unsigned grow = (q == 2) ? 2 : (unsigned)q;
                const Level* L2 = field_extend(P.E.lvl, grow);
                P = point_lift(P, L2);
                Q = point_lift(Q, L2);
                j--;
                if (L2->deg_over_prime > 64)
                    throw math_error("torsion_basis: extension beyond supported degree");
                continue;
            }
            P = *P2;
            Q = *Q2;
        }
        if (detail::level_contains(P.E.lvl, top)) top = P.E.lvl;
        parts.push_back({P, Q});
    }
    for (auto& pq : parts) {
        if (!detail::level_contains(top, pq.first.E.lvl)) {
            // unrelated branches cannot occur: extensions grow linearly from E0.lvl
            throw math_error("torsion_basis: incompatible extensions");
        }
    }
    Point P(curve_lift(E0, top)), Q(curve_lift(E0, top));
    for (auto& pq : parts) {
        P = P + point_lift(pq.first, top);
        Q = Q + point_lift(pq.second, top);
    }
    return {P, Q};
}

// ---- isomorphisms

// (x,y) -> (u^2 x, u^3 y) maps E1 to E2 when a2 = u^4 a1, b2 = u^6 b1.
struct Isomorphism {
    Curve domain, codomain;
    FieldElem u;

    Point apply(const Point& P) const {
        const Level* L = u.lvl;
        if (!P.inf && detail::level_contains(P.x.lvl, L)) L = P.x.lvl;
        Curve C = curve_lift(codomain, L);
        if (P.inf) return Point(C);
        FieldElem uu = lift_to(u, L);
        FieldElem u2 = uu * uu;
        return Point(C, u2 * lift_to(P.x, L), u2 * uu * lift_to(P.y, L));
    }
    Isomorphism inverse_map() const { return {codomain, domain, inverse(u)}; }
};

inline std::vector<FieldElem> curve_automorphism_scalars(const Curve& E) {
    // all u with u^4 a = a and u^6 b = b, over F_{p^2}
    const Level* F2 = field_extend(prime_field(E.p()), 2);
    const Level* L = detail::level_contains(E.lvl, F2) ? E.lvl : F2;
    std::vector<FieldElem> us;
    Poly z = Poly::x(L);
    Poly unit;
    if (!E.b.is_zero() && !E.a.is_zero())
        unit = poly_pow(z, 2) - Poly::constant(FieldElem::one(L));
    else if (E.b.is_zero())
        unit = poly_pow(z, 4) - Poly::constant(FieldElem::one(L));
    else
        unit = poly_pow(z, 6) - Poly::constant(FieldElem::one(L));
    for (const auto& r : poly_roots(unit)) us.push_back(r);
    return us;
}

inline std::optional<Isomorphism> isomorphism(const Curve& E1, const Curve& E2) {
    const Level* L = detail::level_contains(E1.lvl, E2.lvl) ? E1.lvl : E2.lvl;
    if (!detail::level_contains(L, E1.lvl) || !detail::level_contains(L, E2.lvl))
        return std::nullopt;
    Curve A = curve_lift(E1, L), B = curve_lift(E2, L);
    if (!(A.j_invariant() == B.j_invariant())) return std::nullopt;
    // find u with u^4 a1 = a2, u^6 b1 = b2, allowing a bounded extension
    for (unsigned grow : {1u, 2u, 3u, 4u, 6u}) {
        const Level* LL = field_extend(L, grow);
        Curve Au = curve_lift(A, LL), Bu = curve_lift(B, LL);
        std::vector<FieldElem> cands;
        Poly z = Poly::x(LL);
        if (!Au.a.is_zero() && !Au.b.is_zero()) {
            // u^2 = (a1 b2) / (a2 b1)
            FieldElem u2 = (Au.a * Bu.b) * inverse(Bu.a * Au.b);
            FieldElem u;
            if (fq_sqrt(u2, &u)) cands = {u, -u};
        } else if (Au.b.is_zero()) {
            for (const auto& r : poly_roots(poly_pow(z, 4) - Poly::constant(Bu.a * inverse(Au.a))))
                cands.push_back(r);
        } else {
            for (const auto& r : poly_roots(poly_pow(z, 6) - Poly::constant(Bu.b * inverse(Au.b))))
                cands.push_back(r);
        }
        for (const auto& u : cands) {
            FieldElem u2 = u * u, u4 = u2 * u2;
            if (u4 * Au.a == Bu.a && u4 * u2 * Au.b == Bu.b)
                return Isomorphism{E1, E2, u};
        }
    }
    return std::nullopt;
}

// canonical model for a j-invariant (the standard formula)
inline Curve curve_from_j(const Level* L, const FieldElem& j0) {
    FieldElem j = lift_to(j0, L);
    FieldElem c1728(L, (u64)1728);
    if (j.is_zero()) return Curve(L, FieldElem::zero(L), FieldElem::one(L));
    if (j == c1728) return Curve(L, FieldElem::one(L), FieldElem::zero(L));
    FieldElem k = j * inverse(c1728 - j);
    return Curve(L, FieldElem(L, (u64)3) * k, FieldElem(L, (u64)2) * k);
}

}  // namespace orn

#endif
