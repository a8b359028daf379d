#ifndef ORIENTEER_DIVELL_HPP
#define ORIENTEER_DIVELL_HPP

// Division of a rational-map isogeny by [ell].  Given ([ell] o phi)(x,y) =
// (F(x), G(x) y), recover phi without factoring the map.  The x-coordinates
// of the translates (x,y) + S_i by ell-torsion points are handled pairwise:
// the product over a +-pair lives in the quadratic algebra generated by
// T = y*y_i with T^2 = W1(x) * W1(x_i), so no torsion y-coordinates are ever
// extracted.

#include "isogeny.hpp"

namespace orn {

namespace detail {

// minimal extension of E.lvl where the relevant torsion x-coordinates all
// exist and the numerator of X1 has a root
inline const Level* division_level(const Curve& E, unsigned ell, const RatFunc& X1) {
    Poly tor = (ell == 2) ? poly_monic(E.rhs()) : division_polynomial(E, ell);
    size_t need = (ell == 2) ? 3 : (size_t)(ell * ell - 1) / 2;
    for (unsigned m = 1; m <= 64; m++) {
        const Level* L = field_extend(E.lvl, m);
        if (poly_roots(poly_lift(tor, L)).size() != need) continue;
        if (!poly_roots(poly_lift(X1.num, L)).empty()) return L;
    }
    throw math_error("division_level: no suitable extension found");
}

}  // namespace detail

// P(x)|X1 := prod over roots r of P of (x - X1(r)), computed without root
// extraction: the norm N_P(x) = prod_i P(x((x,y)+S_i)) equals p(X1(x)), and
// the coefficients of p are read off by repeated evaluation at a root zeta
// of X1's numerator.
inline Poly eval_transform(const Curve& E1, const Poly& P0, const RatFunc& X1) {
    int n = P0.degree();
    if (n < 0) throw math_error("eval_transform: zero polynomial");
    if (!P0.is_monic()) throw math_error("eval_transform: P must be monic");
    if (n == 0) return P0;
    u64 ell2 = (u64)X1.map_degree();
    u64 ell = isqrt_i64((i64)ell2);
    if (ell * ell != ell2) throw math_error("eval_transform: X1 is not a multiplication map");

    const Level* L = detail::division_level(E1, (unsigned)ell, X1);
    Curve E = curve_lift(E1, L);
    Poly P = poly_lift(P0, L);
    const Poly W1 = E.rhs();
    const Poly one = Poly::constant(FieldElem::one(L));
    Poly tor = (ell == 2) ? poly_monic(E.rhs()) : division_polynomial(E, (unsigned)ell);
    auto xs = poly_roots(tor);

    Poly N = P, D = one;
    for (const auto& xi : xs) {
        FieldElem wi = W1.eval(xi);
        Poly lin = Poly::x(L) - Poly::constant(xi);
        Poly L2 = lin * lin;
        // x((x,y)+S_i) = (A + B*T) / lin^2 with T = y*y_i
        Poly A = W1 + Poly::constant(wi) - (Poly::x(L) + Poly::constant(xi)) * L2;
        FieldElem B = wi.is_zero() ? FieldElem::zero(L) : FieldElem(L, (i64)-2);
        // Horner for P(A + B*T) over the algebra, tracking the lin^2 power
        Poly U = one, V = Poly::zero(L);
        Poly L2k = one;
        for (int j = n - 1; j >= 0; j--) {
            L2k = L2k * L2;
            Poly nU = U * A + V * W1 * (B * wi);
            Poly nV = U * B + V * A;
            U = nU + L2k * P.coeff(j);
            V = std::move(nV);
        }
        if (wi.is_zero()) {
            N = N * U;
            D = D * poly_pow(lin, 2 * (u64)n);
        } else {
            N = N * (U * U - V * V * W1 * (wi));
            D = D * poly_pow(lin, 4 * (u64)n);
        }
    }

    RatFunc NP(N, D);
    Poly X1n = poly_lift(X1.num, L);
    FieldElem zeta = FieldElem::zero(L);
    if (!X1n.eval(zeta).is_zero()) zeta = poly_roots(X1n).front();
    RatFunc X1L = detail::ratfunc_lift(X1, L);
    std::vector<FieldElem> coeffs;
    for (int j = 0; j <= n; j++) {
        auto a = NP.eval(zeta);
        if (!a) throw math_error("eval_transform: pole at zeta");
        coeffs.push_back(*a);
        NP = (NP - RatFunc::constant(*a)) / X1L;
    }
    // the norm equals p(X1) only up to a nonzero constant, so every extracted
    // coefficient carries the same factor; p itself is monic by construction
    Poly p(L, std::move(coeffs));
    if (p.degree() != n) throw math_error("eval_transform: degree mismatch");
    p = poly_monic(p);
    Poly low;
    if (poly_try_lower(p, P0.lvl, &low)) return low;
    return p;
}

struct DivisionProblem {
    Curve E1, E2;
    RatFunc F, G;
    unsigned ell = 0;
    FieldElem cF;
    Poly P, Q;
};

inline DivisionProblem make_division_problem(const Curve& E1, const Curve& E2, const RatFunc& F,
                                             const RatFunc& G, unsigned ell) {
    if (ell != 2 && ell != 3 && ell != 5 && ell != 7)
        throw math_error("make_division_problem: ell must be in {2,3,5,7}");
    DivisionProblem prob;
    prob.E1 = E1;
    prob.E2 = E2;
    prob.F = F;
    prob.G = G;
    prob.ell = ell;
    prob.cF = F.num.lead();
    prob.P = poly_monic(F.num);
    const Level* L = F.lvl();
    Curve E = curve_lift(E1, detail::level_contains(L, E1.lvl) ? L : E1.lvl);
    Poly denfac = (ell == 2) ? poly_monic(E.rhs()) : [&] {
        Poly psi = division_polynomial(E, ell);
        return psi * psi;
    }();
    prob.Q = poly_exact_div(poly_lift(F.den, denfac.lvl), denfac);
    return prob;
}

// returns (f, g) with phi(x,y) = (f(x), g(x) y) and [ell] o phi = (F, G y)
inline std::pair<RatFunc, RatFunc> divide_by_ell(const DivisionProblem& prob) {
    unsigned ell = prob.ell;
    u64 ell2 = (u64)ell * ell;
    RatFunc X1 = multiplication_map(prob.E1, ell).first;
    RatFunc Y2 = multiplication_map(prob.E2, ell).second;
    Poly p = eval_transform(prob.E1, prob.P, X1);
    Poly q = eval_transform(prob.E1, prob.Q, X1);
    auto p0 = poly_nth_root(p, ell2);
    auto q0 = poly_nth_root(q, ell2);
    if (!p0 || !q0) throw math_error("divide_by_ell: input not divisible by [ell]");
    FieldElem scale = prob.cF * FieldElem(prob.cF.lvl, (u64)ell2);
    RatFunc f(*p0 * scale, *q0);
    RatFunc g = prob.G / ratfunc_compose(Y2, f);
    return {f, g};
}

// divide a normalized isogeny known to factor as [ell] o phi
inline Isogeny divide_isogeny_by_ell(const Isogeny& theta, unsigned ell) {
    if (theta.degree % ((u64)ell * ell) != 0)
        throw math_error("divide_isogeny_by_ell: degree not divisible by ell^2");
    auto prob = make_division_problem(theta.domain, theta.codomain, theta.X, theta.S, ell);
    auto [f, g] = divide_by_ell(prob);
    Isogeny out;
    out.domain = theta.domain;
    out.codomain = theta.codomain;
    out.X = f;
    out.S = g;
    out.degree = theta.degree / ((u64)ell * ell);
    return out;
}

// [N] as a normalized isogeny record (handy for composing division inputs)
inline Isogeny multiplication_isogeny(const Curve& E, unsigned N) {
    auto [X, Y] = multiplication_map(E, N);
    Isogeny out;
    out.domain = E;
    out.codomain = E;
    out.X = X;
    out.S = Y;
    out.degree = (u64)N * N;
    return out;
}

}  // namespace orn

#endif
