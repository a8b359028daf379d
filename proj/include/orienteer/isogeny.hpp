#ifndef ORIENTEER_ISOGENY_HPP
#define ORIENTEER_ISOGENY_HPP

// Rational-map isogenies in the normalized form (x, y) -> (X(x), y * S(x)):
// Velu construction from a kernel, evaluation, composition, duals.

#include <map>
#include <set>

#include "ec.hpp"

namespace orn {

struct Isogeny {
    Curve domain, codomain;
    RatFunc X;  // x-coordinate map
    RatFunc S;  // y-coordinate map is y * S(x)
    u64 degree = 0;
};

namespace detail {

inline std::vector<u64> point_key(const Point& P) {
    if (P.inf) return {~0ull};
    std::vector<u64> k = P.x.flatten();
    auto ky = P.y.flatten();
    k.insert(k.end(), ky.begin(), ky.end());
    return k;
}

inline RatFunc ratfunc_lift(const RatFunc& f, const Level* L) {
    return RatFunc(poly_lift(f.num, L), poly_lift(f.den, L));
}

inline bool ratfunc_try_lower(const RatFunc& f, const Level* L, RatFunc* out) {
    Poly n, d;
    if (!poly_try_lower(f.num, L, &n) || !poly_try_lower(f.den, L, &d)) return false;
    *out = RatFunc(std::move(n), std::move(d));
    return true;
}

inline Poly poly_coeff_frobenius(const Poly& f) {
    std::vector<FieldElem> c = f.c;
    for (auto& x : c) x = coeff_frobenius(x);
    return Poly(f.lvl, std::move(c));
}

// all points of the subgroup generated by gens, identity included
inline std::vector<Point> close_kernel(const Curve& E0, const std::vector<Point>& gens,
                                       size_t cap = 10000) {
    const Level* L = E0.lvl;
    for (const auto& g : gens)
        if (!level_contains(L, g.E.lvl)) L = g.E.lvl;
    Curve E = curve_lift(E0, L);
    std::map<std::vector<u64>, Point> H;
    Point O(E);
    H.emplace(point_key(O), O);
    for (const auto& g0 : gens) {
        Point g = point_lift(g0, L);
        if (!curve_lift(g.E, L).same_equation(E)) throw math_error("velu: kernel point off curve");
        std::vector<Point> cur;
        for (auto& [k, P] : H) cur.push_back(P);
        Point step = g;
        while (!step.is_identity()) {
            for (const auto& P : cur) {
                Point R = P + step;
                H.emplace(point_key(R), R);
                if (H.size() > cap) throw math_error("velu: kernel exceeds cap");
            }
            step = step + g;
        }
    }
    std::vector<Point> out;
    for (auto& [k, P] : H) out.push_back(P);
    return out;
}

}  // namespace detail

inline Isogeny velu(const Curve& E, const std::vector<Point>& gens) {
    auto K = detail::close_kernel(E, gens);
    const Level* L = K.front().E.lvl;
    Curve Ed = curve_lift(E, L);
    u64 d = (u64)K.size();
    if (d % E.p() == 0) throw math_error("velu: kernel order divisible by p");
    if (d == 1) {
        Isogeny phi;
        phi.domain = E;
        phi.codomain = E;
        phi.X = RatFunc::x(E.lvl);
        phi.S = RatFunc::constant(FieldElem::one(E.lvl));
        phi.degree = 1;
        return phi;
    }
    const Poly W = Ed.rhs();
    RatFunc X = RatFunc::x(L);
    RatFunc xr = RatFunc::x(L);
    FieldElem v = FieldElem::zero(L), w = FieldElem::zero(L);
    std::set<std::vector<u64>> done;
    FieldElem two(L, (u64)2), three(L, (u64)3), four(L, (u64)4);
    for (const auto& R : K) {
        if (R.is_identity()) continue;
        if (done.count(detail::point_key(R))) continue;
        done.insert(detail::point_key(R));
        FieldElem gx = three * R.x * R.x + Ed.a;
        Poly lin = Poly::x(L) - Poly::constant(R.x);
        Poly lin2 = lin * lin;
        if (R.y.is_zero()) {
            // 2-torsion representative
            X = X + RatFunc(W, lin2) - xr - RatFunc::constant(two * R.x);
            v = v + gx;
            w = w + R.x * gx;
        } else {
            done.insert(detail::point_key(-R));
            FieldElem WR = R.y * R.y;
            X = X + RatFunc((W + Poly::constant(WR)) * two, lin2) -
                RatFunc::constant(two) * xr - RatFunc::constant(four * R.x);
            FieldElem vR = two * gx;
            v = v + vR;
            w = w + four * WR + R.x * vR;
        }
    }
    Isogeny phi;
    phi.domain = E;
    phi.codomain = Curve(L, Ed.a - FieldElem(L, (u64)5) * v, Ed.b - FieldElem(L, (u64)7) * w);
    phi.X = X;
    phi.S = ratfunc_derivative(X);
    phi.degree = d;
    if ((u64)phi.X.map_degree() != d) throw math_error("velu: unexpected map degree");
    // lower codomain and maps back to the domain's level when possible
    FieldElem a2, b2;
    if (try_lower(phi.codomain.a, E.lvl, &a2) && try_lower(phi.codomain.b, E.lvl, &b2))
        phi.codomain = Curve(E.lvl, a2, b2);
    RatFunc Xl, Sl;
    if (detail::ratfunc_try_lower(phi.X, E.lvl, &Xl) &&
        detail::ratfunc_try_lower(phi.S, E.lvl, &Sl)) {
        phi.X = Xl;
        phi.S = Sl;
    }
    return phi;
}

inline Point evaluate(const Isogeny& phi, const Point& P) {
    const Level* L = P.inf ? P.E.lvl : P.x.lvl;
    const Level* M = phi.X.lvl();
    const Level* J = detail::level_contains(L, M) ? L : M;
    if (!detail::level_contains(J, L)) throw math_error("evaluate: incompatible levels");
    Curve C = curve_lift(phi.codomain, J);
    if (P.inf) return Point(C);
    auto xv = phi.X.eval(lift_to(P.x, J));
    if (!xv) return Point(C);  // pole: kernel point
    auto sv = phi.S.eval(lift_to(P.x, J));
    if (!sv) throw math_error("evaluate: unexpected pole in y-map");
    return Point(C, *xv, lift_to(P.y, J) * *sv);
}

inline Isogeny isogeny_from_isomorphism(const Isomorphism& iso) {
    const Level* L = iso.u.lvl;
    FieldElem u2 = iso.u * iso.u;
    Isogeny phi;
    phi.domain = iso.domain;
    phi.codomain = iso.codomain;
    phi.X = RatFunc(Poly(L, {FieldElem::zero(L), u2}));
    phi.S = RatFunc::constant(u2 * iso.u);
    phi.degree = 1;
    return phi;
}

inline Isogeny compose(const Isogeny& psi, const Isogeny& phi) {
    const Level* L = detail::level_contains(phi.codomain.lvl, psi.domain.lvl)
                         ? phi.codomain.lvl
                         : psi.domain.lvl;
    if (!curve_lift(phi.codomain, L).same_equation(curve_lift(psi.domain, L)))
        throw math_error("compose: curve mismatch");
    Isogeny out;
    out.domain = phi.domain;
    out.codomain = psi.codomain;
    out.X = ratfunc_compose(psi.X, phi.X);
    out.S = ratfunc_compose(psi.S, phi.X) * phi.S;
    out.degree = psi.degree * phi.degree;
    return out;
}

inline Isogeny frobenius_transport(const Isogeny& phi) {
    Isogeny out;
    out.domain = frobenius_transport(phi.domain);
    out.codomain = frobenius_transport(phi.codomain);
    out.X = RatFunc(detail::poly_coeff_frobenius(phi.X.num), detail::poly_coeff_frobenius(phi.X.den));
    out.S = RatFunc(detail::poly_coeff_frobenius(phi.S.num), detail::poly_coeff_frobenius(phi.S.den));
    out.degree = phi.degree;
    return out;
}

// phi-hat with phi-hat o phi = [deg phi] on the domain, built from velu on
// the image of the deg-torsion, then matched to the domain by isomorphism
// and automorphism correction.
inline Isogeny dual(const Isogeny& phi) {
    const Curve& D = phi.domain;
    u64 d = phi.degree;
    if (d == 1) {
        // invert the linear map x -> u^2 x, y -> u^3 y
        FieldElem u2 = phi.X.num.lead();
        const Level* L = u2.lvl;
        Isogeny out;
        out.domain = phi.codomain;
        out.codomain = phi.domain;
        out.X = RatFunc(Poly(L, {FieldElem::zero(L), inverse(u2)}));
        out.S = RatFunc::constant(inverse(phi.S.num.lead()));
        out.degree = 1;
        return out;
    }
    auto [P, Q] = torsion_basis(D, d);
    Point iP = evaluate(phi, P), iQ = evaluate(phi, Q);
    Isogeny psi0 = velu(phi.codomain, {iP, iQ});
    auto iso = isomorphism(psi0.codomain, D);
    if (!iso) throw math_error("dual: codomain not isomorphic to domain");
    Isogeny cand0 = compose(isogeny_from_isomorphism(*iso), psi0);
    // sample domain points for the [d] check; a deterministic generator over
    // all coordinates, since single-monomial x values can systematically miss
    // the curve on some extension levels
    std::vector<Point> samples;
    u64 seed = 0x9e3779b97f4a7c15ull;
    while (samples.size() < 3) {
        std::vector<u64> flat(D.lvl->deg_over_prime);
        for (auto& v : flat) {
            seed = seed * 6364136223846793005ull + 1442695040888963407ull;
            v = (seed >> 33) % D.p();
        }
        auto T = detail::lift_x(D, elem_from_flat(D.lvl, flat));
        if (T) samples.push_back(*T);
    }
    for (const auto& u : curve_automorphism_scalars(D)) {
        Isogeny cand = compose(isogeny_from_isomorphism(Isomorphism{D, D, u}), cand0);
        bool ok = true;
        for (const auto& T : samples) {
            if (evaluate(cand, evaluate(phi, T)) != scalar_mul((i64)d, point_lift(T, cand.X.lvl()))) {
                ok = false;
                break;
            }
        }
        if (ok) {
            cand.domain = phi.codomain;
            cand.codomain = phi.domain;
            return cand;
        }
    }
    throw math_error("dual: no automorphism correction matched [d]");
}

}  // namespace orn

#endif
