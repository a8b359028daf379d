#ifndef ORIENTEER_ENDO_HPP
#define ORIENTEER_ENDO_HPP

// Traced endomorphisms (E, theta, t, n) in three interchangeable
// representations: a rational self-map, an isogeny chain with a lazy scalar
// shift, or a quaternion on the j = 1728 curve.  Operations: translation by
// an integer, refactoring into a prime-power chain, dividing a chain by
// [ell], powersmooth ell-suitable translates, and the primitive quadratic
// order containing Z[theta].

#include <algorithm>
#include <variant>

#include "divell.hpp"
#include "quad.hpp"
#include "quat.hpp"

namespace orn {

struct IsogenyChain {
    std::vector<Isogeny> links;  // applied in order: links[0] first
    i64 shift = 0;               // theta = (composition + [shift]) / [divide]
    u64 divide = 1;              // lazy scalar division; composition + [shift] kills E[divide]
    bool prime_power = false;    // links have pairwise-coprime prime-power degrees
};

struct TracedEndo {
    Curve E;
    std::variant<Isogeny, IsogenyChain, QuatElem> rep;
    i64 t = 0;
    i64 n = 1;

    TracedEndo() : E(field_extend(prime_field(3), 2), -1, 0) {}
    TracedEndo(const Curve& E_, std::variant<Isogeny, IsogenyChain, QuatElem> rep_, i64 t_, i64 n_)
        : E(E_), rep(std::move(rep_)), t(t_), n(n_) {}

    i64 disc() const { return t * t - 4 * n; }
};

namespace detail {

// preimage of P under [d], growing the field as needed
inline Point divide_point_grow(const Point& P, u64 d) {
    Point S = P;
    for (const auto& [q, k] : factor_u64(d)) {
        for (unsigned j = 0; j < k; j++) {
            std::optional<Point> nxt;
            for (unsigned m : {1u, 2u, 4u, 8u, 16u, 3u, 6u, 12u}) {
                Point Sm = point_lift(S, field_extend(S.E.lvl, m));
                nxt = divide_point(Sm, (unsigned)q);
                if (nxt) break;
            }
            if (!nxt) throw math_error("divide_point_grow: no preimage found");
            S = *nxt;
        }
    }
    return S;
}

}  // namespace detail

inline Point evaluate_endo(const TracedEndo& th, const Point& P) {
    if (auto* iso = std::get_if<Isogeny>(&th.rep)) return evaluate(*iso, P);
    if (auto* q = std::get_if<QuatElem>(&th.rep)) return quat_apply(*q, P);
    const auto& ch = std::get<IsogenyChain>(th.rep);
    // theta = (links + [shift]) / [divide]; the numerator kills E[divide],
    // so evaluating it at any [divide]-preimage is well defined
    Point base = ch.divide > 1 ? detail::divide_point_grow(P, ch.divide) : P;
    Point R = base;
    for (const auto& link : ch.links) R = evaluate(link, R);
    if (ch.shift != 0) {
        const Level* L = R.E.lvl;
        R = R + scalar_mul(ch.shift, point_lift(base, L));
    }
    if (ch.divide > 1) {
        const Level* L0 = detail::level_contains(P.E.lvl, th.E.lvl) ? P.E.lvl : th.E.lvl;
        if (auto low = detail::point_try_lower(R, L0)) R = *low;
    }
    return R;
}

inline TracedEndo realize_endo_1728(const QuatElem& q) {
    if (!in_maximal_order(q)) throw math_error("realize_endo_1728: not in the maximal order");
    if (q.is_integer()) throw math_error("realize_endo_1728: scalar quaternion");
    const Level* L2 = field_extend(prime_field(q.p), 2);
    return TracedEndo(Curve(L2, -1, 0), q, q.trace(), q.norm());
}

namespace detail {

// theta + [N] as a rational self-map, via the addition formulas applied to
// the pair of x-rational maps
inline Isogeny isogeny_add_scalar(const Isogeny& th, i64 N, u64 new_degree) {
    const Curve& E = th.domain;
    auto [XN, YN] = multiplication_map(E, (unsigned)std::llabs(N));
    const Level* L = level_contains(th.X.lvl(), E.lvl) ? th.X.lvl() : E.lvl;
    RatFunc F = ratfunc_lift(th.X, L), G = ratfunc_lift(th.S, L);
    RatFunc Xn = ratfunc_lift(XN, L), Yn = ratfunc_lift(YN, L);
    if (N < 0) Yn = RatFunc::constant(FieldElem(L, (i64)-1)) * Yn;
    RatFunc D = F - Xn;
    if (D.num.is_zero()) throw math_error("isogeny_add_scalar: theta and [N] share the x-map");
    RatFunc W(poly_lift(E.rhs(), L));
    RatFunc lam2 = (G - Yn) * (G - Yn) * W / (D * D);
    RatFunc x3 = lam2 - F - Xn;
    RatFunc s3 = (G - Yn) / D * (F - x3) - G;
    if ((u64)x3.map_degree() != new_degree)
        throw math_error("isogeny_add_scalar: degree mismatch after addition");
    Isogeny out;
    out.domain = E;
    out.codomain = E;
    out.X = x3;
    out.S = s3;
    out.degree = new_degree;
    return out;
}

inline std::vector<Point> sample_points(const Curve& E, size_t count) {
    std::vector<Point> pts;
    for (u64 n = 0; pts.size() < count; n++) {
        if (n > 100000) throw math_error("sample_points: exhausted");
        auto P = lift_x(E, elem_from_index(E.lvl, n));
        if (P && !P->inf) pts.push_back(*P);
    }
    return pts;
}

}  // namespace detail

inline TracedEndo translate(const TracedEndo& th, i64 N) {
    i64 nn = th.n + th.t * N + N * N;
    if (nn <= 0) throw math_error("translate: degenerate result");
    if (nn % (i64)th.E.p() == 0) throw math_error("translate: inseparable result, choose different N");
    TracedEndo out = th;
    if (N == 0) return out;
    if (auto* q = std::get_if<QuatElem>(&out.rep)) {
        *q = *q + QuatElem(q->p, N, 0, 0, 0);
    } else if (auto* ch = std::get_if<IsogenyChain>(&out.rep)) {
        ch->shift += N * (i64)ch->divide;
    } else {
        out.rep = detail::isogeny_add_scalar(std::get<Isogeny>(out.rep), N, (u64)nn);
    }
    out.t = th.t + 2 * N;
    out.n = nn;
    return out;
}

// residue class of T mod N making theta + [T] N-suitable (theta of the form
// f*omega + k*N afterwards), plus the representative of smallest
// non-negative trace
struct SuitableClass {
    i64 residue = 0;
    i64 modulus = 1;
    i64 minimal_T = 0;
};

inline SuitableClass suitable_translation_class(i64 t, i64 disc, i64 N) {
    if (N < 1) throw math_error("suitable_translation_class: N must be positive");
    QuadOrder O = QuadOrder::from_disc(disc);
    i64 f = O.conductor;
    i64 r = (O.fundamental_disc % 2 != 0) ? (f - t) / 2 : -t / 2;
    r = ((r % N) + N) % N;
    // smallest T = r (mod N) with t + 2T >= 0
    i64 lo = -t / 2 - 2;
    while (t + 2 * lo < 0) lo++;
    i64 T = lo + ((r - lo) % N + N) % N;
    return {r, N, T};
}

// prime-power chain form of theta; primes listed in first_primes come first
// in the composition order
inline TracedEndo refactor_chain(const TracedEndo& th, const std::vector<u64>& first_primes = {}) {
    const Curve& E = th.E;
    if (th.n % (i64)E.p() == 0) throw math_error("refactor_chain: degree divisible by p");
    auto fac = factor_u64((u64)th.n);
    std::vector<u64> primes;
    for (u64 q : first_primes)
        if (fac.count(q)) primes.push_back(q);
    for (const auto& [q, k] : fac)
        if (std::find(primes.begin(), primes.end(), q) == primes.end()) primes.push_back(q);

    IsogenyChain chain;
    chain.prime_power = true;
    Curve cur = E;
    for (u64 q : primes) {
        unsigned k = fac[q];
        u64 qk = 1;
        for (unsigned i = 0; i < k; i++) qk *= q;
        auto [P, Q] = torsion_basis(E, qk);
        Point thP = evaluate_endo(th, P), thQ = evaluate_endo(th, Q);
        const Level* LT = detail::level_contains(thP.E.lvl, thQ.E.lvl) ? thP.E.lvl : thQ.E.lvl;
        thP = point_lift(thP, LT);
        thQ = point_lift(thQ, LT);
        // kernel part G = ker(theta) ∩ E[q^k] by enumerating the q^k-torsion
        std::vector<Point> mP{Point(P.E)}, mQ{Point(Q.E)}, miP{Point(thP.E)}, miQ{Point(thQ.E)};
        for (u64 a = 1; a < qk; a++) {
            mP.push_back(mP.back() + P);
            mQ.push_back(mQ.back() + Q);
            miP.push_back(miP.back() + thP);
            miQ.push_back(miQ.back() + thQ);
        }
        std::vector<Point> gens;
        for (u64 a = 0; a < qk; a++) {
            for (u64 b = 0; b < qk; b++) {
                if (a == 0 && b == 0) continue;
                if ((miP[a] + miQ[b]).inf) gens.push_back(mP[a] + mQ[b]);
            }
        }
        if (gens.size() + 1 != qk)
            throw math_error("refactor_chain: kernel part has unexpected order");
        for (auto& g : gens)
            for (const auto& link : chain.links) g = evaluate(link, g);
        const Level* LK = gens.front().E.lvl;
        for (const auto& g : gens)
            if (detail::level_contains(g.E.lvl, LK)) LK = g.E.lvl;
        for (auto& g : gens) g = point_lift(g, LK);
        Isogeny phi = velu(cur, gens);
        chain.links.push_back(phi);
        cur = phi.codomain;
    }

    // close the loop: the chain composition equals theta up to an isomorphism
    // onto E, fixed by comparison on sample points
    if (chain.links.empty())
        chain.links.push_back(isogeny_from_isomorphism(Isomorphism{E, E, FieldElem::one(E.lvl)}));
    auto iso = isomorphism(cur, E);
    if (!iso) throw math_error("refactor_chain: codomain not isomorphic to E");
    Isogeny base_last = compose(isogeny_from_isomorphism(*iso), chain.links.back());
    auto samples = detail::sample_points(E, 3);
    auto eval_chain = [&](const Isogeny& last, const Point& S) {
        Point R = S;
        for (size_t i = 0; i + 1 < chain.links.size(); i++) R = evaluate(chain.links[i], R);
        return evaluate(last, R);
    };
    bool fixed = false;
    for (const auto& u : curve_automorphism_scalars(E)) {
        Isogeny cand = compose(isogeny_from_isomorphism(Isomorphism{E, E, u}), base_last);
        bool ok = true;
        for (const auto& S : samples) {
            if (eval_chain(cand, S) != evaluate_endo(th, S)) { ok = false; break; }
        }
        if (ok) {
            cand.codomain = E;
            chain.links.back() = cand;
            fixed = true;
            break;
        }
    }
    if (!fixed) throw math_error("refactor_chain: no automorphism correction matched");
    return TracedEndo(E, std::move(chain), th.t, th.n);
}

// theta = [ell] o theta': peel one factor of [ell] off a chain endomorphism
inline TracedEndo divide_chain_by_ell(const TracedEndo& th0, unsigned ell) {
    i64 ell2 = (i64)ell * ell;
    if (th0.t % (i64)ell != 0 || th0.n % ell2 != 0)
        throw math_error("divide_chain_by_ell: trace or norm not divisible");
    auto [P, Q] = torsion_basis(th0.E, ell);
    if (!evaluate_endo(th0, P).inf || !evaluate_endo(th0, Q).inf)
        throw math_error("divide_chain_by_ell: endomorphism does not kill the ell-torsion");
    TracedEndo th = refactor_chain(th0, {ell});
    auto& chain = std::get<IsogenyChain>(th.rep);
    chain.links.front() = divide_isogeny_by_ell(chain.links.front(), ell);
    th.t /= (i64)ell;
    th.n /= ell2;
    return th;
}

// theta = [ell] o theta': division for any representation.  Rational maps
// divide structurally, chains divide lazily, quaternions divide coordinates.
inline TracedEndo divide_endo_by_ell(const TracedEndo& th0, unsigned ell) {
    i64 ell2 = (i64)ell * ell;
    if (th0.t % (i64)ell != 0 || th0.n % ell2 != 0)
        throw math_error("divide_endo_by_ell: trace or norm not divisible");
    auto [P, Q] = torsion_basis(th0.E, ell);
    if (!evaluate_endo(th0, P).inf || !evaluate_endo(th0, Q).inf)
        throw math_error("divide_endo_by_ell: endomorphism does not kill the ell-torsion");
    TracedEndo th = th0;
    if (auto* iso = std::get_if<Isogeny>(&th.rep)) {
        th.rep = divide_isogeny_by_ell(*iso, ell);
    } else if (auto* ch = std::get_if<IsogenyChain>(&th.rep)) {
        ch->divide *= ell;
        ch->prime_power = false;
    } else {
        auto& q = std::get<QuatElem>(th.rep);
        q = QuatElem(q.p, q.w, q.x, q.y, q.z, q.den * (i64)ell);
    }
    th.t /= (i64)ell;
    th.n /= ell2;
    return th;
}

inline bool is_powersmooth(u64 n, u64 B) {
    for (const auto& [q, k] : factor_u64(n)) {
        u64 qk = 1;
        for (unsigned i = 0; i < k; i++) qk *= q;
        if (qk > B) return false;
    }
    return true;
}

// the full q^k-torsion of a supersingular curve is rational over the
// extension of F_p^2 of degree ord(-p mod q^k)
inline unsigned torsion_field_degree(u64 p, u64 qk) {
    if (qk == 1) return 1;
    u64 m = (qk - p % qk) % qk;
    unsigned d = 1;
    u64 v = m % qk;
    while (v != 1 % qk) {
        v = v * m % qk;
        if (++d > 64) break;
    }
    return d;
}

// rough cost of building a torsion basis for every prime power dividing n:
// the division polynomial degree grows with q^k and the field degree with
// ord(-p mod q^k), so cap their product
inline bool torsion_affordable(u64 n, u64 p, u64 cost_cap = 100) {
    for (const auto& [q, k] : factor_u64(n)) {
        u64 qk = 1;
        for (unsigned i = 0; i < k; i++) qk *= q;
        if (qk * torsion_field_degree(p, qk) > cost_cap) return false;
    }
    return true;
}

// smallest-|b|-first sweep over ell-suitable translates until the norm is
// B-powersmooth and coprime to p; result refactored into prime-power form
inline TracedEndo suitable_translate_powersmooth(const TracedEndo& th, unsigned ell, u64 B = 200) {
    auto cls = suitable_translation_class(th.t, th.disc(), (i64)ell);
    u64 p = th.E.p();
    // prefer norms whose torsion bases live over small extensions; fall back
    // to any powersmooth norm if no affordable translate exists
    for (bool cheap_only : {true, false}) {
        for (u64 cnt = 0; cnt < 10000; cnt++) {
            i64 b = (cnt % 2 == 0) ? (i64)(cnt / 2) : -(i64)((cnt + 1) / 2);
            i64 T = cls.minimal_T + b * (i64)ell;
            i64 nn = th.n + th.t * T + T * T;
            if (nn <= 0 || nn % (i64)p == 0) continue;
            if (!is_powersmooth((u64)nn, B)) continue;
            if (cheap_only && !torsion_affordable((u64)nn, p)) continue;
            return refactor_chain(translate(th, T));
        }
    }
    throw math_error("suitable_translate_powersmooth: budget exhausted; raise B or budget");
}

// the order Q(theta) ∩ End(E): for each prime q of the conductor, the depth
// e is the largest with some translate theta + [c] killing E[q^e]
inline QuadOrder primitive_order(const TracedEndo& th) {
    i64 disc = th.disc();
    QuadOrder O = QuadOrder::from_disc(disc);
    if (O.conductor == 1) return O;
    i64 newdisc = disc;
    for (const auto& [q, r] : factor_u64((u64)O.conductor)) {
        u64 qe = 1;
        for (unsigned e = 1; e <= r; e++) {
            qe *= q;
            auto [P, Q] = torsion_basis(th.E, qe);
            Point thP = evaluate_endo(th, P), thQ = evaluate_endo(th, Q);
            Point Pl = point_lift(P, thP.E.lvl), Ql = point_lift(Q, thQ.E.lvl);
            bool found = false;
            for (u64 c = 0; c < qe && !found; c++) {
                if ((thP + scalar_mul((i64)c, Pl)).inf && (thQ + scalar_mul((i64)c, Ql)).inf)
                    found = true;
            }
            if (!found) break;
            newdisc /= (i64)(q * q);
        }
    }
    return QuadOrder::from_disc(newdisc);
}

}  // namespace orn

#endif
