#ifndef ORIENTEER_WALK_HPP
#define ORIENTEER_WALK_HPP

// Navigation of the oriented ell-isogeny volcano: direction classification
// of the ell+1 outgoing isogenies via the eigenvalues of theta on E[ell],
// reduction to an ell-primitive endomorphism, horizontal rim walking by the
// class group action, and ascending to the rim.

#include "endo.hpp"

namespace orn {

enum class StepKind { Ascending, Horizontal, Descending };

struct KernelDirection {
    Point gen;            // generator of the order-ell subgroup
    StepKind kind = StepKind::Descending;
    i64 eigenvalue = -1;  // eigenvalue of theta on the subgroup, -1 if none
};

struct OrientedStep {
    Isogeny step;
    TracedEndo endo;  // carried endomorphism on the codomain
    Point kernel_gen;
};
using OrientedPath = std::vector<OrientedStep>;

namespace detail {

inline bool same_j(const Curve& A, const Curve& B) {
    const Level* L = level_contains(A.lvl, B.lvl) ? A.lvl : B.lvl;
    if (!level_contains(L, A.lvl) || !level_contains(L, B.lvl)) return false;
    return curve_lift(A, L).j_invariant() == curve_lift(B, L).j_invariant();
}

inline Curve lowered_curve(const Curve& E) {
    const Level* L2 = field_extend(prime_field(E.p()), 2);
    FieldElem a, b;
    if (level_contains(E.lvl, L2) && try_lower(E.a, L2, &a) && try_lower(E.b, L2, &b))
        return Curve(L2, a, b);
    return E;
}

// one (generator, theta(generator)) pair per order-ell subgroup of E[ell],
// sorted by the serialized x-coordinate of the smallest multiple
inline std::vector<std::pair<Point, Point>> ell_subgroup_images(const TracedEndo& th,
                                                               unsigned ell) {
    auto [P, Q] = torsion_basis(th.E, ell);
    Point tP = evaluate_endo(th, P), tQ = evaluate_endo(th, Q);
    const Level* L = level_contains(tP.E.lvl, tQ.E.lvl) ? tP.E.lvl : tQ.E.lvl;
    if (!level_contains(L, tP.E.lvl) || !level_contains(L, tQ.E.lvl))
        throw math_error("ell_subgroup_images: incompatible levels");
    tP = point_lift(tP, L);
    tQ = point_lift(tQ, L);
    // generators stay at the torsion-basis level so later isogeny
    // constructions work over the smallest possible field
    std::vector<std::pair<Point, Point>> subs;
    subs.push_back({Q, tQ});
    Point G = P, IG = tP;
    for (unsigned a = 0; a < ell; a++) {
        subs.push_back({G, IG});
        G = G + Q;
        IG = IG + tQ;
    }
    auto key = [ell](const Point& g) {
        std::vector<u64> best = g.x.flatten();
        Point M = g;
        for (unsigned m = 2; m < ell; m++) {
            M = M + g;
            std::vector<u64> cand = M.x.flatten();
            if (cand < best) best = cand;
        }
        return best;
    };
    std::sort(subs.begin(), subs.end(), [&](const auto& a, const auto& b) {
        return key(a.first) < key(b.first);
    });
    return subs;
}

// nu o theta o nu-hat with the trace and norm scaled by deg(nu)
inline TracedEndo waterhouse_transfer(const TracedEndo& th, const Isogeny& nu) {
    IsogenyChain ch;
    if (auto* c0 = std::get_if<IsogenyChain>(&th.rep))
        ch = *c0;
    else if (auto* iso = std::get_if<Isogeny>(&th.rep))
        ch.links = {*iso};
    else
        ch = std::get<IsogenyChain>(refactor_chain(th).rep);
    ch.links.insert(ch.links.begin(), dual(nu));
    ch.links.push_back(nu);
    ch.shift *= (i64)nu.degree;
    ch.prime_power = false;
    i64 d = (i64)nu.degree;
    return TracedEndo(lowered_curve(nu.codomain), std::move(ch), th.t * d, th.n * d * d);
}

}  // namespace detail

// labels for all ell+1 outgoing directions, from the action of theta on
// E[ell]: non-eigenspaces descend; eigenspaces are horizontal when the
// discriminant is ell-fundamental or the characteristic polynomial splits,
// and ascending when the order is non-maximal at ell (double eigenvalue 0)
inline std::vector<KernelDirection> classify_directions(const TracedEndo& th, unsigned ell) {
    if (suitable_translation_class(th.t, th.disc(), (i64)ell).residue != 0)
        throw math_error("classify_directions: endomorphism is not ell-suitable");
    std::vector<i64> roots;
    for (i64 x = 0; x < (i64)ell; x++)
        if (((x * x - th.t * x + th.n) % (i64)ell + (i64)ell) % (i64)ell == 0) roots.push_back(x);
    bool ell_fund = th.disc() == ell_fundamental_part(th.disc(), ell);
    auto subs = detail::ell_subgroup_images(th, ell);
    std::vector<KernelDirection> out;
    size_t eigen_count = 0;
    for (const auto& [G, IG] : subs) {
        KernelDirection dir;
        dir.gen = G;
        Point M(G.E);
        for (unsigned m = 0; m < ell; m++) {
            if (IG == M) { dir.eigenvalue = (i64)m; break; }
            M = M + G;
        }
        if (dir.eigenvalue >= 0) {
            eigen_count++;
            dir.kind = (roots.size() == 2 || ell_fund) ? StepKind::Horizontal : StepKind::Ascending;
        }
        out.push_back(dir);
    }
    if (eigen_count != roots.size())
        throw math_error("classify_directions: eigenspace count mismatch; not ell-primitive?");
    return out;
}

// peel factors of [ell] until the order generated is maximal at ell; returns
// the reduced endomorphism and the ell-valuation of the index gained
inline std::pair<TracedEndo, unsigned> make_primitive(const TracedEndo& th0, unsigned ell) {
    TracedEndo th = th0;
    unsigned c = 0;
    while (true) {
        if (th.disc() == ell_fundamental_part(th.disc(), ell)) return {th, c};
        auto cls = suitable_translation_class(th.t, th.disc(), (i64)ell);
        bool translated = false;
        for (u64 cnt = 0; cnt < 1000 && !translated; cnt++) {
            i64 b = (cnt % 2 == 0) ? (i64)(cnt / 2) : -(i64)((cnt + 1) / 2);
            i64 T = cls.minimal_T + b * (i64)ell;
            i64 nn = th.n + th.t * T + T * T;
            if (nn <= 0 || nn % (i64)th.E.p() == 0) continue;
            th = translate(th, T);
            translated = true;
        }
        if (!translated) throw math_error("make_primitive: no usable suitable translate");
        i64 ell2 = (i64)ell * ell;
        bool divisible = th.t % (i64)ell == 0 && th.n % ell2 == 0;
        if (divisible) {
            auto [P, Q] = torsion_basis(th.E, ell);
            divisible = evaluate_endo(th, P).inf && evaluate_endo(th, Q).inf;
        }
        if (!divisible) return {th, c};
        th = divide_endo_by_ell(th, ell);
        c++;
    }
}

namespace detail {

// oriented-curve equality: same trace and norm, and some isomorphism
// conjugates one endomorphism to the other, checked pointwise on E[6]
inline bool oriented_equal(const TracedEndo& cur, const TracedEndo& start, const Point& P,
                           const Point& Q, const Point& imP, const Point& imQ) {
    if (cur.t != start.t || cur.n != start.n) return false;
    auto iso0 = isomorphism(cur.E, start.E);
    if (!iso0) return false;
    for (const auto& u : curve_automorphism_scalars(start.E)) {
        const Level* L = level_contains(iso0->u.lvl, u.lvl) ? iso0->u.lvl : u.lvl;
        Isomorphism rho{cur.E, start.E, lift_to(iso0->u, L) * lift_to(u, L)};
        Isomorphism inv = rho.inverse_map();
        Point a = rho.apply(evaluate_endo(cur, inv.apply(P)));
        if (!(a == imP)) continue;
        Point b = rho.apply(evaluate_endo(cur, inv.apply(Q)));
        if (b == imQ) return true;
    }
    return false;
}

inline std::optional<OrientedPath> rim_walk_impl(const TracedEndo& th1, const Curve* target,
                                                 unsigned ell) {
    QuadOrder O = QuadOrder::from_disc(th1.disc());
    auto lid = prime_above(O, ell);
    if (!lid) return std::nullopt;  // ell inert: the rim is trivial
    // theta = c + omega in O; the ideal (ell, a + omega) cuts out the
    // eigenspace of theta for the eigenvalue c - a mod ell
    i64 c = (th1.t - O.omega_trace()) / 2;
    i64 lam = ((c - lid->a) % (i64)ell + (i64)ell) % (i64)ell;
    u64 bound = class_group(O).h() + 1;
    auto [P6, Q6] = torsion_basis(th1.E, 6);
    Point imP6 = evaluate_endo(th1, P6), imQ6 = evaluate_endo(th1, Q6);
    TracedEndo th = th1;
    OrientedPath H;
    for (u64 it = 0; it < bound; it++) {
        auto subs = ell_subgroup_images(th, ell);
        std::optional<Point> ker;
        for (const auto& [G, IG] : subs) {
            Point M = G;
            for (i64 m = 1; m < lam; m++) M = M + G;
            if (lam == 0 ? IG.inf : IG == M) { ker = G; break; }
        }
        if (!ker) throw math_error("walk_rim: kernel eigenspace not found");
        Isogeny nu = velu(th.E, {*ker});
        th = divide_chain_by_ell(waterhouse_transfer(th, nu), ell);
        H.push_back({nu, th, *ker});
        if (target && same_j(th.E, *target)) return H;
        if (same_j(th.E, th1.E) && oriented_equal(th, th1, P6, Q6, imP6, imQ6)) {
            if (target) return std::nullopt;  // full rim walked, target absent
            return H;
        }
    }
    throw math_error("walk_rim: class number bound exceeded");
}

}  // namespace detail

// horizontal path along the rim to a curve with j(E2), or nullopt when ell
// divides the discriminant, ell is inert, or E2 is not on the rim
inline std::optional<OrientedPath> walk_rim(const TracedEndo& th1, const Curve& E2, unsigned ell) {
    if (((th1.disc() % (i64)ell) + (i64)ell) % (i64)ell == 0) return std::nullopt;
    if (detail::same_j(th1.E, E2)) return OrientedPath{};
    return detail::rim_walk_impl(th1, &E2, ell);
}

// the entire rim cycle from th1 back to its oriented starting point
inline std::optional<OrientedPath> walk_rim_cycle(const TracedEndo& th1, unsigned ell) {
    if (((th1.disc() % (i64)ell) + (i64)ell) % (i64)ell == 0) return std::nullopt;
    return detail::rim_walk_impl(th1, nullptr, ell);
}

// ascending path to the rim: k steps, each dividing the discriminant by
// ell^2, where k is the depth below the rim
inline OrientedPath ascend_to_rim(const TracedEndo& th0, unsigned ell) {
    i64 disc = th0.disc();
    unsigned v = valuation_u64((u64)(-disc), ell);
    unsigned k = v / 2;
    if (ell == 2 && k > 0) {
        i64 red = disc;
        for (unsigned j = 0; j < 2 * k; j++) red /= 2;
        if (((red % 4) + 4) % 4 != 1) k--;
    }
    OrientedPath H;
    TracedEndo th = th0;
    for (unsigned step = 0; step < k; step++) {
        auto cls = suitable_translation_class(th.t, th.disc(), (i64)ell);
        TracedEndo ts = th;
        bool translated = false;
        for (u64 cnt = 0; cnt < 1000 && !translated; cnt++) {
            i64 b = (cnt % 2 == 0) ? (i64)(cnt / 2) : -(i64)((cnt + 1) / 2);
            i64 T = cls.minimal_T + b * (i64)ell;
            i64 nn = th.n + th.t * T + T * T;
            if (nn <= 0 || nn % (i64)th.E.p() == 0) continue;
            ts = translate(th, T);
            translated = true;
        }
        if (!translated) throw math_error("ascend_to_rim: no usable suitable translate");
        auto dirs = classify_directions(ts, ell);
        const KernelDirection* up = nullptr;
        for (const auto& d : dirs)
            if (d.kind == StepKind::Ascending) up = &d;
        if (!up) throw math_error("ascend_to_rim: no ascending direction found");
        Isogeny nu = velu(ts.E, {up->gen});
        TracedEndo tr = detail::waterhouse_transfer(ts, nu);
        i64 ell2 = (i64)ell * ell;
        if (tr.t % ell2 != 0 || tr.n % (ell2 * ell2) != 0)
            throw math_error("ascend_to_rim: transfer not divisible by ell^2");
        auto& ch = std::get<IsogenyChain>(tr.rep);
        ch.divide *= (u64)ell * ell;
        tr.t /= ell2;
        tr.n /= ell2 * ell2;
        th = tr;
        H.push_back({nu, th, up->gen});
    }
    if (th.disc() != ell_fundamental_part(th.disc(), ell))
        throw math_error("ascend_to_rim: discriminant not ell-fundamental at the rim");
    return H;
}

}  // namespace orn

#endif
