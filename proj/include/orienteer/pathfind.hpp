#ifndef ORIENTEER_PATHFIND_HPP
#define ORIENTEER_PATHFIND_HPP

// Orienting the initial curve j = 1728 by solving x^2 + p y^2 + p z^2 = -D l^2r
// (streamed over increasing r), and the end-to-end path finder: ascend the
// input volcano, record its rim, and ascend freshly oriented copies of E_1728
// until the two walks collide on a rim j-invariant or its Frobenius conjugate.

#include "walk.hpp"

namespace orn {

struct OrientationSolution {
    QuatElem quat;
    unsigned r = 0;  // depth below the rim: Z[quat] has index ell^r in the target order
    i64 disc = 0;    // Delta * ell^(2r)
};

namespace detail {

// q / ell, if that still lies in the maximal order
inline std::optional<QuatElem> quat_try_divide(const QuatElem& q, unsigned ell) {
    i64 d = (i64)ell;
    if (q.w % d == 0 && q.x % d == 0 && q.y % d == 0 && q.z % d == 0) {
        QuatElem out(q.p, q.w / d, q.x / d, q.y / d, q.z / d, q.den);
        if (in_maximal_order(out)) return out;
        return std::nullopt;
    }
    if (q.den == 1 && d == 2) {
        QuatElem out(q.p, q.w, q.x, q.y, q.z, 2);
        if (in_maximal_order(out)) return out;
        return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace detail

inline unsigned default_r_cap(u64 p, unsigned ell) {
    unsigned e = 0;
    u64 v = 1;
    while (v < p) { v *= ell; e++; }
    return 2 * e + 4;
}

// lazily yields orientations of y^2 = x^3 - x in nondecreasing r; next()
// returns nullopt once every lane up to the r-cap is exhausted
class OrientationStream {
public:
    OrientationStream(u64 p, i64 delta, unsigned ell, unsigned r_cap = 0)
        : p_(p), delta_(delta), ell_(ell), r_cap_(r_cap ? r_cap : default_r_cap(p, ell)) {
        if (p % 4 != 3) throw math_error("orient_1728: need p = 3 mod 4");
        if (delta >= 0) throw math_error("orient_1728: discriminant must be negative");
        if ((-delta) % (i64)p == 0) throw math_error("orient_1728: discriminant divisible by p");
        if (delta != ell_fundamental_part(delta, ell))
            throw math_error("orient_1728: discriminant not ell-fundamental");
        begin_lane(0);
    }

    unsigned r_cap() const { return r_cap_; }

    std::optional<OrientationSolution> next() {
        while (true) {
            if (r_ > r_cap_) return std::nullopt;
            i64 x = 0;
            if (xa_ && (!xb_ || xa_ <= xb_)) {
                x = xa_;
                xa_ += (i64)p_;
            } else if (xb_) {
                x = xb_;
                xb_ += (i64)p_;
            }
            if (x == 0 || (i128)x * x >= (i128)mabs_) {
                begin_lane(r_ + 1);
                continue;
            }
            i64 D = (mabs_ - x * x) / (i64)p_;
            if (D % 4 != 1) continue;
            if (D > 1 && !is_prime_u64((u64)D)) continue;
            auto yz = cornacchia(1, (u64)D);
            if (!yz) continue;
            auto [y0, z0] = *yz;
            i64 y = (i64)y0, z = (i64)z0;
            if (y % 2 != 0) std::swap(y, z);
            QuatElem q = (x % 2 == 0) ? QuatElem(p_, 1, x, z, y, 2) : QuatElem(p_, 0, x, y, z, 2);
            if (!in_maximal_order(q)) throw math_error("orient_1728: solution escapes the order");
            // divide down to ell-primitivity, translating to the suitable class first
            unsigned c = 0;
            while (c < r_) {
                i64 t = q.trace();
                i64 disc = t * t - 4 * q.norm();
                auto cls = suitable_translation_class(t, disc, (i64)ell_);
                // divisibility is constant on the suitable class, so testing
                // the minimal translate is enough; keep it only on success
                QuatElem qt = q + QuatElem(p_, cls.minimal_T, 0, 0, 0);
                auto half = detail::quat_try_divide(qt, ell_);
                if (!half) break;
                q = *half;
                c++;
            }
            i64 t = q.trace();
            i64 disc = t * t - 4 * q.norm();
            return OrientationSolution{q, r_ - c, disc};
        }
    }

private:
    void begin_lane(unsigned r) {
        r_ = r;
        xa_ = xb_ = 0;
        if (r_ > r_cap_) return;
        i64 m = -delta_;
        for (unsigned i = 0; i < 2 * r_; i++) {
            if (m > (i64)1 << 56) throw math_error("orient_1728: norm target overflow");
            m *= (i64)ell_;
        }
        mabs_ = m;
        auto root = sqrt_mod_u64((u64)(m % (i64)p_), p_);
        if (!root) return;
        i64 x0 = (i64)*root;
        if (x0 == 0) return;
        xa_ = std::min(x0, (i64)p_ - x0);
        xb_ = std::max(x0, (i64)p_ - x0);
        if (xa_ == xb_) xb_ = 0;
    }

    u64 p_;
    i64 delta_;
    unsigned ell_, r_cap_;
    unsigned r_ = 0;
    i64 mabs_ = 0;
    i64 xa_ = 0, xb_ = 0;  // next x candidate in each residue progression
};

struct PathEdge {
    Curve domain, codomain;
    Point kernel_gen;  // generates the kernel of the ell-isogeny domain -> codomain
};

struct PathResult {
    std::vector<PathEdge> edges;  // a walk from j = 1728 to the input curve's j
    OrientationSolution orientation;
    bool conjugated = false;  // the collision used the Frobenius-conjugate rim
    unsigned ascent_from_1728 = 0, rim_steps = 0, descent_to_input = 0;
};

struct PathOptions {
    unsigned r_cap = 0;          // 0: default_r_cap(p, ell)
    u64 powersmooth_bound = 200; // bound for chain conversion of orientations
};

namespace detail {

inline FieldElem j_low(const Curve& E) {
    const Level* L2 = field_extend(prime_field(E.p()), 2);
    FieldElem j = E.j_invariant();
    if (j.lvl == L2) return j;
    if (level_contains(j.lvl, L2)) {
        FieldElem low;
        if (!try_lower(j, L2, &low)) throw math_error("j_low: j-invariant outside F_p^2");
        return low;
    }
    return lift_to(j, L2);
}

inline PathEdge forward_edge(const OrientedStep& s, bool conj) {
    Curve dom = s.step.domain, cod = lowered_curve(s.step.codomain);
    Point ker = s.kernel_gen;
    if (auto low = point_try_lower(ker, dom.lvl)) ker = *low;
    if (conj) {
        dom = frobenius_transport(dom);
        cod = frobenius_transport(cod);
        ker = frobenius_transport_point(ker);
    }
    return PathEdge{dom, cod, ker};
}

// the dual direction of an oriented step: kernel is the image of any
// ell-torsion point outside the forward kernel
inline PathEdge backward_edge(const OrientedStep& s, unsigned ell) {
    auto [P, Q] = torsion_basis(s.step.domain, ell);
    Point img = evaluate(s.step, P);
    if (img.inf) img = evaluate(s.step, Q);
    if (img.inf) throw math_error("backward_edge: no complementary torsion image");
    Curve dom = lowered_curve(s.step.codomain);
    if (auto low = point_try_lower(img, dom.lvl)) img = *low;
    return PathEdge{dom, s.step.domain, img};
}

}  // namespace detail

inline PathResult path_to_1728(const TracedEndo& th0, unsigned ell, PathOptions opt = {}) {
    u64 p = th0.E.p();
    auto [prim, c0] = make_primitive(th0, ell);
    (void)c0;
    i64 delta = ell_fundamental_part(prim.disc(), ell);
    OrientedPath H2 = ascend_to_rim(prim, ell);
    TracedEndo th1 = H2.empty() ? prim : H2.back().endo;
    auto rim = walk_rim_cycle(th1, ell);
    if (!rim) throw math_error("path_to_1728: input volcano has no walkable rim");
    std::vector<FieldElem> rim_js;
    for (const auto& s : *rim) rim_js.push_back(detail::j_low(s.endo.E));

    OrientationStream stream(p, delta, ell, opt.r_cap);
    while (auto sol = stream.next()) {
        OrientedPath H1;
        Curve E0 = Curve(field_extend(prime_field(p), 2), -1, 0);
        try {
            TracedEndo chain =
                suitable_translate_powersmooth(realize_endo_1728(sol->quat), ell,
                                               opt.powersmooth_bound);
            H1 = ascend_to_rim(chain, ell);
            if (!H1.empty()) E0 = H1.back().endo.E;
        } catch (const math_error&) {
            continue;  // conversion or ascent out of budget for this solution
        }
        FieldElem j0 = detail::j_low(E0);
        FieldElem j0c = coeff_frobenius(j0);
        for (size_t m = 0; m < rim_js.size(); m++) {
            bool direct = rim_js[m] == j0;
            bool conj = !direct && rim_js[m] == j0c;
            if (!direct && !conj) continue;
            PathResult res;
            res.orientation = *sol;
            res.conjugated = conj;
            for (const auto& s : H1) res.edges.push_back(detail::forward_edge(s, conj));
            res.ascent_from_1728 = (unsigned)H1.size();
            for (size_t i = m + 1; i < rim->size(); i++)
                res.edges.push_back(detail::forward_edge((*rim)[i], false));
            res.rim_steps = (unsigned)(rim->size() - m - 1);
            for (auto it = H2.rbegin(); it != H2.rend(); ++it)
                res.edges.push_back(detail::backward_edge(*it, ell));
            res.descent_to_input = (unsigned)H2.size();
            return res;
        }
    }
    throw math_error("path_to_1728: no collision found within budget");
}

}  // namespace orn

#endif
