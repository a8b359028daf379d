#ifndef ORIENTEER_POLY_HPP
#define ORIENTEER_POLY_HPP

// Univariate polynomials and rational functions over a tower level.

#include <optional>

#include "field.hpp"

namespace orn {

class Poly {
public:
    const Level* lvl = nullptr;
    std::vector<FieldElem> c;  // no trailing zeros

    Poly() = default;
    explicit Poly(const Level* L) : lvl(L) {}
    Poly(const Level* L, std::vector<FieldElem> coeffs) : lvl(L), c(std::move(coeffs)) {
        for (auto& x : c)
            if (x.lvl != L) x = lift_to(x, L);
        detail::pv_trim(c);
    }

    static Poly zero(const Level* L) { return Poly(L); }
    static Poly constant(const FieldElem& a) { return Poly(a.lvl, {a}); }
    static Poly x(const Level* L) {
        return Poly(L, {FieldElem::zero(L), FieldElem::one(L)});
    }
    static Poly from_ints(const Level* L, const std::vector<i64>& v) {
        std::vector<FieldElem> cc;
        cc.reserve(v.size());
        for (i64 a : v) cc.emplace_back(L, a);
        return Poly(L, std::move(cc));
    }

    int degree() const { return (int)c.size() - 1; }
    bool is_zero() const { return c.empty(); }
    bool is_one() const { return c.size() == 1 && c[0].is_one(); }
    FieldElem lead() const {
        if (c.empty()) return FieldElem::zero(lvl);
        return c.back();
    }
    FieldElem coeff(size_t i) const {
        return i < c.size() ? c[i] : FieldElem::zero(lvl);
    }
    bool is_monic() const { return !c.empty() && c.back().is_one(); }

    FieldElem eval(const FieldElem& xi) const {
        FieldElem r = FieldElem::zero(lvl);
        for (size_t i = c.size(); i-- > 0;) r = r * xi + c[i];
        return r;
    }
};

inline void coerce_polys(Poly& a, Poly& b) {
    if (a.lvl == b.lvl) return;
    const Level* L =
        detail::level_contains(a.lvl, b.lvl) ? a.lvl : b.lvl;
    if (!detail::level_contains(L, a.lvl) || !detail::level_contains(L, b.lvl))
        throw math_error("coerce_polys: unrelated levels");
    auto liftp = [&](Poly& f) {
        if (f.lvl == L) return;
        for (auto& x : f.c) x = lift_to(x, L);
        f.lvl = L;
    };
    liftp(a);
    liftp(b);
}

inline Poly operator+(Poly a, Poly b) {
    coerce_polys(a, b);
    if (a.c.size() < b.c.size()) a.c.resize(b.c.size(), FieldElem::zero(a.lvl));
    for (size_t i = 0; i < b.c.size(); i++) a.c[i] = a.c[i] + b.c[i];
    detail::pv_trim(a.c);
    return a;
}
inline Poly operator-(Poly a, Poly b) {
    coerce_polys(a, b);
    if (a.c.size() < b.c.size()) a.c.resize(b.c.size(), FieldElem::zero(a.lvl));
    for (size_t i = 0; i < b.c.size(); i++) a.c[i] = a.c[i] - b.c[i];
    detail::pv_trim(a.c);
    return a;
}
inline Poly operator-(Poly a) {
    for (auto& x : a.c) x = -x;
    return a;
}
inline Poly operator*(Poly a, Poly b) {
    coerce_polys(a, b);
    return Poly(a.lvl, detail::pv_mul(a.c, b.c, a.lvl));
}
inline Poly operator*(Poly a, const FieldElem& s) {
    Poly sb = Poly::constant(s);
    return a * sb;
}
inline bool operator==(Poly a, Poly b) {
    if (a.lvl != b.lvl) {
        try {
            coerce_polys(a, b);
        } catch (const math_error&) {
            return false;
        }
    }
    if (a.c.size() != b.c.size()) return false;
    for (size_t i = 0; i < a.c.size(); i++)
        if (!(a.c[i] == b.c[i])) return false;
    return true;
}
inline bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

inline void poly_divmod(Poly a, Poly b, Poly* q, Poly* r) {
    coerce_polys(a, b);
    detail::PolV qq, rr;
    detail::pv_divmod(a.c, b.c, a.lvl, &qq, &rr);
    if (q) *q = Poly(a.lvl, std::move(qq));
    if (r) *r = Poly(a.lvl, std::move(rr));
}
inline Poly operator/(const Poly& a, const Poly& b) {
    Poly q;
    poly_divmod(a, b, &q, nullptr);
    return q;
}
inline Poly operator%(const Poly& a, const Poly& b) {
    Poly r;
    poly_divmod(a, b, nullptr, &r);
    return r;
}
// exact division; throws when the remainder is nonzero
inline Poly poly_exact_div(const Poly& a, const Poly& b) {
    Poly q, r;
    poly_divmod(a, b, &q, &r);
    if (!r.is_zero()) throw math_error("poly_exact_div: not divisible");
    return q;
}

inline Poly poly_gcd(Poly a, Poly b) {
    coerce_polys(a, b);
    return Poly(a.lvl, detail::pv_gcd_monic(a.c, b.c, a.lvl));
}

inline Poly poly_monic(const Poly& a) {
    if (a.is_zero() || a.is_monic()) return a;
    FieldElem li = inverse(a.lead());
    Poly r = a;
    for (auto& x : r.c) x = x * li;
    return r;
}

inline Poly poly_derivative(const Poly& a) {
    if (a.c.size() <= 1) return Poly::zero(a.lvl);
    std::vector<FieldElem> d(a.c.size() - 1, FieldElem::zero(a.lvl));
    for (size_t i = 1; i < a.c.size(); i++) d[i - 1] = a.c[i] * FieldElem(a.lvl, (u64)i);
    return Poly(a.lvl, std::move(d));
}

inline Poly poly_pow(const Poly& a, u64 e) {
    Poly r = Poly::constant(FieldElem::one(a.lvl));
    Poly base = a;
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

inline Poly poly_compose(const Poly& g, const Poly& h) {
    Poly r = Poly::zero(g.lvl);
    for (size_t i = g.c.size(); i-- > 0;) {
        r = r * h + Poly::constant(g.c[i]);
    }
    return r;
}

// lift/lower all coefficients
inline Poly poly_lift(const Poly& f, const Level* L) {
    std::vector<FieldElem> cc = f.c;
    for (auto& x : cc) x = lift_to(x, L);
    return Poly(L, std::move(cc));
}
inline bool poly_try_lower(const Poly& f, const Level* L, Poly* out) {
    std::vector<FieldElem> cc;
    cc.reserve(f.c.size());
    for (const auto& x : f.c) {
        FieldElem y;
        if (!try_lower(x, L, &y)) return false;
        cc.push_back(y);
    }
    *out = Poly(L, std::move(cc));
    return true;
}

// All distinct roots of f in its coefficient field, sorted lexicographically.
inline std::vector<FieldElem> poly_roots(const Poly& f0) {
    const Level* L = f0.lvl;
    Poly f = poly_monic(f0);
    if (f.degree() <= 0) return {};
    Poly d = poly_derivative(f);
    if (!d.is_zero()) {
        Poly g = poly_gcd(f, d);
        if (g.degree() > 0) f = poly_monic(f / g);
    }
    // keep only the part that splits over F_q: gcd(x^q - x, f)
    detail::PolV xq = detail::pv_powmod_x(f.c, L->q, L);
    Poly xq_minus_x = Poly(L, xq) - Poly::x(L);
    Poly lin = poly_gcd(xq_minus_x, f);
    if (lin.degree() <= 0) return {};

    BigUint half = L->q;
    half.sub_small(1);
    half.shr1();

    std::vector<FieldElem> roots;
    std::vector<Poly> stack{lin};
    while (!stack.empty()) {
        Poly g = stack.back();
        stack.pop_back();
        if (g.degree() == 1) {
            roots.push_back(-g.c[0]);  // monic x + c0
            continue;
        }
        // splitter slope: the top generator of L, so that slope*root leaves any
        // subfield (subfield elements are all squares in even-index extensions,
        // which would make the plain x + shift family useless there)
        FieldElem slope = FieldElem::one(L);
        if (L->deg_over_prime > 1) {
            std::vector<u64> flat(L->deg_over_prime, 0);
            flat[L->deg_over_prime / L->deg] = 1;
            slope = elem_from_flat(L, flat);
        }
        bool split = false;
        for (u64 n = 0; !split; n++) {
            if (n > 1000000) throw math_error("poly_roots: splitting stalled");
            // deterministic generic shift: every tower coordinate must vary from
            // the first attempt on, or roots lying in a common subfield are
            // never separated (their character values agree on subfield shifts)
            std::vector<u64> flat(L->deg_over_prime);
            for (size_t i = 0; i < flat.size(); i++) {
                u64 v = (n + 1) * 0x9E3779B97F4A7C15ull + (i + 1) * 0xBF58476D1CE4E5B9ull;
                v ^= v >> 30;
                v *= 0x94D049BB133111EBull;
                v ^= v >> 31;
                flat[i] = v % L->p;
            }
            FieldElem shift = elem_from_flat(L, flat);
            // h = (slope*x + shift)^((q-1)/2) - 1 mod g
            detail::PolV base{shift, slope};
            base = detail::pv_mod(base, g.c, L);
            detail::PolV r{FieldElem::one(L)};
            size_t nb = half.bits();
            for (size_t i = nb; i-- > 0;) {
                r = detail::pv_mod(detail::pv_mul(r, r, L), g.c, L);
                if (half.bit(i)) r = detail::pv_mod(detail::pv_mul(r, base, L), g.c, L);
            }
            Poly h = Poly(L, r) - Poly::constant(FieldElem::one(L));
            Poly w = poly_gcd(h, g);
            if (w.degree() > 0 && w.degree() < g.degree()) {
                stack.push_back(w);
                stack.push_back(poly_monic(g / w));
                split = true;
            }
        }
    }
    std::sort(roots.begin(), roots.end(),
              [](const FieldElem& a, const FieldElem& b) { return lex_less(a, b); });
    return roots;
}

// Monic n-th root: R with R^n = P, if it exists.
inline std::optional<Poly> poly_nth_root(const Poly& P, u64 n) {
    if (!P.is_monic()) return std::nullopt;
    if (n == 0) return std::nullopt;
    if (n == 1) return P;
    const Level* L = P.lvl;
    int m = P.degree();
    if (m % (int)n != 0) return std::nullopt;
    int d = m / (int)n;
    if (L->p != 0 && n % L->p == 0) return std::nullopt;  // inseparable root direction unsupported
    // reversed series u with u(0) = 1; solve v^n = u mod t^(d+1)
    std::vector<FieldElem> u(d + 1, FieldElem::zero(L));
    for (int i = 0; i <= d; i++) u[i] = P.coeff(m - i);
    std::vector<FieldElem> vv{FieldElem::one(L)};
    FieldElem n_inv = inverse(FieldElem(L, (u64)n));
    for (int j = 1; j <= d; j++) {
        // [t^j] of (current v)^n, with v_j treated as 0
        Poly vpow = poly_pow(Poly(L, vv), n);
        FieldElem have = vpow.coeff(j);
        FieldElem vj = (u[j] - have) * n_inv;
        vv.push_back(vj);
    }
    // un-reverse
    std::vector<FieldElem> rc(d + 1, FieldElem::zero(L));
    for (int i = 0; i <= d; i++) rc[d - i] = vv[i];
    Poly R(L, std::move(rc));
    if (poly_pow(R, n) != P) return std::nullopt;
    return R;
}

// ---- rational functions

class RatFunc {
public:
    Poly num, den;

    RatFunc() = default;
    explicit RatFunc(const Poly& n)
        : num(n), den(Poly::constant(FieldElem::one(n.lvl))) {}
    RatFunc(Poly n, Poly d) { reduce_from(std::move(n), std::move(d)); }

    static RatFunc zero(const Level* L) { return RatFunc(Poly::zero(L)); }
    static RatFunc x(const Level* L) { return RatFunc(Poly::x(L)); }
    static RatFunc constant(const FieldElem& a) { return RatFunc(Poly::constant(a)); }

    const Level* lvl() const { return num.lvl; }
    bool is_zero() const { return num.is_zero(); }
    int map_degree() const { return std::max(num.degree(), den.degree()); }

    std::optional<FieldElem> eval(const FieldElem& xi) const {
        FieldElem d = den.eval(xi);
        if (d.is_zero()) return std::nullopt;
        return num.eval(xi) * inverse(d);
    }

private:
    void reduce_from(Poly n, Poly d) {
        if (d.is_zero()) throw math_error("RatFunc: zero denominator");
        coerce_polys(n, d);
        if (n.is_zero()) {
            num = Poly::zero(n.lvl);
            den = Poly::constant(FieldElem::one(n.lvl));
            return;
        }
        Poly g = poly_gcd(n, d);
        if (g.degree() > 0) {
            n = n / g;
            d = d / g;
        }
        FieldElem li = inverse(d.lead());
        for (auto& x : n.c) x = x * li;
        for (auto& x : d.c) x = x * li;
        num = std::move(n);
        den = std::move(d);
    }
};

inline RatFunc ratfunc_reduce(const Poly& n, const Poly& d) { return RatFunc(n, d); }

inline RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num * b.den + b.num * a.den, a.den * b.den);
}
inline RatFunc operator-(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num * b.den - b.num * a.den, a.den * b.den);
}
inline RatFunc operator-(const RatFunc& a) { return RatFunc(-a.num, a.den); }
inline RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num * b.num, a.den * b.den);
}
inline RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero()) throw math_error("RatFunc division by zero");
    return RatFunc(a.num * b.den, a.den * b.num);
}
inline bool operator==(const RatFunc& a, const RatFunc& b) {
    return a.num * b.den == b.num * a.den;
}
inline bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

inline RatFunc ratfunc_derivative(const RatFunc& f) {
    return RatFunc(poly_derivative(f.num) * f.den - f.num * poly_derivative(f.den),
                   f.den * f.den);
}

// outer(inner) for rational inner map, by homogenizing the outer map
inline RatFunc ratfunc_compose(const RatFunc& outer, const RatFunc& inner) {
    const Level* L = outer.lvl();
    const Poly &U = inner.num, &V = inner.den;
    int m = std::max(outer.num.degree(), outer.den.degree());
    if (m < 0) return RatFunc::zero(L);
    std::vector<Poly> upow(m + 1), vpow(m + 1);
    upow[0] = Poly::constant(FieldElem::one(U.lvl));
    vpow[0] = upow[0];
    for (int i = 1; i <= m; i++) {
        upow[i] = upow[i - 1] * U;
        vpow[i] = vpow[i - 1] * V;
    }
    Poly nn = Poly::zero(U.lvl), dd = Poly::zero(U.lvl);
    for (int i = 0; i <= m; i++) {
        if (i <= outer.num.degree() && !outer.num.coeff(i).is_zero())
            nn = nn + upow[i] * vpow[m - i] * outer.num.coeff(i);
        if (i <= outer.den.degree() && !outer.den.coeff(i).is_zero())
            dd = dd + upow[i] * vpow[m - i] * outer.den.coeff(i);
    }
    return RatFunc(nn, dd);
}

}  // namespace orn

#endif
