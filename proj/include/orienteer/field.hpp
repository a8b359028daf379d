#ifndef ORIENTEER_FIELD_HPP
#define ORIENTEER_FIELD_HPP

// Finite field towers F_p < F_{p^2} < ... built one extension at a time.
// Levels are interned process-wide, so a plain pointer identifies a field
// and elements can hold it without ownership headaches.  Construction is
// deterministic: the same (p, degree sequence) always produces the same
// moduli, which keeps serialized data stable across runs.

#include <algorithm>
#include <cassert>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "intutil.hpp"

namespace orn {

class FieldElem;

struct Level {
    u64 p = 0;
    const Level* below = nullptr;   // nullptr: this is the prime field
    unsigned deg = 1;               // degree over `below`
    unsigned deg_over_prime = 1;
    std::vector<FieldElem> modulus; // monic, length deg+1, coefficients one level down
    BigUint q;                      // p^deg_over_prime

    bool is_prime_field() const { return below == nullptr; }
};

class FieldElem {
public:
    const Level* lvl = nullptr;
    u64 v = 0;                      // payload when lvl is the prime field
    std::vector<FieldElem> c;       // payload otherwise, size lvl->deg

    FieldElem() = default;

    FieldElem(const Level* L, u64 integer) : lvl(L) {
        if (L->is_prime_field()) {
            v = integer % L->p;
        } else {
            c.assign(L->deg, FieldElem(L->below, (u64)0));
            c[0] = FieldElem(L->below, integer);
        }
    }

    FieldElem(const Level* L, i64 integer)
        : FieldElem(L, (u64)(((integer % (i64)L->p) + (i64)L->p) % (i64)L->p)) {}

    static FieldElem zero(const Level* L) { return FieldElem(L, (u64)0); }
    static FieldElem one(const Level* L) { return FieldElem(L, (u64)1); }

    bool is_zero() const {
        if (lvl->is_prime_field()) return v == 0;
        for (const auto& x : c)
            if (!x.is_zero()) return false;
        return true;
    }
    bool is_one() const;

    void flatten_into(std::vector<u64>& out) const {
        if (lvl->is_prime_field()) {
            out.push_back(v);
        } else {
            for (const auto& x : c) x.flatten_into(out);
        }
    }
    std::vector<u64> flatten() const {
        std::vector<u64> out;
        out.reserve(lvl->deg_over_prime);
        flatten_into(out);
        return out;
    }
};

namespace detail {

inline bool level_contains(const Level* big, const Level* small) {
    for (const Level* L = big; L; L = L->below)
        if (L == small) return true;
    return false;
}

}  // namespace detail

inline FieldElem lift_to(const FieldElem& e, const Level* L) {
    if (e.lvl == L) return e;
    if (!detail::level_contains(L, e.lvl)) throw math_error("lift_to: levels unrelated");
    FieldElem r = FieldElem::zero(L);
    r.c[0] = lift_to(e, L->below);
    return r;
}

// Project to a sub-level; returns false if the element does not lie there.
inline bool try_lower(const FieldElem& e, const Level* L, FieldElem* out) {
    if (e.lvl == L) {
        *out = e;
        return true;
    }
    if (!detail::level_contains(e.lvl, L)) return false;
    for (size_t i = 1; i < e.c.size(); i++)
        if (!e.c[i].is_zero()) return false;
    return try_lower(e.c[0], L, out);
}

namespace detail {

// Pick the deeper of two related levels, lifting as needed.
inline void coerce(FieldElem& a, FieldElem& b) {
    if (a.lvl == b.lvl) return;
    if (level_contains(a.lvl, b.lvl))
        b = lift_to(b, a.lvl);
    else
        a = lift_to(a, b.lvl);
}

}  // namespace detail

FieldElem operator*(const FieldElem& a, const FieldElem& b);

inline FieldElem operator+(FieldElem a, FieldElem b) {
    detail::coerce(a, b);
    if (a.lvl->is_prime_field()) {
        a.v = addm(a.v, b.v, a.lvl->p);
        return a;
    }
    for (size_t i = 0; i < a.c.size(); i++) a.c[i] = a.c[i] + b.c[i];
    return a;
}

inline FieldElem operator-(FieldElem a, FieldElem b) {
    detail::coerce(a, b);
    if (a.lvl->is_prime_field()) {
        a.v = subm(a.v, b.v, a.lvl->p);
        return a;
    }
    for (size_t i = 0; i < a.c.size(); i++) a.c[i] = a.c[i] - b.c[i];
    return a;
}

inline FieldElem operator-(FieldElem a) {
    if (a.lvl->is_prime_field()) {
        a.v = a.v ? a.lvl->p - a.v : 0;
        return a;
    }
    for (auto& x : a.c) x = -x;
    return a;
}

inline bool operator==(FieldElem a, FieldElem b) {
    if (a.lvl != b.lvl) {
        if (!detail::level_contains(a.lvl, b.lvl) && !detail::level_contains(b.lvl, a.lvl))
            return false;
        detail::coerce(a, b);
    }
    if (a.lvl->is_prime_field()) return a.v == b.v;
    for (size_t i = 0; i < a.c.size(); i++)
        if (!(a.c[i] == b.c[i])) return false;
    return true;
}
inline bool operator!=(const FieldElem& a, const FieldElem& b) { return !(a == b); }

inline bool FieldElem::is_one() const { return *this == FieldElem::one(lvl); }

inline FieldElem operator*(const FieldElem& a0, const FieldElem& b0) {
    FieldElem a = a0, b = b0;
    detail::coerce(a, b);
    const Level* L = a.lvl;
    if (L->is_prime_field()) {
        a.v = mulm(a.v, b.v, L->p);
        return a;
    }
    const unsigned d = L->deg;
    std::vector<FieldElem> r(2 * d - 1, FieldElem::zero(L->below));
    for (unsigned i = 0; i < d; i++) {
        if (a.c[i].is_zero()) continue;
        for (unsigned j = 0; j < d; j++) {
            if (b.c[j].is_zero()) continue;
            r[i + j] = r[i + j] + a.c[i] * b.c[j];
        }
    }
    // reduce by the monic modulus
    for (unsigned i = 2 * d - 2; i >= d; i--) {
        if (!r[i].is_zero()) {
            for (unsigned j = 0; j < d; j++)
                r[i - d + j] = r[i - d + j] - r[i] * L->modulus[j];
        }
        if (i == d) break;
    }
    r.resize(d);
    FieldElem out;
    out.lvl = L;
    out.c = std::move(r);
    return out;
}

inline FieldElem pow_big(FieldElem a, const BigUint& e) {
    FieldElem r = FieldElem::one(a.lvl);
    if (e.is_zero()) return r;
    size_t nb = e.bits();
    for (size_t i = nb; i-- > 0;) {
        r = r * r;
        if (e.bit(i)) r = r * a;
    }
    return r;
}

inline FieldElem pow_u128(const FieldElem& a, u128 e) { return pow_big(a, BigUint(e)); }

FieldElem inverse(const FieldElem& a);

inline FieldElem operator/(const FieldElem& a, const FieldElem& b) { return a * inverse(b); }

inline FieldElem frobenius(const FieldElem& a) { return pow_u128(a, a.lvl->p); }

inline bool lex_less(const FieldElem& a, const FieldElem& b) {
    std::vector<u64> fa = a.flatten(), fb = b.flatten();
    return fa < fb;
}

// n-th element of the level in the lexicographic [c0,c1,...] order used for
// deterministic searches (the last flat coordinate varies fastest).
inline FieldElem elem_from_flat(const Level* L, const std::vector<u64>& flat, size_t* pos) {
    if (L->is_prime_field()) {
        FieldElem e(L, flat.at(*pos) % L->p);
        (*pos)++;
        return e;
    }
    FieldElem e = FieldElem::zero(L);
    for (unsigned i = 0; i < L->deg; i++) e.c[i] = elem_from_flat(L->below, flat, pos);
    return e;
}

inline FieldElem elem_from_flat(const Level* L, const std::vector<u64>& flat) {
    if (flat.size() != L->deg_over_prime) throw math_error("elem_from_flat: wrong length");
    size_t pos = 0;
    return elem_from_flat(L, flat, &pos);
}

inline FieldElem elem_from_index(const Level* L, u64 n) {
    unsigned D = L->deg_over_prime;
    std::vector<u64> flat(D, 0);
    for (unsigned i = 0; i < D && n; i++) {
        flat[D - 1 - i] = n % L->p;
        n /= L->p;
    }
    return elem_from_flat(L, flat);
}

// ---- low-level polynomial helpers over FieldElem vectors (used both for
// ---- modulus selection here and by the Poly wrapper in poly.hpp)

namespace detail {

using PolV = std::vector<FieldElem>;

inline void pv_trim(PolV& f) {
    while (!f.empty() && f.back().is_zero()) f.pop_back();
}

inline PolV pv_mul(const PolV& a, const PolV& b, const Level* L) {
    if (a.empty() || b.empty()) return {};
    PolV r(a.size() + b.size() - 1, FieldElem::zero(L));
    if (std::min(a.size(), b.size()) > 64) {
        // Karatsuba
        size_t n = std::max(a.size(), b.size());
        size_t h = (n + 1) / 2;
        auto slice = [&](const PolV& f, size_t from, size_t to) {
            PolV s;
            for (size_t i = from; i < to && i < f.size(); i++) s.push_back(f[i]);
            pv_trim(s);
            return s;
        };
        PolV a0 = slice(a, 0, h), a1 = slice(a, h, a.size());
        PolV b0 = slice(b, 0, h), b1 = slice(b, h, b.size());
        PolV z0 = pv_mul(a0, b0, L);
        PolV z2 = pv_mul(a1, b1, L);
        PolV as = a0, bs = b0;
        if (as.size() < a1.size()) as.resize(a1.size(), FieldElem::zero(L));
        for (size_t i = 0; i < a1.size(); i++) as[i] = as[i] + a1[i];
        if (bs.size() < b1.size()) bs.resize(b1.size(), FieldElem::zero(L));
        for (size_t i = 0; i < b1.size(); i++) bs[i] = bs[i] + b1[i];
        pv_trim(as);
        pv_trim(bs);
        PolV z1 = pv_mul(as, bs, L);
        // z1 -= z0 + z2
        if (z1.size() < std::max(z0.size(), z2.size()))
            z1.resize(std::max(z0.size(), z2.size()), FieldElem::zero(L));
        for (size_t i = 0; i < z0.size(); i++) z1[i] = z1[i] - z0[i];
        for (size_t i = 0; i < z2.size(); i++) z1[i] = z1[i] - z2[i];
        pv_trim(z1);  // top terms can cancel exactly; stale size overruns r
        for (size_t i = 0; i < z0.size(); i++) r[i] = r[i] + z0[i];
        for (size_t i = 0; i < z1.size(); i++) r[i + h] = r[i + h] + z1[i];
        for (size_t i = 0; i < z2.size(); i++) r[i + 2 * h] = r[i + 2 * h] + z2[i];
        pv_trim(r);
        return r;
    }
    for (size_t i = 0; i < a.size(); i++) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size(); j++) {
            if (b[j].is_zero()) continue;
            r[i + j] = r[i + j] + a[i] * b[j];
        }
    }
    pv_trim(r);
    return r;
}

inline void pv_divmod(const PolV& a, const PolV& b, const Level* L, PolV* quot, PolV* rem) {
    if (b.empty()) throw math_error("pv_divmod: division by zero polynomial");
    PolV r = a;
    pv_trim(r);
    PolV q;
    if (r.size() >= b.size()) q.assign(r.size() - b.size() + 1, FieldElem::zero(L));
    FieldElem li = inverse(b.back());
    while (r.size() >= b.size()) {
        FieldElem f = r.back() * li;
        size_t shift = r.size() - b.size();
        q[shift] = q[shift] + f;
        for (size_t i = 0; i < b.size(); i++) r[shift + i] = r[shift + i] - f * b[i];
        pv_trim(r);
    }
    if (quot) *quot = std::move(q);
    if (rem) *rem = std::move(r);
}

inline PolV pv_mod(const PolV& a, const PolV& b, const Level* L) {
    PolV r;
    pv_divmod(a, b, L, nullptr, &r);
    return r;
}

inline PolV pv_gcd_monic(PolV a, PolV b, const Level* L) {
    pv_trim(a);
    pv_trim(b);
    while (!b.empty()) {
        PolV r = pv_mod(a, b, L);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        FieldElem li = inverse(a.back());
        for (auto& x : a) x = x * li;
    }
    return a;
}

inline PolV pv_powmod_x(const PolV& f, const BigUint& e, const Level* L) {
    // x^e mod f
    PolV base{FieldElem::zero(L), FieldElem::one(L)};
    base = pv_mod(base, f, L);
    PolV r{FieldElem::one(L)};
    size_t nb = e.bits();
    for (size_t i = nb; i-- > 0;) {
        r = pv_mod(pv_mul(r, r, L), f, L);
        if (e.bit(i)) r = pv_mod(pv_mul(r, base, L), f, L);
    }
    return r;
}

inline PolV pv_compose_mod(const PolV& g, const PolV& h, const PolV& f, const Level* L) {
    // g(h) mod f by Horner
    PolV r;
    for (size_t i = g.size(); i-- > 0;) {
        r = pv_mod(pv_mul(r, h, L), f, L);
        if (r.empty()) r = PolV{};
        if (!g[i].is_zero()) {
            if (r.empty()) r.push_back(g[i]);
            else r[0] = r[0] + g[i];
        }
        pv_trim(r);
    }
    return r;
}

inline bool pv_is_irreducible(const PolV& f, const Level* L, unsigned k) {
    // f monic of degree k over level L with field size q = L->q.
    // Criterion: x^(q^k) == x mod f and gcd(x^(q^(k/r)) - x, f) = 1 for primes r | k.
    PolV s = pv_powmod_x(f, L->q, L);  // x^q mod f
    std::vector<PolV> frob_pows(k + 1);
    frob_pows[1] = s;
    for (unsigned j = 2; j <= k; j++)
        frob_pows[j] = pv_compose_mod(frob_pows[j - 1], s, f, L);
    PolV x{FieldElem::zero(L), FieldElem::one(L)};
    // x^(q^k) == x ?
    PolV top = frob_pows[k];
    if (top.size() != 2 || !top[1].is_one() || !top[0].is_zero()) return false;
    for (auto [r, e] : factor_u64(k)) {
        (void)e;
        unsigned j = k / (unsigned)r;
        PolV d = frob_pows[j];
        // d - x
        if (d.size() < 2) d.resize(2, FieldElem::zero(L));
        d[1] = d[1] - FieldElem::one(L);
        pv_trim(d);
        PolV g = pv_gcd_monic(d, f, L);
        if (g.size() != 1) return false;
    }
    return true;
}

}  // namespace detail

// Extended-Euclid inverse against the level modulus (recursing down the tower).
inline FieldElem inverse(const FieldElem& a) {
    const Level* L = a.lvl;
    if (a.is_zero()) throw math_error("inverse of zero");
    if (L->is_prime_field()) {
        FieldElem r = a;
        r.v = invm(a.v, L->p);
        return r;
    }
    const Level* B = L->below;
    detail::PolV r0 = L->modulus;  // monic, degree L->deg
    detail::PolV r1 = a.c;
    detail::pv_trim(r1);
    detail::PolV s0, s1{FieldElem::one(B)};
    while (r1.size() > 1) {
        detail::PolV q, rem;
        detail::pv_divmod(r0, r1, B, &q, &rem);
        if (rem.empty()) throw math_error("inverse: modulus not irreducible?");
        detail::PolV qs = detail::pv_mul(q, s1, B);
        detail::PolV snew = s0;
        if (snew.size() < qs.size()) snew.resize(qs.size(), FieldElem::zero(B));
        for (size_t i = 0; i < qs.size(); i++) snew[i] = snew[i] - qs[i];
        detail::pv_trim(snew);
        r0 = std::move(r1);
        r1 = std::move(rem);
        s0 = std::move(s1);
        s1 = std::move(snew);
    }
    FieldElem g_inv = inverse(r1[0]);
    FieldElem out = FieldElem::zero(L);
    for (size_t i = 0; i < s1.size(); i++) out.c[i] = s1[i] * g_inv;
    return out;
}

// ---- level registry

namespace detail {

struct Registry {
    std::mutex mu;
    std::map<u64, std::unique_ptr<Level>> primes;
    std::map<std::pair<const Level*, unsigned>, std::unique_ptr<Level>> extensions;

    static Registry& get() {
        static Registry r;
        return r;
    }
};

}  // namespace detail

inline const Level* prime_field(u64 p) {
    auto& reg = detail::Registry::get();
    std::lock_guard<std::mutex> lock(reg.mu);
    auto it = reg.primes.find(p);
    if (it != reg.primes.end()) return it->second.get();
    if (!is_prime_u64(p)) throw math_error("prime_field: p not prime");
    if (p >> 61) throw math_error("prime_field: p too large (need p < 2^61)");
    auto L = std::make_unique<Level>();
    L->p = p;
    L->below = nullptr;
    L->deg = 1;
    L->deg_over_prime = 1;
    L->q = BigUint((u128)p);
    const Level* ptr = L.get();
    reg.primes[p] = std::move(L);
    return ptr;
}

inline const Level* field_extend(const Level* base, unsigned k) {
    if (k == 0) throw math_error("field_extend: k must be >= 1");
    if (k == 1) return base;
    // composite degrees factor into prime steps, smallest primes first, so
    // different growth paths meet on the same tower of levels
    for (unsigned ps = 2; ps * ps <= k; ps++)
        if (k % ps == 0) return field_extend(field_extend(base, ps), k / ps);
    auto& reg = detail::Registry::get();
    std::lock_guard<std::mutex> lock(reg.mu);
    auto key = std::make_pair(base, k);
    auto it = reg.extensions.find(key);
    if (it != reg.extensions.end()) return it->second.get();

    auto L = std::make_unique<Level>();
    L->p = base->p;
    L->below = base;
    L->deg = k;
    L->deg_over_prime = base->deg_over_prime * k;
    L->q = BigUint::pow_small(base->p, L->deg_over_prime);

    bool found = false;
    if (base->is_prime_field() && k == 2 && base->p % 4 == 3) {
        // x^2 + 1, so that "i" is always the square root of -1
        L->modulus = {FieldElem::one(base), FieldElem::zero(base), FieldElem::one(base)};
        found = true;
    } else {
        const u64 kCandidateCap = 5000;
        for (int family = 0; family < 2 && !found; family++) {
            for (u64 n = 0; n < kCandidateCap && !found; n++) {
                FieldElem cst = elem_from_index(base, n);
                detail::PolV f(k + 1, FieldElem::zero(base));
                f[k] = FieldElem::one(base);
                f[0] = -cst;
                if (family == 1) f[1] = -FieldElem::one(base);  // x^k - x - c
                if (detail::pv_is_irreducible(f, base, k)) {
                    L->modulus = std::move(f);
                    found = true;
                }
            }
        }
    }
    if (!found) throw math_error("field_extend: no irreducible sparse modulus found");
    const Level* ptr = L.get();
    reg.extensions[key] = std::move(L);
    return ptr;
}

// Square root in F_q, q odd; deterministic (lexicographically least of the
// two roots).  Generalized Tonelli-Shanks with big exponents.
inline bool fq_sqrt(const FieldElem& a, FieldElem* out) {
    const Level* L = a.lvl;
    if (a.is_zero()) {
        *out = a;
        return true;
    }
    BigUint qm1 = L->q;
    qm1.sub_small(1);
    BigUint half = qm1;
    half.shr1();
    FieldElem ls = pow_big(a, half);
    if (!ls.is_one()) return false;  // non-residue (or ls == -1)
    FieldElem r;
    if (L->q.mod_small(4) == 3) {
        BigUint e = L->q;
        e.add_small(1);
        e.shr1();
        e.shr1();
        r = pow_big(a, e);
    } else {
        // full Tonelli-Shanks
        BigUint t = qm1;
        unsigned s = 0;
        while (!t.odd()) { t.shr1(); s++; }
        // deterministic non-residue search
        FieldElem z;
        bool got = false;
        for (u64 n = 2; n < 2 + 100000; n++) {
            z = elem_from_index(L, n);
            if (z.is_zero()) continue;
            FieldElem e = pow_big(z, half);
            if (!e.is_one()) { got = true; break; }
        }
        if (!got) throw math_error("fq_sqrt: no non-residue found");
        FieldElem cc = pow_big(z, t);
        BigUint tp1 = t;
        tp1.add_small(1);
        tp1.shr1();
        r = pow_big(a, tp1);
        FieldElem tt = pow_big(a, t);
        unsigned m = s;
        while (!tt.is_one()) {
            unsigned i = 0;
            FieldElem t2 = tt;
            while (!t2.is_one()) {
                t2 = t2 * t2;
                i++;
                if (i == m) throw math_error("fq_sqrt: internal failure");
            }
            FieldElem b = cc;
            for (unsigned j = 0; j + i + 1 < m; j++) b = b * b;
            r = r * b;
            cc = b * b;
            tt = tt * cc;
            m = i;
        }
    }
    if (!(r * r == a)) return false;
    FieldElem nr = -r;
    *out = lex_less(r, nr) ? r : nr;
    return true;
}

}  // namespace orn

#endif
