#ifndef ORIENTEER_QUAD_HPP
#define ORIENTEER_QUAD_HPP

// Imaginary quadratic orders: discriminants and their ell-fundamental parts,
// class groups by exhaustive reduced-form enumeration, the prime ideal above
// ell, and Cornacchia's algorithm.

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "intutil.hpp"

namespace orn {

inline bool is_discriminant(i64 D) {
    i64 r = ((D % 4) + 4) % 4;
    return D < 0 && (r == 0 || r == 1);
}

struct QuadOrder {
    i64 disc = 0;
    i64 fundamental_disc = 0;
    i64 conductor = 0;

    static QuadOrder from_disc(i64 D);

    // the standard generator: omega = sqrt(D)/2 for D even, (1+sqrt(D))/2 odd.
    // trace and norm of omega:
    i64 omega_trace() const { return (disc % 2 == 0) ? 0 : 1; }
    i64 omega_norm() const { return (disc % 2 == 0) ? -disc / 4 : (1 - disc) / 4; }
};

// the maximal ell-fundamental discriminant dividing D: strip even powers of
// ell as long as a discriminant remains; for ell = 2, a leftover D'' = 2,3
// mod 4 forces 4*D''
inline i64 ell_fundamental_part(i64 D, u64 ell) {
    if (!is_discriminant(D)) throw math_error("ell_fundamental_part: not a discriminant");
    unsigned v = valuation_u64((u64)(-D), ell);
    i64 out = D;
    i64 e2 = (i64)(ell * ell);
    for (unsigned j = 2; j <= v; j += 2) out /= e2;
    if (ell == 2) {
        i64 r = ((out % 4) + 4) % 4;
        if (r == 2 || r == 3) out *= 4;
    }
    if (!is_discriminant(out)) throw math_error("ell_fundamental_part: internal");
    return out;
}

inline QuadOrder QuadOrder::from_disc(i64 D) {
    if (!is_discriminant(D)) throw math_error("QuadOrder: invalid discriminant");
    // fundamental discriminant: strip square factors while a discriminant remains
    i64 d0 = D;
    i64 f = 1;
    for (i64 q = 2; q * q <= -d0; q++) {
        while (d0 % (q * q) == 0 && is_discriminant(d0 / (q * q))) {
            d0 /= q * q;
            f *= q;
        }
    }
    // for even d0 check the final factor-4 case handled above by loop at q=2
    QuadOrder O;
    O.disc = D;
    O.fundamental_disc = d0;
    O.conductor = f;
    return O;
}

// positive definite binary quadratic form a x^2 + b xy + c y^2
struct QuadForm {
    i64 a = 1, b = 0, c = 0;
    bool operator==(const QuadForm& o) const = default;
};

inline i64 form_disc(const QuadForm& f) { return f.b * f.b - 4 * f.a * f.c; }

inline QuadForm reduce_form(QuadForm f) {
    i64 D = form_disc(f);
    for (int guard = 0; guard < 10000; guard++) {
        // normalize b into (-a, a]
        if (f.b > f.a || f.b <= -f.a) {
            while (f.b > f.a) f.b -= 2 * f.a;
            while (f.b <= -f.a) f.b += 2 * f.a;
            f.c = (f.b * f.b - D) / (4 * f.a);
        }
        if (f.a > f.c) {
            f = {f.c, -f.b, f.a};
            continue;
        }
        if ((f.a == f.c || f.a == -f.b) && f.b < 0) f.b = -f.b;
        return f;
    }
    throw math_error("reduce_form: no convergence");
}

// composition via ideal multiplication in the order of discriminant D:
// the form (a,b,c) corresponds to the module [a, u + w] with w the standard
// generator and u = b/2 (D even) or (b-1)/2 (D odd)
inline QuadForm compose_forms(const QuadForm& f1, const QuadForm& f2) {
    i64 D = form_disc(f1);
    if (form_disc(f2) != D) throw math_error("compose_forms: discriminant mismatch");
    bool odd = ((D % 2) + 2) % 2 == 1;
    i64 u1 = odd ? (f1.b - 1) / 2 : f1.b / 2;
    i64 u2 = odd ? (f2.b - 1) / 2 : f2.b / 2;
    // w^2 = w*t + nu with t = trace(w) in {0,1}
    i64 t = odd ? 1 : 0;
    i64 nu = odd ? (D - 1) / 4 : D / 4;
    // generators of the product module, as (x, y) meaning x + y*w
    struct V { i64 x, y; };
    std::vector<V> gens = {
        {f1.a * f2.a, 0},
        {f1.a * u2, f1.a},
        {f2.a * u1, f2.a},
        {u1 * u2 + nu, u1 + u2 + t},
    };
    // 2-column Hermite normal form
    i64 g = 0, xs = 0;
    for (auto& v : gens) {
        // gcd combine on the w-column
        i64 a = g, b = v.y, x0 = xs, x1 = v.x;
        while (b != 0) {
            i64 q = a / b;
            i64 ra = a - q * b, rx = x0 - q * x1;
            a = b;
            x0 = x1;
            b = ra;
            x1 = rx;
        }
        g = a;
        xs = x0;
    }
    if (g < 0) { g = -g; xs = -xs; }
    if (g == 0) throw math_error("compose_forms: degenerate product");
    i64 m = 0;
    for (auto& v : gens) {
        i64 red = v.x - (v.y / g) * xs;
        // after clearing the w-part, collect the pure-integer generators
        i64 rem = v.y % g;
        if (rem != 0) throw math_error("compose_forms: HNF failure");
        m = std::gcd(m, std::abs(red));
    }
    if (m == 0) throw math_error("compose_forms: degenerate product");
    // module = g * [m/g, (xs/g) + w]; the scalar g does not change the class
    if (xs % g != 0 || m % g != 0) {
        // fall back: the content g divides all generators of an ideal product
        throw math_error("compose_forms: content mismatch");
    }
    i64 a3 = m / g;
    i64 u3 = ((xs / g) % a3 + a3) % a3;
    i64 b3 = 2 * u3 + (odd ? 1 : 0);
    i64 c3num = b3 * b3 - D;
    if (c3num % (4 * a3) != 0) throw math_error("compose_forms: invalid result");
    return reduce_form({a3, b3, c3num / (4 * a3)});
}

struct ClassGroup {
    i64 disc = 0;
    std::vector<QuadForm> forms;

    u64 h() const { return forms.size(); }
    QuadForm identity() const {
        i64 b0 = (((disc % 2) + 2) % 2 == 1) ? 1 : 0;
        return {1, b0, (b0 * b0 - disc) / 4};
    }
    u64 order_of(const QuadForm& f) const {
        QuadForm id = identity();
        QuadForm acc = reduce_form(f);
        for (u64 n = 1; n <= forms.size() + 1; n++) {
            if (acc == id) return n;
            acc = compose_forms(acc, reduce_form(f));
        }
        throw math_error("order_of: exceeded group size");
    }
};

inline ClassGroup class_group(const QuadOrder& O) {
    i64 D = O.disc;
    if (-D > 100000000) throw math_error("class_group: discriminant budget exceeded");
    ClassGroup G;
    G.disc = D;
    for (i64 a = 1; 3 * a * a <= -D; a++) {
        for (i64 b = -a + 1; b <= a; b++) {
            i64 num = b * b - D;
            if (num % (4 * a) != 0) continue;
            i64 c = num / (4 * a);
            if (c < a) continue;
            if (b < 0 && (a == -b || a == c)) continue;
            if (std::gcd(std::gcd(a, std::abs(b)), c) != 1) continue;
            G.forms.push_back({a, b, c});
        }
    }
    return G;
}

inline u64 class_number_sum(const QuadOrder& O) {
    u64 total = 0;
    i64 f = O.conductor;
    for (i64 d = 1; d <= f; d++) {
        if (f % d != 0) continue;
        total += class_group(QuadOrder::from_disc(d * d * O.fundamental_disc)).h();
    }
    return total;
}

// solve y^2 + d z^2 = m (m prime, or 1); returns (y, z)
inline std::optional<std::pair<u64, u64>> cornacchia(u64 d, u64 m) {
    if (m == 0) return std::nullopt;
    if (m == 1) return std::make_pair((u64)1, (u64)0);
    if (d >= m) {
        // only z = 0 possible unless d == m
        i64 r;
        if (is_square_i64((i64)m, &r)) return std::make_pair((u64)r, (u64)0);
        if (d == m) return std::make_pair((u64)0, (u64)1);
        return std::nullopt;
    }
    if (!is_prime_u64(m)) throw math_error("cornacchia: m must be prime");
    auto r0 = sqrt_mod_u64(m - d % m, m);
    if (!r0) return std::nullopt;
    u64 a = m, b = std::max(*r0, m - *r0);
    u64 lim = (u64)isqrt_i64((i64)m);
    while (b > lim) {
        u64 r = a % b;
        a = b;
        b = r;
    }
    u64 rest = m - b * b;
    if (rest % d != 0) return std::nullopt;
    i64 z;
    if (!is_square_i64((i64)(rest / d), &z)) return std::nullopt;
    return std::make_pair(b, (u64)z);
}

// the prime ideal (ell, tau) above ell, with tau = a + b*omega chosen by the
// least nonnegative root of omega's minimal polynomial mod ell
struct IdealAboveEll {
    QuadOrder order;
    u64 ell = 0;
    i64 a = 0, b = 1;  // tau = a + b*omega
};

inline std::optional<IdealAboveEll> prime_above(const QuadOrder& O, u64 ell) {
    i64 t = O.omega_trace(), n = O.omega_norm();
    std::optional<u64> root;
    for (u64 x = 0; x < ell; x++) {
        i64 v = (i64)(x * x) - t * (i64)x + n;
        if (((v % (i64)ell) + (i64)ell) % (i64)ell == 0) { root = x; break; }
    }
    if (!root) return std::nullopt;
    IdealAboveEll l;
    l.order = O;
    l.ell = ell;
    l.a = -(i64)*root;
    l.b = 1;
    return l;
}

// the form class of (ell, tau)
inline QuadForm ideal_form(const IdealAboveEll& l) {
    i64 D = l.order.disc;
    bool odd = ((D % 2) + 2) % 2 == 1;
    // tau = a + omega corresponds to u = a in the module [ell, u + omega]
    i64 u = ((l.a % (i64)l.ell) + (i64)l.ell) % (i64)l.ell;
    i64 b = 2 * u + (odd ? 1 : 0);
    i64 num = b * b - D;
    if (num % (i64)(4 * l.ell) != 0) throw math_error("ideal_form: invalid ideal");
    return reduce_form({(i64)l.ell, b, num / (i64)(4 * l.ell)});
}

}  // namespace orn

#endif
