#ifndef ORIENTEER_QUAT_HPP
#define ORIENTEER_QUAT_HPP

// Quaternion arithmetic for the endomorphism ring of y^2 = x^3 - x at
// j = 1728 (p = 3 mod 4): i^2 = -1, j^2 = -p, k = ij.  Elements carry a
// common denominator in {1, 2}; the maximal order is <1, i, (i+k)/2,
// (1+j)/2>.  Evaluation maps i to (x,y) -> (-x, sqrt(-1) y) and j to the
// p-power Frobenius; half-integer elements evaluate through a halving of
// the input point, which is well defined because the numerator kills E[2].

#include <numeric>

#include "ec.hpp"

namespace orn {

struct QuatElem {
    u64 p = 0;
    i64 w = 0, x = 0, y = 0, z = 0;  // numerators over den
    i64 den = 1;

    QuatElem() = default;
    QuatElem(u64 p_, i64 w_, i64 x_, i64 y_, i64 z_, i64 den_ = 1)
        : p(p_), w(w_), x(x_), y(y_), z(z_), den(den_) {
        reduce();
    }

    void reduce() {
        if (den < 0) { den = -den; w = -w; x = -x; y = -y; z = -z; }
        i64 g = std::gcd(std::gcd(std::abs(w), std::abs(x)),
                         std::gcd(std::gcd(std::abs(y), std::abs(z)), den));
        if (g > 1) { w /= g; x /= g; y /= g; z /= g; den /= g; }
        if (den != 1 && den != 2) throw math_error("QuatElem: denominator must reduce to 1 or 2");
    }

    bool is_integer() const { return den == 1 && x == 0 && y == 0 && z == 0; }

    // reduced trace and reduced norm (integers for everything in the order)
    i64 trace() const {
        if ((2 * w) % den != 0) throw math_error("QuatElem: non-integral trace");
        return 2 * w / den;
    }
    i64 norm() const {
        i128 n = (i128)w * w + (i128)x * x + (i128)p * ((i128)y * y + (i128)z * z);
        if (n % ((i128)den * den) != 0) throw math_error("QuatElem: non-integral norm");
        i128 r = n / ((i128)den * den);
        if (r > (i128)INT64_MAX) throw math_error("QuatElem: norm overflow");
        return (i64)r;
    }

    QuatElem conj() const { return QuatElem(p, w, -x, -y, -z, den); }
};

inline QuatElem operator+(const QuatElem& a, const QuatElem& b) {
    if (a.p != b.p) throw math_error("QuatElem: mixed p");
    i64 d = std::lcm(a.den, b.den);
    i64 sa = d / a.den, sb = d / b.den;
    return QuatElem(a.p, a.w * sa + b.w * sb, a.x * sa + b.x * sb, a.y * sa + b.y * sb,
                    a.z * sa + b.z * sb, d);
}

inline QuatElem operator-(const QuatElem& a) { return QuatElem(a.p, -a.w, -a.x, -a.y, -a.z, a.den); }
inline QuatElem operator-(const QuatElem& a, const QuatElem& b) { return a + (-b); }

inline QuatElem operator*(const QuatElem& a, const QuatElem& b) {
    if (a.p != b.p) throw math_error("QuatElem: mixed p");
    i64 P = (i64)a.p;
    i64 w = a.w * b.w - a.x * b.x - P * a.y * b.y - P * a.z * b.z;
    i64 x = a.w * b.x + a.x * b.w + P * (a.y * b.z - a.z * b.y);
    i64 y = a.w * b.y + a.y * b.w - a.x * b.z + a.z * b.x;
    i64 z = a.w * b.z + a.z * b.w + a.x * b.y - a.y * b.x;
    return QuatElem(a.p, w, x, y, z, a.den * b.den);
}

inline bool operator==(const QuatElem& a, const QuatElem& b) {
    return a.p == b.p && a.w == b.w && a.x == b.x && a.y == b.y && a.z == b.z && a.den == b.den;
}

inline QuatElem quat_one(u64 p) { return QuatElem(p, 1, 0, 0, 0); }
inline QuatElem quat_i(u64 p) { return QuatElem(p, 0, 1, 0, 0); }
inline QuatElem quat_j(u64 p) { return QuatElem(p, 0, 0, 1, 0); }
inline QuatElem quat_k(u64 p) { return QuatElem(p, 0, 0, 0, 1); }

// a*1 + b*i + c*(i+k)/2 + d*(1+j)/2
inline QuatElem maximal_order_element(u64 p, i64 a, i64 b, i64 c, i64 d) {
    return QuatElem(p, 2 * a + d, 2 * b + c, d, c, 2);
}

inline bool in_maximal_order(const QuatElem& q) {
    i64 s = 2 / q.den;
    i64 W = q.w * s, X = q.x * s, Y = q.y * s, Z = q.z * s;
    auto even = [](i64 v) { return ((v % 2) + 2) % 2 == 0; };
    return even(W - Y) && even(X - Z);
}

namespace detail {

inline bool is_1728_model(const Curve& E) {
    return E.b.is_zero() && (E.a + FieldElem::one(E.lvl)).is_zero();
}

inline FieldElem sqrt_minus_one(const Level* L) {
    const Level* L2 = field_extend(prime_field(L->p), 2);
    FieldElem im = elem_from_flat(L2, {0, 1});
    return lift_to(im, L);
}

inline std::optional<Point> point_try_lower(const Point& P, const Level* L) {
    FieldElem a, b;
    if (!try_lower(P.E.a, L, &a) || !try_lower(P.E.b, L, &b)) return std::nullopt;
    Curve El(L, a, b);
    if (P.inf) return Point(El);
    FieldElem x, y;
    if (!try_lower(P.x, L, &x) || !try_lower(P.y, L, &y)) return std::nullopt;
    return Point(El, x, y);
}

// evaluate W + X*i + Y*j + Z*k (the numerator of q) at P
inline Point quat_apply_integer(const QuatElem& q, i64 W, i64 X, i64 Y, i64 Z, const Point& P) {
    FieldElem im = sqrt_minus_one(P.E.lvl);
    auto iota = [&](const Point& R) {
        if (R.inf) return R;
        return Point(R.E, -R.x, im * R.y);
    };
    Point piP = frobenius_point(P);
    Point R = scalar_mul(W, P) + scalar_mul(X, iota(P)) + scalar_mul(Y, piP) +
              scalar_mul(Z, iota(piP));
    return R;
}

}  // namespace detail

// evaluate q at a point of y^2 = x^3 - x
inline Point quat_apply(const QuatElem& q, const Point& P0) {
    if (P0.E.p() != q.p) throw math_error("quat_apply: p mismatch");
    if (!detail::is_1728_model(P0.E)) throw math_error("quat_apply: curve is not y^2 = x^3 - x");
    const Level* L2 = field_extend(prime_field(q.p), 2);
    const Level* L = detail::level_contains(P0.E.lvl, L2) ? P0.E.lvl : L2;
    if (!detail::level_contains(L, P0.E.lvl)) throw math_error("quat_apply: incompatible level");
    Point P = point_lift(P0, L);
    if (q.den == 1) return detail::quat_apply_integer(q, q.w, q.x, q.y, q.z, P);
    // halve the point, extending the field if the halving lives upstairs
    std::optional<Point> half;
    for (unsigned m = 1; m <= 8 && !half; m *= 2) {
        Point Pm = point_lift(P, field_extend(L, m));
        half = divide_point(Pm, 2);
    }
    if (!half) throw math_error("quat_apply: halving failed");
    Point R = detail::quat_apply_integer(q, q.w, q.x, q.y, q.z, *half);
    auto low = detail::point_try_lower(R, L);
    return low ? *low : R;
}

}  // namespace orn

#endif
