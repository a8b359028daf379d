#ifndef ORIENTEER_INTUTIL_HPP
#define ORIENTEER_INTUTIL_HPP

// Small integer helpers shared by every module: 64/128-bit modular
// arithmetic, a minimal big-unsigned for exponents of size p^d (the
// field *elements* never need it, only exponents do), deterministic
// Miller-Rabin, Kronecker symbols and desk-scale factorization.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace orn {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

struct math_error : std::runtime_error {
    explicit math_error(const std::string& what) : std::runtime_error(what) {}
};

inline u64 addm(u64 a, u64 b, u64 p) {
    u64 s = a + b;            // p < 2^61, no overflow
    return s >= p ? s - p : s;
}

inline u64 subm(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }

inline u64 mulm(u64 a, u64 b, u64 p) { return (u64)((u128)a * b % p); }

inline u64 powm(u64 a, u128 e, u64 p) {
    u64 r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mulm(r, a, p);
        a = mulm(a, a, p);
        e >>= 1;
    }
    return r;
}

inline u64 invm(u64 a, u64 p) {
    if (a % p == 0) throw math_error("invm: zero");
    return powm(a, (u128)p - 2, p);  // p prime
}

// Big unsigned used only as an exponent (p^d, q-1, (q-1)/2, ...).
struct BigUint {
    std::vector<u64> w;  // base 2^64, least significant first, no trailing zeros

    BigUint() = default;
    explicit BigUint(u128 v) {
        if ((u64)v) w.push_back((u64)v);
        if ((u64)(v >> 64)) {
            if (w.empty()) w.push_back(0);
            w.push_back((u64)(v >> 64));
        }
    }

    bool is_zero() const { return w.empty(); }
    bool odd() const { return !w.empty() && (w[0] & 1); }

    size_t bits() const {
        if (w.empty()) return 0;
        u64 top = w.back();
        size_t b = 64 * (w.size() - 1);
        while (top) { b++; top >>= 1; }
        return b;
    }
    bool bit(size_t i) const {
        size_t limb = i / 64;
        if (limb >= w.size()) return false;
        return (w[limb] >> (i % 64)) & 1;
    }

    void mul_small(u64 m) {
        u128 carry = 0;
        for (auto& limb : w) {
            u128 t = (u128)limb * m + carry;
            limb = (u64)t;
            carry = t >> 64;
        }
        if (carry) w.push_back((u64)carry);
        trim();
    }
    void add_small(u64 a) {
        u128 carry = a;
        for (auto& limb : w) {
            u128 t = (u128)limb + carry;
            limb = (u64)t;
            carry = t >> 64;
            if (!carry) break;
        }
        if (carry) w.push_back((u64)carry);
    }
    void sub_small(u64 a) {  // requires *this >= a
        if (w.empty()) {
            if (a) throw math_error("BigUint underflow");
            return;
        }
        if (w[0] >= a) {
            w[0] -= a;
        } else {
            w[0] = (u64)(((u128)1 << 64) + w[0] - a);
            size_t i = 1;
            while (true) {
                if (i >= w.size()) throw math_error("BigUint underflow");
                if (w[i] > 0) { w[i]--; break; }
                w[i] = ~(u64)0;
                i++;
            }
        }
        trim();
    }
    void shr1() {
        for (size_t i = 0; i < w.size(); i++) {
            w[i] >>= 1;
            if (i + 1 < w.size()) w[i] |= w[i + 1] << 63;
        }
        trim();
    }
    u64 mod_small(u64 m) const {
        u128 r = 0;
        for (size_t i = w.size(); i-- > 0;) r = ((r << 64) | w[i]) % m;
        return (u64)r;
    }
    void trim() {
        while (!w.empty() && w.back() == 0) w.pop_back();
    }

    static BigUint pow_small(u64 base, unsigned e) {
        BigUint r((u128)1);
        for (unsigned i = 0; i < e; i++) r.mul_small(base);
        return r;
    }
};

inline u64 gcd_u64(u64 a, u64 b) {
    while (b) { u64 t = a % b; a = b; b = t; }
    return a;
}

inline i64 isqrt_i64(i64 n) {
    if (n < 0) return -1;
    i64 r = (i64)std::sqrt((double)n);
    while (r > 0 && r * r > n) r--;
    while ((r + 1) * (r + 1) <= n) r++;
    return r;
}

inline bool is_square_i64(i64 n, i64* root = nullptr) {
    if (n < 0) return false;
    i64 r = isqrt_i64(n);
    if (root) *root = r;
    return r * r == n;
}

// Deterministic Miller-Rabin; the fixed base set is valid for all n < 3.3*10^24,
// which covers the full u64 range used here.
inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % q == 0) return n == q;
    }
    u64 d = n - 1;
    int s = 0;
    while (!(d & 1)) { d >>= 1; s++; }
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        u64 x = powm(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 0; i < s - 1; i++) {
            x = mulm(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

// Kronecker symbol (a/n) for arbitrary integers.
inline int kronecker(i64 a, i64 n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    if ((a & 1) == 0 && (n & 1) == 0) return 0;
    int k = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) k = -k;
    }
    int v = 0;
    while ((n & 1) == 0) { n >>= 1; v++; }
    if (v & 1) {
        i64 a8 = ((a % 8) + 8) % 8;
        if (a8 == 3 || a8 == 5) k = -k;
    }
    a = ((a % n) + n) % n;
    while (a != 0) {
        v = 0;
        while ((a & 1) == 0) { a >>= 1; v++; }
        if (v & 1) {
            i64 n8 = n % 8;
            if (n8 == 3 || n8 == 5) k = -k;
        }
        if ((a % 4) == 3 && (n % 4) == 3) k = -k;
        i64 t = n % a;
        n = a;
        a = t;
    }
    return n == 1 ? k : 0;
}

// Desk-scale factorization: trial division with a prime-certificate tail.
inline std::map<u64, unsigned> factor_u64(u64 n) {
    std::map<u64, unsigned> f;
    if (n == 0) throw math_error("factor_u64: zero");
    for (u64 d = 2; d * d <= n && d <= 2000000; d += (d == 2 ? 1 : 2)) {
        while (n % d == 0) { f[d]++; n /= d; }
    }
    if (n > 1) {
        if (!is_prime_u64(n)) throw math_error("factor_u64: composite cofactor beyond trial-division budget");
        f[n]++;
    }
    return f;
}

inline unsigned valuation_u64(u64 n, u64 q) {
    unsigned v = 0;
    while (n % q == 0) { n /= q; v++; }
    return v;
}

// square root of a modulo an odd prime q (Tonelli-Shanks), or nullopt
inline std::optional<u64> sqrt_mod_u64(u64 a, u64 q) {
    a %= q;
    if (a == 0) return 0;
    if (q == 2) return a;
    if (powm(a, (q - 1) / 2, q) != 1) return std::nullopt;
    if (q % 4 == 3) {
        u64 r = powm(a, (q + 1) / 4, q);
        return std::min(r, q - r);
    }
    u64 s = q - 1;
    unsigned e = 0;
    while (s % 2 == 0) { s /= 2; e++; }
    u64 n = 2;
    while (powm(n, (q - 1) / 2, q) != q - 1) n++;
    u64 x = powm(a, (s + 1) / 2, q);
    u64 b = powm(a, s, q);
    u64 g = powm(n, s, q);
    unsigned r = e;
    while (b != 1) {
        u64 t = b;
        unsigned m = 0;
        while (t != 1) { t = mulm(t, t, q); m++; }
        u64 gs = g;
        for (unsigned i = 0; i + m + 1 < r; i++) gs = mulm(gs, gs, q);
        x = mulm(x, gs, q);
        g = mulm(gs, gs, q);
        b = mulm(b, g, q);
        r = m;
    }
    return std::min(x, q - x);
}

}  // namespace orn

#endif
