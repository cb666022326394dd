#ifndef MODLIE_FP_HPP
#define MODLIE_FP_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace modlie {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

inline bool is_prime(u32 n) {
    if (n < 2) return false;
    for (u32 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

/// Element of the prime field F_p. Carries its modulus so that values from
/// different characteristics cannot be mixed silently.
struct Fp {
    u32 v = 0;
    u32 p = 0;

    Fp() = default;
    Fp(i64 value, u32 modulus) : p(modulus) {
        if (!is_prime(modulus))
            throw std::invalid_argument("Fp: modulus " + std::to_string(modulus) + " is not prime");
        i64 r = value % static_cast<i64>(modulus);
        if (r < 0) r += modulus;
        v = static_cast<u32>(r);
    }

    bool is_zero() const { return v == 0; }

    friend bool operator==(const Fp& a, const Fp& b) { return a.v == b.v && a.p == b.p; }
    friend bool operator!=(const Fp& a, const Fp& b) { return !(a == b); }
};

namespace detail {
inline void check_same_p(const Fp& a, const Fp& b) {
    if (a.p != b.p)
        throw std::invalid_argument("Fp: mixed moduli " + std::to_string(a.p) + " and " + std::to_string(b.p));
}
} // namespace detail

inline Fp operator+(Fp a, Fp b) {
    detail::check_same_p(a, b);
    u32 s = a.v + b.v;
    if (s >= a.p) s -= a.p;
    return Fp(s, a.p);
}

inline Fp operator-(Fp a, Fp b) {
    detail::check_same_p(a, b);
    u32 s = a.v >= b.v ? a.v - b.v : a.v + a.p - b.v;
    return Fp(s, a.p);
}

inline Fp operator-(Fp a) {
    return Fp(a.v == 0 ? 0 : a.p - a.v, a.p);
}

inline Fp operator*(Fp a, Fp b) {
    detail::check_same_p(a, b);
    return Fp(static_cast<i64>(static_cast<u64>(a.v) * b.v % a.p), a.p);
}

/// a^e mod p by binary exponentiation; raw residue version used by hot paths.
inline u32 pow_mod(u32 a, u64 e, u32 p) {
    u64 base = a % p, acc = 1;
    while (e > 0) {
        if (e & 1) acc = acc * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return static_cast<u32>(acc);
}

/// Multiplicative inverse of a nonzero residue, by Fermat.
inline u32 inv_mod(u32 a, u32 p) {
    if (a % p == 0) throw std::domain_error("inv_mod: division by zero in F_" + std::to_string(p));
    return pow_mod(a % p, p - 2, p);
}

inline Fp fp_inv(Fp a) { return Fp(inv_mod(a.v, a.p), a.p); }

inline Fp pow(Fp a, u64 e) { return Fp(pow_mod(a.v, e, a.p), a.p); }

inline Fp operator/(Fp a, Fp b) {
    detail::check_same_p(a, b);
    return a * fp_inv(b);
}

} // namespace modlie

#endif
