#include "modlie/multiindex.hpp"

#include <stdexcept>

namespace modlie {

MultiIndex::MultiIndex(std::vector<u32> exponents, u32 p) : e_(std::move(exponents)), p_(p) {
    if (!is_prime(p)) throw std::invalid_argument("MultiIndex: modulus must be prime");
    for (u32 x : e_)
        if (x >= p) throw std::invalid_argument("MultiIndex: exponent " + std::to_string(x) + " not below p");
}

MultiIndex MultiIndex::zero(u32 n, u32 p) { return MultiIndex(std::vector<u32>(n, 0), p); }

MultiIndex MultiIndex::unit(u32 n, u32 j, u32 p) {
    if (j < 1 || j > n) throw std::out_of_range("MultiIndex::unit: axis out of range");
    std::vector<u32> e(n, 0);
    e[j - 1] = 1;
    return MultiIndex(std::move(e), p);
}

MultiIndex MultiIndex::top(u32 n, u32 p) { return MultiIndex(std::vector<u32>(n, p - 1), p); }

MultiIndex MultiIndex::from_rank(u64 rank, u32 n, u32 p) {
    std::vector<u32> e(n);
    for (u32 i = 0; i < n; ++i) {
        e[i] = static_cast<u32>(rank % p);
        rank /= p;
    }
    if (rank != 0) throw std::out_of_range("MultiIndex::from_rank: rank exceeds p^n");
    return MultiIndex(std::move(e), p);
}

u32 MultiIndex::degree() const {
    u32 d = 0;
    for (u32 x : e_) d += x;
    return d;
}

u64 MultiIndex::rank() const {
    u64 r = 0;
    for (u32 i = arity(); i-- > 0;) r = r * p_ + e_[i];
    return r;
}

Fp MultiIndex::factorial_mod() const {
    u64 f = 1;
    for (u32 x : e_)
        for (u32 t = 2; t <= x; ++t) f = f * t % p_;
    return Fp(static_cast<i64>(f), p_);
}

bool MultiIndex::is_zero() const {
    for (u32 x : e_)
        if (x) return false;
    return true;
}

bool MultiIndex::leq(const MultiIndex& b) const {
    if (arity() != b.arity()) throw std::invalid_argument("MultiIndex: arity mismatch");
    for (u32 i = 0; i < arity(); ++i)
        if (e_[i] > b.e_[i]) return false;
    return true;
}

MultiIndexSum MultiIndex::plus(const MultiIndex& b) const {
    if (arity() != b.arity() || p_ != b.p_) throw std::invalid_argument("MultiIndex: arity/modulus mismatch");
    std::vector<u32> e(arity());
    bool ok = true;
    for (u32 i = 0; i < arity(); ++i) {
        u32 s = e_[i] + b.e_[i];
        if (s >= p_) {
            ok = false;
            s = 0;
        }
        e[i] = s;
    }
    return MultiIndexSum{MultiIndex(std::move(e), p_), ok};
}

MultiIndexSum MultiIndex::minus(const MultiIndex& b) const {
    if (arity() != b.arity() || p_ != b.p_) throw std::invalid_argument("MultiIndex: arity/modulus mismatch");
    std::vector<u32> e(arity());
    bool ok = true;
    for (u32 i = 0; i < arity(); ++i) {
        if (e_[i] < b.e_[i]) {
            ok = false;
            e[i] = 0;
        } else {
            e[i] = e_[i] - b.e_[i];
        }
    }
    return MultiIndexSum{MultiIndex(std::move(e), p_), ok};
}

std::string MultiIndex::to_string() const {
    std::string s = "(";
    for (u32 i = 0; i < arity(); ++i) {
        if (i) s += ",";
        s += std::to_string(e_[i]);
    }
    return s + ")";
}

Fp multiindex_binom(const MultiIndex& a, const MultiIndex& b) {
    if (a.arity() != b.arity() || a.modulus() != b.modulus())
        throw std::invalid_argument("multiindex_binom: arity/modulus mismatch");
    const u32 p = a.modulus();
    if (!b.leq(a)) return Fp(0, p);
    u64 acc = 1;
    for (u32 i = 0; i < a.arity(); ++i) {
        // C(a_i, b_i) with both arguments < p <= 13 or so: fits easily in u64.
        u64 c = 1;
        for (u32 t = 0; t < b[i]; ++t) c = c * (a[i] - t) / (t + 1);
        acc = acc * (c % p) % p;
    }
    return Fp(static_cast<i64>(acc), p);
}

int half_sign(u32 j, u32 m) {
    if (j < 1 || j > 2 * m) throw std::out_of_range("half_sign: index out of range");
    return j <= m ? 1 : -1;
}

u32 conj_index(u32 j, u32 m) {
    if (j < 1 || j > 2 * m) throw std::out_of_range("conj_index: index out of range");
    return j <= m ? j + m : j - m;
}

SignConj multiindex_sign_conj(const MultiIndex& a, u32 m) {
    if (a.arity() != 2 * m) throw std::invalid_argument("multiindex_sign_conj: arity must equal 2m");
    u32 odd = 0;
    std::vector<u32> conj(a.arity());
    for (u32 j = 1; j <= 2 * m; ++j) {
        conj[j - 1] = a[conj_index(j, m) - 1];
        if (j > m) odd += a[j - 1];
    }
    Fp sign = (odd % 2 == 0) ? Fp(1, a.modulus()) : Fp(-1, a.modulus());
    return SignConj{sign, MultiIndex(std::move(conj), a.modulus())};
}

u64 monomial_count(u32 n, u32 p) {
    u64 c = 1;
    for (u32 i = 0; i < n; ++i) c *= p;
    return c;
}

} // namespace modlie
