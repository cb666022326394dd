#ifndef MODLIE_MULTIINDEX_HPP
#define MODLIE_MULTIINDEX_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "modlie/fp.hpp"

namespace modlie {

struct MultiIndexSum;

/// Exponent tuple a in {0..p-1}^n indexing the monomials of the truncated
/// polynomial algebra A(n) = F[x_1..x_n]/(x_1^p,...,x_n^p).
///
/// Monomials are enumerated by a mixed-radix rank with the first exponent
/// least significant: rank(a) = a_1 + a_2 p + ... + a_n p^{n-1}. This rank
/// is the canonical basis ordering shared by every construction.
class MultiIndex {
public:
    MultiIndex(std::vector<u32> exponents, u32 p);

    static MultiIndex zero(u32 n, u32 p);
    static MultiIndex unit(u32 n, u32 j, u32 p); // epsilon_j, 1-based j
    static MultiIndex top(u32 n, u32 p);         // sigma = (p-1,...,p-1)
    static MultiIndex from_rank(u64 rank, u32 n, u32 p);

    u32 arity() const { return static_cast<u32>(e_.size()); }
    u32 modulus() const { return p_; }
    u32 operator[](u32 i) const { return e_[i]; } // 0-based access
    const std::vector<u32>& exponents() const { return e_; }

    u32 degree() const;
    u64 rank() const;

    /// a! = prod a_i! reduced mod p.
    Fp factorial_mod() const;

    bool is_zero() const;
    bool leq(const MultiIndex& b) const; // coordinatewise <=

    /// Coordinatewise sum; valid is false if any exponent reaches p
    /// (the monomial is annihilated by truncation).
    MultiIndexSum plus(const MultiIndex& b) const;

    /// Coordinatewise difference; valid iff b <= a.
    MultiIndexSum minus(const MultiIndex& b) const;

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
        return a.p_ == b.p_ && a.e_ == b.e_;
    }
    friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }

    std::string to_string() const;

private:
    std::vector<u32> e_;
    u32 p_;
};

struct MultiIndexSum {
    MultiIndex value;
    bool valid;
};

/// binom(a,b) = prod binom(a_i, b_i) mod p; zero when b is not <= a.
/// Exponents are below p, so each coordinate is the single-digit case of
/// Lucas' theorem: an ordinary integer binomial reduced mod p.
Fp multiindex_binom(const MultiIndex& a, const MultiIndex& b);

/// For arity 2m: sign sigma(a) = (-1)^{sum_{i>m} a_i} and the conjugate
/// multi-index with the two halves swapped (hat a_i = a_{i'}).
struct SignConj {
    Fp sign;
    MultiIndex conj;
};
SignConj multiindex_sign_conj(const MultiIndex& a, u32 m);

/// sigma(j) for 1 <= j <= 2m: +1 on the first half, -1 on the second.
int half_sign(u32 j, u32 m);
/// Conjugate index j' = j +- m.
u32 conj_index(u32 j, u32 m);

/// Number of monomials of A(n), i.e. p^n.
u64 monomial_count(u32 n, u32 p);

} // namespace modlie

#endif
