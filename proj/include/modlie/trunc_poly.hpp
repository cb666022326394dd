#ifndef MODLIE_TRUNC_POLY_HPP
#define MODLIE_TRUNC_POLY_HPP

#include <map>
#include <string>

#include "modlie/multiindex.hpp"

namespace modlie {

/// Element of the truncated polynomial algebra A(n), stored as a sparse
/// coefficient map keyed by monomial rank. Any product monomial with an
/// exponent reaching p is annihilated; that single rule is what every
/// cocycle formula downstream relies on.
class TruncatedPolynomial {
public:
    TruncatedPolynomial(u32 n, u32 p);

    static TruncatedPolynomial zero(u32 n, u32 p) { return TruncatedPolynomial(n, p); }
    static TruncatedPolynomial one(u32 n, u32 p);
    static TruncatedPolynomial monomial(const MultiIndex& a, u32 coeff = 1);
    static TruncatedPolynomial variable(u32 n, u32 j, u32 p); // x_j, 1-based

    u32 arity() const { return n_; }
    u32 modulus() const { return p_; }

    bool is_zero() const { return coeff_.empty(); }
    u32 coeff(const MultiIndex& a) const;
    u32 coeff_rank(u64 rank) const;
    const std::map<u64, u32>& terms() const { return coeff_; }

    void add_term(u64 rank, u32 c); // accumulates, drops zeros
    void add_term(const MultiIndex& a, u32 c);

    TruncatedPolynomial& operator+=(const TruncatedPolynomial& g);
    TruncatedPolynomial& operator-=(const TruncatedPolynomial& g);
    TruncatedPolynomial scaled(u32 c) const;

    friend TruncatedPolynomial operator+(TruncatedPolynomial f, const TruncatedPolynomial& g) {
        f += g;
        return f;
    }
    friend TruncatedPolynomial operator-(TruncatedPolynomial f, const TruncatedPolynomial& g) {
        f -= g;
        return f;
    }
    friend bool operator==(const TruncatedPolynomial& f, const TruncatedPolynomial& g) {
        return f.n_ == g.n_ && f.p_ == g.p_ && f.coeff_ == g.coeff_;
    }
    friend bool operator!=(const TruncatedPolynomial& f, const TruncatedPolynomial& g) { return !(f == g); }

    std::string to_string() const;

private:
    u32 n_, p_;
    std::map<u64, u32> coeff_; // rank -> nonzero residue
};

/// Product in A(n): coefficientwise convolution with truncation.
TruncatedPolynomial poly_mul(const TruncatedPolynomial& f, const TruncatedPolynomial& g);

/// Formal partial derivative d/dx_j (1-based axis).
TruncatedPolynomial poly_partial(const TruncatedPolynomial& f, u32 j);

} // namespace modlie

#endif
