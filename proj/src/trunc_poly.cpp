#include "modlie/trunc_poly.hpp"

#include <stdexcept>

namespace modlie {

TruncatedPolynomial::TruncatedPolynomial(u32 n, u32 p) : n_(n), p_(p) {
    if (!is_prime(p)) throw std::invalid_argument("TruncatedPolynomial: modulus must be prime");
}

TruncatedPolynomial TruncatedPolynomial::one(u32 n, u32 p) {
    TruncatedPolynomial f(n, p);
    f.coeff_[0] = 1;
    return f;
}

TruncatedPolynomial TruncatedPolynomial::monomial(const MultiIndex& a, u32 coeff) {
    TruncatedPolynomial f(a.arity(), a.modulus());
    f.add_term(a.rank(), coeff);
    return f;
}

TruncatedPolynomial TruncatedPolynomial::variable(u32 n, u32 j, u32 p) {
    return monomial(MultiIndex::unit(n, j, p));
}

u32 TruncatedPolynomial::coeff(const MultiIndex& a) const { return coeff_rank(a.rank()); }

u32 TruncatedPolynomial::coeff_rank(u64 rank) const {
    auto it = coeff_.find(rank);
    return it == coeff_.end() ? 0 : it->second;
}

void TruncatedPolynomial::add_term(u64 rank, u32 c) {
    c %= p_;
    if (c == 0) return;
    auto [it, inserted] = coeff_.try_emplace(rank, c);
    if (!inserted) {
        it->second = (it->second + c) % p_;
        if (it->second == 0) coeff_.erase(it);
    }
}

void TruncatedPolynomial::add_term(const MultiIndex& a, u32 c) { add_term(a.rank(), c); }

TruncatedPolynomial& TruncatedPolynomial::operator+=(const TruncatedPolynomial& g) {
    if (n_ != g.n_ || p_ != g.p_) throw std::invalid_argument("TruncatedPolynomial: arity/modulus mismatch");
    for (auto [r, c] : g.coeff_) add_term(r, c);
    return *this;
}

TruncatedPolynomial& TruncatedPolynomial::operator-=(const TruncatedPolynomial& g) {
    if (n_ != g.n_ || p_ != g.p_) throw std::invalid_argument("TruncatedPolynomial: arity/modulus mismatch");
    for (auto [r, c] : g.coeff_) add_term(r, p_ - c);
    return *this;
}

TruncatedPolynomial TruncatedPolynomial::scaled(u32 c) const {
    TruncatedPolynomial f(n_, p_);
    c %= p_;
    if (c == 0) return f;
    for (auto [r, v] : coeff_) f.coeff_[r] = v * c % p_;
    return f;
}

std::string TruncatedPolynomial::to_string() const {
    if (coeff_.empty()) return "0";
    std::string s;
    for (auto [r, c] : coeff_) {
        if (!s.empty()) s += " + ";
        s += std::to_string(c) + "*x^" + MultiIndex::from_rank(r, n_, p_).to_string();
    }
    return s;
}

TruncatedPolynomial poly_mul(const TruncatedPolynomial& f, const TruncatedPolynomial& g) {
    if (f.arity() != g.arity() || f.modulus() != g.modulus())
        throw std::invalid_argument("poly_mul: arity/modulus mismatch");
    const u32 n = f.arity(), p = f.modulus();
    TruncatedPolynomial h(n, p);
    for (auto [ra, ca] : f.terms()) {
        MultiIndex a = MultiIndex::from_rank(ra, n, p);
        for (auto [rb, cb] : g.terms()) {
            MultiIndex b = MultiIndex::from_rank(rb, n, p);
            auto s = a.plus(b);
            if (!s.valid) continue; // truncation: exponent overflow kills the term
            h.add_term(s.value.rank(), ca * cb % p);
        }
    }
    return h;
}

TruncatedPolynomial poly_partial(const TruncatedPolynomial& f, u32 j) {
    const u32 n = f.arity(), p = f.modulus();
    if (j < 1 || j > n) throw std::out_of_range("poly_partial: axis out of range");
    TruncatedPolynomial h(n, p);
    const u64 step = monomial_count(j - 1, p); // rank weight of x_j
    for (auto [r, c] : f.terms()) {
        u32 aj = static_cast<u32>(r / step % p);
        if (aj == 0) continue;
        h.add_term(r - step, c * aj % p);
    }
    return h;
}

} // namespace modlie
