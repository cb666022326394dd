#include <doctest.h>

#include <cstdint>
#include <random>

#include "modlie/fp.hpp"
#include "modlie/multiindex.hpp"
#include "modlie/trunc_poly.hpp"

using namespace modlie;

namespace {

// Independent oracle: find the inverse by exhaustive search of residues.
u32 inv_by_search(u32 a, u32 p) {
    for (u32 b = 1; b < p; ++b)
        if (a * b % p == 1) return b;
    return 0;
}

MultiIndex mi(std::vector<u32> e, u32 p) { return MultiIndex(std::move(e), p); }

TruncatedPolynomial random_poly(u32 n, u32 p, std::mt19937_64& rng, int terms = 4) {
    TruncatedPolynomial f(n, p);
    std::uniform_int_distribution<u64> rank(0, monomial_count(n, p) - 1);
    std::uniform_int_distribution<u32> coeff(0, p - 1);
    for (int t = 0; t < terms; ++t) f.add_term(rank(rng), coeff(rng));
    return f;
}

} // namespace

TEST_CASE("field inverse") {
    CHECK(fp_inv(Fp(1, 5)).v == 1);
    CHECK(fp_inv(Fp(2, 5)).v == inv_by_search(2, 5)); // 3
    CHECK(fp_inv(Fp(2, 5)).v == 3);
    CHECK(fp_inv(Fp(3, 7)).v == inv_by_search(3, 7)); // 5
    CHECK(fp_inv(Fp(3, 7)).v == 5);
    CHECK_THROWS_AS(fp_inv(Fp(0, 5)), std::domain_error);

    for (u32 p : {5u, 7u, 11u})
        for (u32 a = 1; a < p; ++a) {
            CHECK((Fp(a, p) * fp_inv(Fp(a, p))).v == 1);
            CHECK(fp_inv(Fp(a, p)).v == inv_by_search(a, p));
        }
}

TEST_CASE("field basics") {
    CHECK_THROWS_AS(Fp(1, 4), std::invalid_argument);
    CHECK_THROWS_AS(Fp(1, 5) + Fp(1, 7), std::invalid_argument);
    CHECK(Fp(-1, 5).v == 4);
    CHECK((Fp(3, 5) - Fp(4, 5)).v == 4);
    CHECK(pow(Fp(2, 7), 6).v == 1);
}

TEST_CASE("multi-index binomials") {
    // C(4,2)*C(3,1) = 18 = 3 mod 5, checked against integer factorials.
    auto integer_binom = [](u32 n, u32 k) {
        u64 num = 1, den = 1;
        for (u32 t = 0; t < k; ++t) {
            num *= n - t;
            den *= t + 1;
        }
        return num / den;
    };
    CHECK(integer_binom(4, 2) * integer_binom(3, 1) % 5 == 3);
    CHECK(multiindex_binom(mi({4, 3}, 5), mi({2, 1}, 5)).v == 3);

    auto a = mi({3, 2, 4}, 5);
    CHECK(multiindex_binom(a, a).v == 1);
    CHECK(multiindex_binom(mi({1, 0}, 5), mi({0, 2}, 5)).v == 0); // b not <= a
    CHECK_THROWS_AS(multiindex_binom(mi({1, 0}, 5), mi({1}, 5)), std::invalid_argument);

    // Symmetry binom(a,b) = binom(a,a-b) for b <= a, on random samples.
    std::mt19937_64 rng(13);
    for (int iter = 0; iter < 300; ++iter) {
        u32 p = iter % 2 ? 5 : 7;
        std::uniform_int_distribution<u32> d(0, p - 1);
        std::vector<u32> ae(3), be(3);
        for (int i = 0; i < 3; ++i) {
            ae[i] = d(rng);
            be[i] = ae[i] ? rng() % (ae[i] + 1) : 0;
        }
        MultiIndex a3(ae, p), b3(be, p);
        CHECK(multiindex_binom(a3, b3) == multiindex_binom(a3, a3.minus(b3).value));
    }
}

TEST_CASE("sign and conjugate") {
    auto sc = multiindex_sign_conj(mi({1, 1}, 5), 1);
    CHECK(sc.sign.v == 4); // -1
    CHECK(sc.conj == mi({1, 1}, 5));

    sc = multiindex_sign_conj(mi({2, 0}, 5), 1);
    CHECK(sc.sign.v == 1);
    CHECK(sc.conj == mi({0, 2}, 5));

    sc = multiindex_sign_conj(mi({0, 0, 3, 0}, 5), 2);
    CHECK(sc.sign.v == 4);
    CHECK(sc.conj == mi({3, 0, 0, 0}, 5));

    CHECK_THROWS_AS(multiindex_sign_conj(mi({1, 2, 3}, 5), 1), std::invalid_argument);

    // conj is an involution and sign(conj a)*sign(a) = (-1)^{|a|}.
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        u32 p = 5, m = 2;
        std::uniform_int_distribution<u32> d(0, p - 1);
        std::vector<u32> e(2 * m);
        for (auto& x : e) x = d(rng);
        MultiIndex a(e, p);
        auto s1 = multiindex_sign_conj(a, m);
        auto s2 = multiindex_sign_conj(s1.conj, m);
        CHECK(s2.conj == a);
        Fp expected = a.degree() % 2 == 0 ? Fp(1, p) : Fp(-1, p);
        CHECK(s1.sign * s2.sign == expected);
    }
}

TEST_CASE("multi-index rank round trip") {
    for (u32 p : {5u, 7u})
        for (u64 r = 0; r < monomial_count(3, p); ++r)
            CHECK(MultiIndex::from_rank(r, 3, p).rank() == r);
}

TEST_CASE("truncated polynomial multiplication") {
    u32 p = 5, n = 2;
    auto x1 = TruncatedPolynomial::variable(n, 1, p);
    auto x2 = TruncatedPolynomial::variable(n, 2, p);

    // x1^(p-1) * x1 = 0 by truncation
    auto xt = TruncatedPolynomial::monomial(mi({p - 1, 0}, p));
    CHECK(poly_mul(xt, x1).is_zero());

    // f * 1 = f
    std::mt19937_64 rng(99);
    auto f = random_poly(n, p, rng);
    CHECK(poly_mul(f, TruncatedPolynomial::one(n, p)) == f);

    // (x1+x2)^2 = x1^2 + 2 x1 x2 + x2^2, from integer expansion then reduction
    auto s = x1 + x2;
    auto sq = poly_mul(s, s);
    TruncatedPolynomial expected(n, p);
    expected.add_term(mi({2, 0}, p), 1);
    expected.add_term(mi({1, 1}, p), 2);
    expected.add_term(mi({0, 2}, p), 1);
    CHECK(sq == expected);
}

TEST_CASE("partial derivatives") {
    u32 p = 5, n = 2;
    // d1(x1^3) = 3 x1^2
    auto f = TruncatedPolynomial::monomial(mi({3, 0}, p));
    auto d = poly_partial(f, 1);
    CHECK(d == TruncatedPolynomial::monomial(mi({2, 0}, p), 3));

    // d2(x1) = 0
    CHECK(poly_partial(TruncatedPolynomial::variable(n, 1, p), 2).is_zero());

    // d1(x1^(p-1) x2) = -x1^(p-2) x2
    auto g = TruncatedPolynomial::monomial(mi({p - 1, 1}, p));
    CHECK(poly_partial(g, 1) == TruncatedPolynomial::monomial(mi({p - 2, 1}, p), p - 1));

    CHECK_THROWS_AS(poly_partial(g, 3), std::out_of_range);
}

TEST_CASE("algebra laws on random inputs") {
    std::mt19937_64 rng(2024);
    for (int iter = 0; iter < 60; ++iter) {
        u32 p = iter % 2 ? 5 : 7, n = 3;
        auto f = random_poly(n, p, rng), g = random_poly(n, p, rng), h = random_poly(n, p, rng);
        CHECK(poly_mul(f, g) == poly_mul(g, f));
        CHECK(poly_mul(poly_mul(f, g), h) == poly_mul(f, poly_mul(g, h)));
        // Leibniz rule
        for (u32 j = 1; j <= n; ++j)
            CHECK(poly_partial(poly_mul(f, g), j) ==
                  poly_mul(poly_partial(f, j), g) + poly_mul(f, poly_partial(g, j)));
        // mixed partials commute
        CHECK(poly_partial(poly_partial(f, 1), 2) == poly_partial(poly_partial(f, 2), 1));
    }
}
