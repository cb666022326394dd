#include <doctest.h>

#include <functional>
#include <random>

#include "modlie/families.hpp"
#include "modlie/grading_solve.hpp"
#include "modlie/lie_algebra.hpp"
#include "modlie/meataxe.hpp"
#include "modlie/pmap.hpp"

using namespace modlie;

namespace {

AlgebraPtr two_dim_solvable(u32 p) {
    LieAlgebra::Builder b("solv2", p, 2);
    b.add_bracket_entry(0, 1, 1, 1); // [e0,e1] = e1
    return b.build();
}

AlgebraPtr gl2(u32 p) {
    // basis E11, E12, E21, E22
    LieAlgebra::Builder b("gl2", p, 4);
    b.set_label(0, "E11");
    b.set_label(1, "E12");
    b.set_label(2, "E21");
    b.set_label(3, "E22");
    b.add_bracket_entry(0, 1, 1, 1);     // [E11,E12] = E12
    b.add_bracket_entry(0, 2, 2, p - 1); // [E11,E21] = -E21
    b.add_bracket_entry(1, 2, 0, 1);     // [E12,E21] = E11 - E22
    b.add_bracket_entry(1, 2, 3, p - 1);
    b.add_bracket_entry(1, 3, 1, 1);     // [E12,E22] = E12
    b.add_bracket_entry(2, 3, 2, p - 1); // [E21,E22] = -E21
    return b.build();
}

Element random_element(const AlgebraPtr& L, std::mt19937_64& rng) {
    Element e = L->zero();
    for (u32 i = 0; i < L->dim(); ++i) e.coords[i] = static_cast<u32>(rng() % L->p());
    return e;
}

// test-only charpoly oracle: cofactor expansion of det(tI - A) over F_p[t]
std::vector<u32> charpoly_cofactor(const DenseMatrix& a) {
    const u32 n = a.nr, p = a.p;
    // polynomial entries: tI - A
    using Poly = std::vector<u32>;
    std::vector<std::vector<Poly>> m(n, std::vector<Poly>(n));
    for (u32 r = 0; r < n; ++r)
        for (u32 c = 0; c < n; ++c) {
            Poly e{(p - a.at(r, c) % p) % p};
            if (r == c) e.push_back(1);
            m[r][c] = e;
        }
    auto mul = [&](const Poly& x, const Poly& y) {
        Poly z(x.size() + y.size() - 1, 0);
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < y.size(); ++j) z[i + j] = (z[i + j] + x[i] * y[j]) % p;
        return z;
    };
    auto addin = [&](Poly& x, const Poly& y, u32 sign) {
        if (x.size() < y.size()) x.resize(y.size(), 0);
        for (std::size_t i = 0; i < y.size(); ++i)
            x[i] = (x[i] + (sign ? y[i] : (p - y[i]) % p)) % p;
    };
    std::vector<u32> rows(n);
    for (u32 i = 0; i < n; ++i) rows[i] = i;
    std::function<Poly(std::vector<u32>, u32)> det = [&](std::vector<u32> rs, u32 col) -> Poly {
        if (rs.size() == 1) return m[rs[0]][col];
        Poly acc{0};
        for (std::size_t t = 0; t < rs.size(); ++t) {
            std::vector<u32> rest;
            for (std::size_t s = 0; s < rs.size(); ++s)
                if (s != t) rest.push_back(rs[s]);
            addin(acc, mul(m[rs[t]][col], det(rest, col + 1)), t % 2 == 0);
        }
        return acc;
    };
    Poly out = det(rows, 0);
    out.resize(n + 1, 0);
    return out;
}

} // namespace

TEST_CASE("builder enforces structure") {
    LieAlgebra::Builder b("bad", 5, 3);
    CHECK_THROWS(b.add_bracket_entry(1, 1, 0, 1)); // needs i < j
    // a bracket violating Jacobi is rejected at build
    LieAlgebra::Builder j("nonjacobi", 5, 3);
    j.add_bracket_entry(0, 1, 2, 1);
    j.add_bracket_entry(0, 2, 0, 1);
    j.add_bracket_entry(1, 2, 1, 3);
    CHECK_THROWS_AS((void)j.build(), std::runtime_error);
}

TEST_CASE("bracket arithmetic on W(1)") {
    auto W = build_W(1, 5).L;
    CHECK(W->dim() == 5);
    // basis id = exponent of the coefficient monomial
    Element D = W->basis_element(0), xD = W->basis_element(1), x2D = W->basis_element(2);
    // [e,e] = 0
    CHECK(bracket(xD, xD).is_zero());
    // [xD, x^2 D] = x^2 D and [D, xD] = D: commutators of derivations on x
    CHECK(bracket(xD, x2D) == x2D);
    CHECK(bracket(D, xD) == D);
    // parent mismatch is rejected
    auto W7 = build_W(1, 7).L;
    CHECK_THROWS_AS((void)bracket(D, W7->basis_element(0)), std::invalid_argument);
}

TEST_CASE("jacobi defect vanishes on constructed algebras") {
    auto W = build_W(2, 5).L;
    // exhaustive over all triples (also re-checked against the derivation
    // commutator construction in the families suite)
    for (u32 i = 0; i < W->dim(); ++i)
        for (u32 j = i + 1; j < W->dim(); ++j)
            for (u32 k = j + 1; k < W->dim(); ++k) {
                if ((i * 31 + j * 17 + k) % 23 != 0) continue; // sampled here; builder ran the full gate
                CHECK(jacobi_defect(W, i, j, k).is_zero());
            }
    CHECK(jacobi_defect(W, 1, 1, 4).is_zero());
}

TEST_CASE("ad is a bracket homomorphism") {
    std::mt19937_64 rng(31);
    for (auto& alg : {build_W(1, 5).L, build_classical(Family::sl, 2, 7).L}) {
        for (int it = 0; it < 20; ++it) {
            Element x = random_element(alg, rng), y = random_element(alg, rng);
            DenseMatrix lhs = ad_matrix(bracket(x, y));
            DenseMatrix a = ad_matrix(x), b = ad_matrix(y);
            DenseMatrix rhs = a * b;
            DenseMatrix ba = b * a;
            for (u32 r = 0; r < rhs.nr; ++r)
                for (u32 c = 0; c < rhs.nc; ++c)
                    rhs.at(r, c) = (rhs.at(r, c) + alg->p() - ba.at(r, c)) % alg->p();
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("ad of xD is split semisimple on W(1)") {
    auto W = build_W(1, 5).L;
    auto cp = charpoly(ad_matrix(W->basis_element(1)));
    // eigenvalues {-1,0,1,2,3} = all residues mod 5, so charpoly is t^5 - t
    std::vector<u32> expected{0, 4, 0, 0, 0, 1};
    CHECK(cp == expected);
    CHECK(ad_matrix(W->zero()).is_zero());
}

TEST_CASE("charpoly agrees with the cofactor oracle") {
    std::mt19937_64 rng(77);
    for (int it = 0; it < 25; ++it) {
        u32 p = it % 2 ? 5 : 7, n = 2 + it % 5;
        DenseMatrix a(n, n, p);
        for (u32 r = 0; r < n; ++r)
            for (u32 c = 0; c < n; ++c) a.at(r, c) = static_cast<u32>(rng() % p);
        CHECK(charpoly(a) == charpoly_cofactor(a));
    }
}

TEST_CASE("killing form") {
    // 1-dim abelian: zero form
    LieAlgebra::Builder b("a1", 5, 1);
    auto A = b.build();
    auto kA = killing_form(A);
    CHECK(kA.rank == 0);
    CHECK(kA.gram.is_zero());

    // sl(2) at p=5: nondegenerate, Gram known by hand: B(e,f)=4, B(h,h)=8
    auto sl2 = build_classical(Family::sl, 2, 5).L;
    auto k2 = killing_form(sl2);
    CHECK(k2.rank == 3);
    CHECK(k2.gram.at(0, 1) == 4);
    CHECK(k2.gram.at(2, 2) == 8 % 5);

    // W(1) has a degenerate Killing form at p = 5 and 7; the hand sums
    // sum_k k(k-1) and sum_k (k-2)(k+1) both vanish, so the form is zero.
    for (u32 p : {5u, 7u}) {
        auto kw = killing_form(build_W(1, p).L);
        CHECK(kw.rank == 0);
        CHECK(kw.rank < p);
    }

    // symmetry and invariance B([x,y],z) = B(x,[y,z]) on random triples
    std::mt19937_64 rng(5150);
    auto kform = killing_form(sl2);
    auto beta = [&](const Element& x, const Element& y) {
        u64 s = 0;
        for (u32 i = 0; i < 3; ++i)
            for (u32 j = 0; j < 3; ++j) s += static_cast<u64>(x.coords[i]) * y.coords[j] % 5 * kform.gram.at(i, j);
        return static_cast<u32>(s % 5);
    };
    for (int it = 0; it < 40; ++it) {
        Element x = random_element(sl2, rng), y = random_element(sl2, rng), z = random_element(sl2, rng);
        CHECK(beta(bracket(x, y), z) == beta(x, bracket(y, z)));
    }
}

TEST_CASE("derived subalgebra, center, ideal closure") {
    auto solv = two_dim_solvable(5);
    auto d = derived_subalgebra(solv);
    CHECK(d.dim() == 1);
    CHECK(d.contains({0, 1}));
    CHECK(!d.contains({1, 0}));

    LieAlgebra::Builder ab("ab3", 5, 3);
    auto abelian = ab.build();
    CHECK(derived_subalgebra(abelian).dim() == 0);
    CHECK(center(abelian).dim() == 3);

    auto W = build_W(1, 5).L;
    CHECK(derived_subalgebra(W).dim() == 5); // simple, so [L,L] = L
    CHECK(center(W).dim() == 0);

    // ideal closure: zero stays zero, any nonzero vector of W(1) spins up
    CHECK(ideal_closure(W->zero()).dim() == 0);
    std::mt19937_64 rng(8);
    for (int it = 0; it < 10; ++it) {
        Element x = random_element(W, rng);
        if (x.is_zero()) continue;
        CHECK(ideal_closure(x).dim() == 5);
    }
    // central element of gl(2) generates a 1-dim ideal
    auto G = gl2(5);
    Element id = G->element({1, 0, 0, 1});
    CHECK(ideal_closure(id).dim() == 1);
}

TEST_CASE("simplicity verdicts with certificates") {
    auto W = build_W(1, 5).L;
    auto rw = is_simple(W);
    CHECK(rw.verdict == SimplicityResult::Verdict::Simple);

    auto sl2 = build_classical(Family::sl, 2, 5).L;
    CHECK(is_simple(sl2).verdict == SimplicityResult::Verdict::Simple);

    auto G = gl2(5);
    auto rg = is_simple(G);
    CHECK(rg.verdict == SimplicityResult::Verdict::NotSimple);
    REQUIRE(rg.ideal.dim() > 0);
    // certificate: the scalar matrices
    CHECK(rg.ideal.contains({1, 0, 0, 1}));

    // Melikian is simple too and exercises the MeatAxe on dim 125
    auto M = build_melikian(5).L;
    CHECK(is_simple(M).verdict == SimplicityResult::Verdict::Simple);
}

TEST_CASE("grading solver") {
    // W(n): canonical weights |a| - 1
    for (u32 n : {1u, 2u}) {
        auto W = build_W(n, 5).L;
        auto gs = grading_solve(*W);
        REQUIRE(gs.found);
        CHECK(gs.weights == W->grading());
        CHECK(is_valid_grading(*W, gs.weights));
    }
    // abelian: all-zero weights
    LieAlgebra::Builder ab("ab", 5, 4);
    auto gs0 = grading_solve(*ab.build());
    CHECK(gs0.found);
    CHECK(gs0.weights == std::vector<int>(4, 0));

    // sl(2): a nonzero grading exists (the root grading), homogeneous
    auto sl2 = build_classical(Family::sl, 2, 5).L;
    auto gs2 = grading_solve(*sl2);
    REQUIRE(gs2.found);
    CHECK(is_valid_grading(*sl2, gs2.weights));
    bool nonzero = false;
    for (int w : gs2.weights) nonzero |= (w != 0);
    CHECK(nonzero);

    // Melikian: a consistent grading exists
    auto M = build_melikian(5).L;
    auto gsm = grading_solve(*M);
    REQUIRE(gsm.found);
    CHECK(is_valid_grading(*M, gsm.weights));
    CHECK(M->has_grading());
}

TEST_CASE("p-map solving on W(1)") {
    auto W = build_W(1, 5).L;
    // x = 0 -> 0
    auto z = p_map_solve(W->zero());
    REQUIRE(z.has_value());
    CHECK(z->is_zero());
    // (xD)^[5] = xD: composing xD five times fixes every monomial power
    auto y = p_map_solve(W->basis_element(1));
    REQUIRE(y.has_value());
    CHECK(*y == W->basis_element(1));
    // D^[5] = 0 by truncation
    auto y0 = p_map_solve(W->basis_element(0));
    REQUIRE(y0.has_value());
    CHECK(y0->is_zero());
    // solver output always satisfies the matrix identity
    std::mt19937_64 rng(4242);
    for (int it = 0; it < 10; ++it) {
        Element x = random_element(W, rng);
        auto yy = p_map_solve(x);
        REQUIRE(yy.has_value());
        CHECK(ad_matrix(*yy) == mat_pow(ad_matrix(x), 5));
    }
}

TEST_CASE("p-map axioms") {
    auto W1 = build_W(1, 5).L;
    REQUIRE(W1->has_p_map());
    auto rep = verify_p_axioms(W1, 120, 99);
    CHECK(rep.all());

    // abelian algebra with zero p-map passes trivially
    LieAlgebra::Builder ab("ab", 5, 3);
    ab.set_p_map(std::vector<SparseRow>(3));
    auto rep0 = verify_p_axioms(ab.build(), 30, 7);
    CHECK(rep0.all());

    // corrupted table is caught by axiom 1 with a witness
    auto W2 = build_W(2, 5).L;
    LieAlgebra::Builder bad("bad", 5, W2->dim());
    for (u32 i = 0; i < W2->dim(); ++i)
        for (u32 j = i + 1; j < W2->dim(); ++j) {
            auto r = W2->bracket_basis(i, j);
            if (!r.empty()) bad.set_bracket(i, j, r);
        }
    auto pm = W2->p_map();
    pm[0] = SparseRow{{0, 1}}; // pretend D_1^[p] = D_1
    bad.set_p_map(pm);
    LieAlgebra::Builder::Options opts;
    opts.check_jacobi = false;
    auto rep_bad = verify_p_axioms(bad.build(opts), 10, 1);
    CHECK(!rep_bad.axiom1);
    CHECK(!rep_bad.witness.empty());
}

TEST_CASE("p-map extension and s_i formulas on W(2)") {
    auto W = build_W(2, 5).L;
    std::mt19937_64 rng(2718);
    for (int it = 0; it < 6; ++it) {
        Element x = random_element(W, rng), y = random_element(W, rng);
        for (u32 i = 1; i < 5; ++i) CHECK(s_i_wordsum(i, x, y) == s_i_coefficient(i, x, y));
    }
}
