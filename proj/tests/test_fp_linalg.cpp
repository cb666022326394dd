#include <doctest.h>

#include <random>

#include "modlie/fp_linalg.hpp"

using namespace modlie;

namespace {

std::vector<SparseRow> random_rows(u32 nrows, u32 ncols, u32 p, double density, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<u32> val(1, p - 1);
    std::vector<SparseRow> rows(nrows);
    for (auto& r : rows)
        for (u32 c = 0; c < ncols; ++c)
            if (u(rng) < density) r.push_back({c, val(rng)});
    return rows;
}

std::vector<std::vector<u32>> densify(const std::vector<SparseRow>& rows, u32 ncols) {
    std::vector<std::vector<u32>> m(rows.size(), std::vector<u32>(ncols, 0));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (const auto& e : rows[r]) m[r][e.col] = e.val;
    return m;
}

} // namespace

TEST_CASE("streaming echelon rank matches dense elimination") {
    std::mt19937_64 rng(417);
    for (int iter = 0; iter < 80; ++iter) {
        u32 p = iter % 2 ? 5 : 7;
        u32 nr = 1 + rng() % 40, nc = 1 + rng() % 30;
        auto rows = random_rows(nr, nc, p, 0.25, rng);
        auto dense = densify(rows, nc);
        CHECK(sparse_rank(rows, nc, p) == dense_rank(dense, p));
    }
}

TEST_CASE("kernel vectors annihilate every row") {
    std::mt19937_64 rng(90210);
    for (int iter = 0; iter < 40; ++iter) {
        u32 p = 5, nc = 12 + rng() % 20;
        auto rows = random_rows(30, nc, p, 0.2, rng);
        StreamEchelon ech(nc, p);
        for (const auto& r : rows) ech.insert(r);
        auto K = ech.kernel();
        CHECK(K.size() == nc - ech.rank());
        for (const auto& v : K)
            for (const auto& r : rows) {
                u64 dot = 0;
                for (const auto& e : r) dot += static_cast<u64>(e.val) * v[e.col];
                CHECK(dot % p == 0);
            }
    }
}

TEST_CASE("augmented solve and inconsistency certificates") {
    u32 p = 7;
    std::mt19937_64 rng(5);
    for (int iter = 0; iter < 50; ++iter) {
        u32 nc = 6 + rng() % 10, nr = nc + 4;
        auto A = random_rows(nr, nc, p, 0.35, rng);
        // consistent system: b = A * x0
        std::vector<u32> x0(nc);
        for (auto& v : x0) v = rng() % p;
        StreamEchelon ech(nc + 1, p, 1);
        for (const auto& r : A) {
            u64 b = 0;
            for (const auto& e : r) b += static_cast<u64>(e.val) * x0[e.col];
            SparseRow row = r;
            if (b % p) row.push_back({nc, static_cast<u32>(b % p)});
            ech.insert(row);
        }
        CHECK(ech.inconsistency_rows().empty());
        auto x = ech.solve(0);
        // verify A x = b
        for (const auto& r : A) {
            u64 lhs = 0, rhs = 0;
            for (const auto& e : r) {
                lhs += static_cast<u64>(e.val) * x[e.col];
                rhs += static_cast<u64>(e.val) * x0[e.col];
            }
            CHECK(lhs % p == rhs % p);
        }
    }

    // inconsistent: 0 = 1 hidden behind row operations, with provenance
    StreamEchelon ech(3, p, 1, true);
    ech.insert({{0, 1}, {1, 2}});               // row 0: x0 + 2 x1 = 0
    ech.insert({{0, 1}, {1, 2}, {2, 1}});       // row 1: x0 + 2 x1 = -1  (b entry col 2 = 1)
    REQUIRE(ech.inconsistency_rows().size() == 1);
    auto cert = ech.provenance_of_inconsistency(0);
    // certificate: combination of input rows whose main part vanishes
    REQUIRE(cert.size() == 2);
    u32 y0 = 0, y1 = 0;
    for (auto& e : cert) (e.col == 0 ? y0 : y1) = e.val;
    CHECK(y1 % p != 0);                // hits the b column (b = (0, 1))
    CHECK((y0 * 1 + y1 * 1) % p == 0); // annihilates column x0
    CHECK((y0 * 2 + y1 * 2) % p == 0); // annihilates column x1
}

TEST_CASE("dense matrix algebra") {
    DenseMatrix a(2, 2, 5);
    a.at(0, 0) = 1;
    a.at(0, 1) = 2;
    a.at(1, 0) = 3;
    a.at(1, 1) = 4;
    auto sq = a * a;
    CHECK(sq.at(0, 0) == (1 * 1 + 2 * 3) % 5);
    CHECK(sq.at(1, 1) == (3 * 2 + 4 * 4) % 5);
    CHECK(mat_pow(a, 0) == DenseMatrix::identity(2, 5));
    CHECK(mat_pow(a, 3) == a * a * a);
    CHECK(dense_rank(a) == 2);
}
