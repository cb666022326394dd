#include "modlie/meataxe.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace modlie {

namespace {

using Poly = std::vector<u32>; // ascending coefficients

void poly_trim(Poly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

int poly_deg(const Poly& f) { return static_cast<int>(f.size()) - 1; }

Poly poly_mul_fp(const Poly& a, const Poly& b, u32 p) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    }
    return c;
}

// remainder of a mod f (f monic)
Poly poly_rem(Poly a, const Poly& f, u32 p) {
    poly_trim(a);
    const int df = poly_deg(f);
    while (poly_deg(a) >= df) {
        u32 lead = a.back();
        std::size_t shift = a.size() - f.size();
        if (lead)
            for (std::size_t i = 0; i < f.size(); ++i)
                a[shift + i] = (a[shift + i] + (p - lead) * f[i]) % p;
        a.pop_back();
        poly_trim(a);
    }
    return a;
}

Poly poly_gcd(Poly a, Poly b, u32 p) {
    poly_trim(a);
    poly_trim(b);
    while (!b.empty()) {
        // make b monic for the remainder step
        u32 inv = inv_mod(b.back(), p);
        if (inv != 1)
            for (auto& c : b) c = c * inv % p;
        Poly r = poly_rem(a, b, p);
        a.swap(b);
        b.swap(r);
    }
    if (!a.empty()) {
        u32 inv = inv_mod(a.back(), p);
        if (inv != 1)
            for (auto& c : a) c = c * inv % p;
    }
    return a;
}

Poly poly_powmod(Poly base, u64 e, const Poly& f, u32 p) {
    Poly acc{1};
    base = poly_rem(std::move(base), f, p);
    while (e) {
        if (e & 1) acc = poly_rem(poly_mul_fp(acc, base, p), f, p);
        base = poly_rem(poly_mul_fp(base, base, p), f, p);
        e >>= 1;
    }
    return acc;
}

Poly poly_derivative(const Poly& f, u32 p) {
    Poly d;
    for (std::size_t i = 1; i < f.size(); ++i) d.push_back(static_cast<u32>(i % p) * f[i] % p);
    poly_trim(d);
    return d;
}

// f = g(x^p) -> g, using c^(1/p) = c over the prime field
Poly poly_pth_root(const Poly& f, u32 p) {
    Poly g;
    for (std::size_t i = 0; i < f.size(); i += p) g.push_back(f[i]);
    return g;
}

void squarefree_parts(Poly f, u32 p, std::vector<Poly>& out) {
    poly_trim(f);
    if (poly_deg(f) <= 0) return;
    Poly d = poly_derivative(f, p);
    if (d.empty()) {
        squarefree_parts(poly_pth_root(f, p), p, out);
        return;
    }
    Poly g = poly_gcd(f, d, p);
    if (poly_deg(g) == 0) {
        out.push_back(f);
        return;
    }
    // squarefree part f/g and the repeated part g
    // division f = q*g exact
    Poly q;
    {
        Poly a = f;
        poly_trim(a);
        q.assign(a.size() - g.size() + 1, 0);
        while (poly_deg(a) >= poly_deg(g) && !a.empty()) {
            u32 lead = a.back() * inv_mod(g.back(), p) % p;
            std::size_t shift = a.size() - g.size();
            q[shift] = lead;
            for (std::size_t i = 0; i < g.size(); ++i) a[shift + i] = (a[shift + i] + (p - lead) * g[i] % p) % p;
            poly_trim(a);
        }
    }
    out.push_back(q);
    squarefree_parts(g, p, out);
}

void equal_degree_split(const Poly& f, u32 d, u32 p, std::mt19937_64& rng, std::vector<Poly>& out) {
    if (poly_deg(f) == static_cast<int>(d)) {
        out.push_back(f);
        return;
    }
    // Cantor-Zassenhaus for odd p
    u64 q = 1;
    for (u32 t = 0; t < d; ++t) q *= p;
    while (true) {
        Poly a(poly_deg(f), 0);
        for (auto& c : a) c = static_cast<u32>(rng() % p);
        poly_trim(a);
        if (poly_deg(a) < 1) continue;
        Poly b = poly_powmod(a, (q - 1) / 2, f, p);
        if (!b.empty()) b[0] = (b[0] + p - 1) % p; // b - 1
        poly_trim(b);
        Poly g = poly_gcd(f, b, p);
        if (poly_deg(g) > 0 && poly_deg(g) < poly_deg(f)) {
            equal_degree_split(g, d, p, rng, out);
            // f / g
            Poly h;
            {
                Poly rem = f;
                h.assign(rem.size() - g.size() + 1, 0);
                while (poly_deg(rem) >= poly_deg(g) && !rem.empty()) {
                    u32 lead = rem.back() * inv_mod(g.back(), p) % p;
                    std::size_t shift = rem.size() - g.size();
                    h[shift] = lead;
                    for (std::size_t i = 0; i < g.size(); ++i)
                        rem[shift + i] = (rem[shift + i] + (p - lead) * g[i] % p) % p;
                    poly_trim(rem);
                }
            }
            equal_degree_split(h, d, p, rng, out);
            return;
        }
    }
}

} // namespace

std::vector<u32> charpoly(const DenseMatrix& m) {
    if (m.nr != m.nc) throw std::invalid_argument("charpoly: square matrix required");
    const u32 n = m.nr, p = m.p;
    if (n == 0) return {1};
    // Hessenberg reduction by similarity
    std::vector<std::vector<u32>> h(n, std::vector<u32>(n));
    for (u32 r = 0; r < n; ++r)
        for (u32 c = 0; c < n; ++c) h[r][c] = m.at(r, c) % p;
    for (u32 c = 0; c + 2 < n; ++c) {
        u32 piv = n;
        for (u32 r = c + 1; r < n; ++r)
            if (h[r][c]) {
                piv = r;
                break;
            }
        if (piv == n) continue;
        if (piv != c + 1) {
            std::swap(h[piv], h[c + 1]);
            for (u32 r = 0; r < n; ++r) std::swap(h[r][piv], h[r][c + 1]);
        }
        u32 inv = inv_mod(h[c + 1][c], p);
        for (u32 r = c + 2; r < n; ++r) {
            if (!h[r][c]) continue;
            u32 f = h[r][c] * inv % p;
            u32 nf = (p - f) % p;
            for (u32 cc = 0; cc < n; ++cc) h[r][cc] = (h[r][cc] + nf * h[c + 1][cc]) % p;
            for (u32 rr = 0; rr < n; ++rr) h[rr][c + 1] = (h[rr][c + 1] + f * h[rr][r]) % p;
        }
    }
    // recurrence over leading principal minors of (x I - H)
    std::vector<Poly> pk(n + 1);
    pk[0] = {1};
    for (u32 k = 1; k <= n; ++k) {
        // p_k = (x - h[k-1][k-1]) p_{k-1} - sum_m h[k-1-m][k-1] (prod subdiag) p_{k-1-m}
        Poly cur(pk[k - 1].size() + 1, 0);
        for (std::size_t i = 0; i < pk[k - 1].size(); ++i) {
            cur[i + 1] = (cur[i + 1] + pk[k - 1][i]) % p;
            cur[i] = (cur[i] + (p - h[k - 1][k - 1] % p) * pk[k - 1][i]) % p;
        }
        u32 prod = 1;
        for (u32 mstep = 1; mstep < k; ++mstep) {
            prod = prod * h[k - mstep][k - mstep - 1] % p; // subdiagonal entries
            if (!prod) break;
            u32 coeff = h[k - 1 - mstep][k - 1] * prod % p;
            if (!coeff) continue;
            u32 nc = (p - coeff) % p;
            const Poly& q = pk[k - 1 - mstep];
            for (std::size_t i = 0; i < q.size(); ++i) cur[i] = (cur[i] + nc * q[i]) % p;
        }
        pk[k] = std::move(cur);
    }
    return pk[n];
}

std::vector<std::vector<u32>> distinct_irreducible_factors(std::vector<u32> f, u32 p, u64 seed) {
    poly_trim(f);
    if (poly_deg(f) < 1) return {};
    u32 inv = inv_mod(f.back(), p);
    if (inv != 1)
        for (auto& c : f) c = c * inv % p;

    std::vector<Poly> sqf;
    squarefree_parts(std::move(f), p, sqf);

    std::mt19937_64 rng(seed);
    std::vector<Poly> irreducibles;
    for (Poly part : sqf) {
        poly_trim(part);
        if (poly_deg(part) < 1) continue;
        // distinct degree decomposition
        Poly xq{0, 1}; // x
        Poly rest = part;
        for (u32 d = 1; poly_deg(rest) >= static_cast<int>(2 * d); ++d) {
            xq = poly_powmod(xq, p, rest, p); // x^(p^d) mod rest
            Poly diff = xq;
            if (diff.size() < 2) diff.resize(2, 0);
            diff[1] = (diff[1] + p - 1) % p;
            poly_trim(diff);
            Poly g = poly_gcd(rest, diff, p);
            if (poly_deg(g) > 0) {
                equal_degree_split(g, d, p, rng, irreducibles);
                // rest /= g
                Poly q;
                Poly rem = rest;
                q.assign(rem.size() - g.size() + 1, 0);
                while (poly_deg(rem) >= poly_deg(g) && !rem.empty()) {
                    u32 lead = rem.back() * inv_mod(g.back(), p) % p;
                    std::size_t shift = rem.size() - g.size();
                    q[shift] = lead;
                    for (std::size_t i = 0; i < g.size(); ++i)
                        rem[shift + i] = (rem[shift + i] + (p - lead) * g[i] % p) % p;
                    poly_trim(rem);
                }
                rest = q;
                poly_trim(rest);
                xq = poly_rem(std::move(xq), rest, p);
            }
        }
        if (poly_deg(rest) >= 1) irreducibles.push_back(rest);
    }
    std::sort(irreducibles.begin(), irreducibles.end(), [](const Poly& a, const Poly& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    irreducibles.erase(std::unique(irreducibles.begin(), irreducibles.end()), irreducibles.end());
    return irreducibles;
}

namespace {

DenseMatrix poly_of_matrix(const Poly& f, const DenseMatrix& a) {
    DenseMatrix acc(a.nr, a.nc, a.p);
    for (std::size_t i = f.size(); i-- > 0;) {
        acc = acc * a;
        if (f[i])
            for (u32 r = 0; r < a.nr; ++r) acc.at(r, r) = (acc.at(r, r) + f[i]) % a.p;
    }
    return acc;
}

std::vector<std::vector<u8>> matrix_kernel(const DenseMatrix& m) {
    StreamEchelon ech(m.nc, m.p);
    for (u32 r = 0; r < m.nr; ++r) {
        SparseRow row;
        for (u32 c = 0; c < m.nc; ++c)
            if (m.at(r, c)) row.push_back({c, m.at(r, c)});
        if (!row.empty()) ech.insert(row);
    }
    return ech.kernel();
}

Subspace spin_transposed(const AlgebraPtr& L, const std::vector<u8>& v0) {
    const u32 n = L->dim(), p = L->p();
    StreamEchelon ech(n, p);
    SparseRow first;
    for (u32 c = 0; c < n; ++c)
        if (v0[c]) first.push_back({c, v0[c]});
    std::vector<SparseRow> work;
    long piv = ech.insert(first);
    if (piv >= 0) work.push_back(ech.pivot_row(static_cast<u32>(piv)));
    while (!work.empty()) {
        SparseRow v = std::move(work.back());
        work.pop_back();
        for (u32 i = 0; i < n; ++i) {
            // (ad e_i)^T v: component j is sum over entries of [e_i, e_j]
            SparseRow w;
            for (u32 j = 0; j < n; ++j) {
                if (i == j) continue;
                u64 s = 0;
                for (const auto& e : L->bracket_basis(i, j))
                    for (const auto& ve : v)
                        if (ve.col == e.col) s += static_cast<u64>(e.val) * ve.val;
                u32 r = static_cast<u32>(s % p);
                if (r) w.push_back({j, r});
            }
            if (w.empty()) continue;
            long np = ech.insert(w);
            if (np >= 0) work.push_back(ech.pivot_row(static_cast<u32>(np)));
        }
    }
    Subspace s{n, p, {}};
    for (u32 c = 0; c < n; ++c)
        if (ech.has_pivot(c)) s.rows.push_back(ech.pivot_row(c));
    return s;
}

} // namespace

SimplicityResult is_simple(const AlgebraPtr& L, u64 seed, u32 budget) {
    const u32 n = L->dim(), p = L->p();
    if (n < 2) throw std::invalid_argument("is_simple: dim >= 2 required");

    SimplicityResult res{SimplicityResult::Verdict::Undecided, Subspace{n, p, {}}, 0};

    Subspace z = center(L);
    if (z.dim() > 0 && z.dim() < n) {
        res.verdict = SimplicityResult::Verdict::NotSimple;
        res.ideal = z;
        return res;
    }
    Subspace der = derived_subalgebra(L);
    if (der.dim() == 0) {
        res.verdict = SimplicityResult::Verdict::NotSimple;
        res.ideal = Subspace{n, p, {SparseRow{{0, 1}}}}; // any line in an abelian algebra
        return res;
    }
    if (der.dim() < n) {
        res.verdict = SimplicityResult::Verdict::NotSimple;
        res.ideal = der;
        return res;
    }

    std::mt19937_64 rng(seed);
    auto random_ad = [&] {
        // dense random elements; homogeneous ones are ad-nilpotent on graded
        // algebras and give useless characteristic polynomials
        Element x = L->zero();
        for (u32 k = 0; k < n; ++k) x.coords[k] = static_cast<u32>(rng() % p);
        return ad_matrix(x);
    };

    for (u32 attempt = 0; attempt < budget; ++attempt) {
        res.attempts_used = attempt + 1;
        DenseMatrix theta = random_ad();
        if (attempt % 2 == 1) theta = theta * random_ad();
        auto factors = distinct_irreducible_factors(charpoly(theta), p, rng());
        for (const auto& g : factors) {
            if (poly_deg(g) > 8) continue; // keep Horner evaluation cheap
            DenseMatrix gt = poly_of_matrix(g, theta);
            auto ker = matrix_kernel(gt);
            if (ker.empty()) continue;
            // spin a kernel vector
            Element w = L->zero();
            for (u32 c = 0; c < n; ++c) w.coords[c] = ker[0][c];
            Subspace spin = ideal_closure(w);
            if (spin.dim() > 0 && spin.dim() < n) {
                res.verdict = SimplicityResult::Verdict::NotSimple;
                res.ideal = spin;
                return res;
            }
            if (ker.size() != static_cast<std::size_t>(poly_deg(g))) continue; // nullity too big to certify
            // dual spin
            DenseMatrix gtt(n, n, p);
            for (u32 r = 0; r < n; ++r)
                for (u32 c = 0; c < n; ++c) gtt.at(c, r) = gt.at(r, c);
            auto kert = matrix_kernel(gtt);
            if (kert.empty()) continue;
            Subspace spint = spin_transposed(L, kert[0]);
            if (spint.dim() == n) {
                res.verdict = SimplicityResult::Verdict::Simple;
                return res;
            }
            // proper transposed spin: its annihilator is a proper ideal
            StreamEchelon ann(n, p);
            for (const auto& r : spint.rows) ann.insert(r);
            auto kv = ann.kernel();
            Subspace ideal{n, p, {}};
            StreamEchelon norm(n, p);
            for (auto& v : kv) {
                SparseRow r;
                for (u32 c = 0; c < n; ++c)
                    if (v[c]) r.push_back({c, v[c]});
                norm.insert(r);
            }
            for (u32 c = 0; c < n; ++c)
                if (norm.has_pivot(c)) ideal.rows.push_back(norm.pivot_row(c));
            if (ideal.dim() > 0 && ideal.dim() < n) {
                res.verdict = SimplicityResult::Verdict::NotSimple;
                res.ideal = ideal;
                return res;
            }
        }
    }
    return res;
}

} // namespace modlie
