#include "modlie/cocycles.hpp"

#include <functional>
#include <random>
#include <set>
#include <stdexcept>

namespace modlie {

namespace {

u32 inv_factorial_product(u32 i, u32 p) {
    // 1 / (i! (p-i)!) mod p
    u64 f = 1;
    for (u32 t = 2; t <= i; ++t) f = f * t % p;
    for (u32 t = 2; t <= p - i; ++t) f = f * t % p;
    return inv_mod(static_cast<u32>(f), p);
}

void check_leibniz(const AlgebraPtr& L, const DenseMatrix& D, u64 seed) {
    std::mt19937_64 rng(seed);
    const u32 p = L->p();
    for (int it = 0; it < 20; ++it) {
        Element x = L->zero(), y = L->zero();
        for (auto& v : x.coords) v = static_cast<u32>(rng() % p);
        for (auto& v : y.coords) v = static_cast<u32>(rng() % p);
        Element lhs{L, D.apply(bracket(x, y).coords)};
        Element rhs = add(Element{L, L->bracket_coords(D.apply(x.coords), y.coords)},
                          Element{L, L->bracket_coords(x.coords, D.apply(y.coords))});
        if (!(lhs == rhs)) throw std::invalid_argument("squaring: matrix is not a derivation");
    }
}

Cochain squaring_impl(const AlgebraPtr& L, const DenseMatrix& D) {
    const u32 dim = L->dim(), p = L->p();
    // columns of D^t for t = 1..p-1, kept sparse
    std::vector<std::vector<SparseRow>> pow(p); // pow[t][b]
    pow[1].resize(dim);
    for (u32 b = 0; b < dim; ++b)
        for (u32 r = 0; r < dim; ++r)
            if (D.at(r, b)) pow[1][b].push_back({r, D.at(r, b)});
    for (u32 t = 2; t < p; ++t) {
        pow[t].resize(dim);
        for (u32 b = 0; b < dim; ++b) {
            SparseRow acc;
            for (const auto& e : pow[t - 1][b])
                for (const auto& f : pow[1][e.col]) acc.push_back({f.col, f.val * e.val % p});
            normalize_row(acc, p);
            pow[t][b] = std::move(acc);
        }
    }
    std::vector<u32> coeff(p);
    for (u32 t = 1; t < p; ++t) coeff[t] = inv_factorial_product(t, p);

    Cochain out(L, 2);
    std::vector<u32> xa(dim), xb(dim);
    for (u32 b1 = 0; b1 < dim; ++b1)
        for (u32 b2 = b1 + 1; b2 < dim; ++b2) {
            std::vector<u32> acc(dim, 0);
            bool any = false;
            for (u32 t = 1; t < p; ++t) {
                const SparseRow& u = pow[t][b1];
                const SparseRow& v = pow[p - t][b2];
                if (u.empty() || v.empty()) continue;
                for (const auto& eu : u)
                    for (const auto& ev : v) {
                        if (eu.col == ev.col) continue;
                        u32 c = eu.val * ev.val % p * coeff[t] % p;
                        if (!c) continue;
                        SparseRow br = L->bracket_basis(eu.col, ev.col);
                        for (const auto& e : br) {
                            acc[e.col] = (acc[e.col] + c * e.val) % p;
                            any = true;
                        }
                    }
            }
            if (!any) continue;
            for (u32 k = 0; k < dim; ++k)
                if (acc[k]) out.add(cochain_id2(b1, b2, k, dim), acc[k]);
        }
    out.finalize();
    return out;
}

} // namespace

Cochain squaring(const AlgebraPtr& L, const DenseMatrix& D, u64 seed) {
    if (D.nr != L->dim() || D.nc != L->dim() || D.p != L->p())
        throw std::invalid_argument("squaring: matrix shape mismatch");
    check_leibniz(L, D, seed);
    return squaring_impl(L, D);
}

Cochain squaring(const Element& gamma) { return squaring_impl(gamma.parent, ad_matrix(gamma)); }

Cochain theta_cocycle(const BuiltAlgebra& S) {
    if (S.spec.family != Family::S) throw std::invalid_argument("theta_cocycle: S family required");
    const u32 n = S.spec.n, p = S.spec.p;
    Cochain out(S.L, 2);
    MultiIndex tau = MultiIndex::top(n, p);
    for (u32 i = 1; i <= n; ++i)
        for (u32 j = i + 1; j <= n; ++j) {
            SparseRow w = d_ij(TruncatedPolynomial::monomial(tau), i, j).w_coords();
            auto coords = S.span->express(w);
            if (!coords) throw std::runtime_error("theta_cocycle: D_ij(x^tau) left the span");
            for (u32 k = 0; k < coords->size(); ++k)
                if ((*coords)[k]) out.add2(i - 1, j - 1, k, (*coords)[k]);
        }
    out.finalize();
    return out;
}

namespace {

struct HMeta {
    u32 n, p, m;
    std::vector<u64> step;
    const BuiltAlgebra& H;

    explicit HMeta(const BuiltAlgebra& built) : H(built) {
        if (built.spec.family != Family::H) throw std::invalid_argument("H family required");
        n = built.spec.n;
        p = built.spec.p;
        m = built.m;
        step.assign(n + 1, 1);
        for (u32 i = 1; i <= n; ++i) step[i] = step[i - 1] * p;
    }
    MultiIndex mono(u32 idx) const { return MultiIndex::from_rank(H.index_to_rank[idx], n, p); }
    // D_H image of a monomial, as basis index. The excluded targets x^0 and
    // x^sigma contribute zero: the cochain values are taken through the
    // projection onto the basis monomials, and the computational cocycle
    // check downstream is the arbiter of that reading.
    long target_of(const MultiIndex& a) const {
        u64 r = a.rank();
        if (r == 0) return -1;
        return H.rank_to_index[r];
    }
};

} // namespace

Cochain pi_ij_cocycle(const BuiltAlgebra& Hb, u32 i, u32 j) {
    HMeta H(Hb);
    if (H.n < 4) throw std::invalid_argument("pi_ij_cocycle: n >= 4 required");
    if (!(i < j) || j == conj_index(i, H.m)) throw std::invalid_argument("pi_ij_cocycle: need i < j, j != i'");
    const u32 p = H.p, dim = Hb.L->dim();
    const u32 ip = conj_index(i, H.m), jp = conj_index(j, H.m);

    Cochain out(Hb.L, 2);
    for (u32 ai = 0; ai < dim; ++ai) {
        MultiIndex a = H.mono(ai);
        if (a[i - 1] == 0 && a[j - 1] == 0) continue;
        for (u32 bi = ai + 1; bi < dim; ++bi) {
            MultiIndex b = H.mono(bi);
            // h = x_{i'}^{p-1} x_{j'}^{p-1} (D_i(x^a) D_j(x^b) - D_i(x^b) D_j(x^a)),
            // assembled as a polynomial first: the two terms may cancel on a
            // shared monomial (they always do on the top one)
            TruncatedPolynomial h(H.n, p);
            auto term = [&](const MultiIndex& u, const MultiIndex& v, bool positive) {
                u32 c = u[i - 1] * v[j - 1] % p;
                if (!c) return;
                std::vector<u32> e(H.n);
                for (u32 t = 0; t < H.n; ++t) {
                    u32 s = u[t] + v[t];
                    if (t == i - 1 || t == j - 1) s -= 1;
                    if (t == ip - 1 || t == jp - 1) s += p - 1;
                    if (s >= p) return;
                    e[t] = s;
                }
                h.add_term(MultiIndex(e, p), positive ? c : (p - c) % p);
            };
            term(a, b, true);
            term(b, a, false);
            for (auto [r, c] : h.terms()) {
                long t = H.target_of(MultiIndex::from_rank(r, H.n, p));
                if (t >= 0) out.add2(ai, bi, static_cast<u32>(t), c);
            }
        }
    }
    out.finalize();
    return out;
}

Cochain pi_i_cocycle(const BuiltAlgebra& Hb, u32 i) {
    HMeta H(Hb);
    if (H.n < 4) throw std::invalid_argument("pi_i_cocycle: n >= 4 required");
    if (i < 1 || i > H.m) throw std::invalid_argument("pi_i_cocycle: 1 <= i <= m required");
    const u32 p = H.p, dim = Hb.L->dim();
    const u32 ip = conj_index(i, H.m);

    Cochain out(Hb.L, 2);
    std::set<std::pair<u32, u32>> clause1_pairs;

    // clause 1 on ordered pairs (c has an x_i factor, d has an x_{i'} factor)
    for (u32 ci = 0; ci < dim; ++ci) {
        MultiIndex c = H.mono(ci);
        if (c[i - 1] == 0) continue;
        for (u32 di = 0; di < dim; ++di) {
            if (di == ci) continue;
            MultiIndex d = H.mono(di);
            if (d[ip - 1] == 0) continue;
            // value = D_H(x^{(c - e_i) + (d - e_i') + (p-1)(e_i + e_i')})
            std::vector<u32> e(H.n);
            bool ok = true;
            for (u32 t = 0; t < H.n && ok; ++t) {
                u32 s = c[t] + d[t];
                if (t == i - 1 || t == ip - 1) s += p - 2; // -1 for the factor, +(p-1)
                if (s >= p) ok = false;
                else e[t] = s;
            }
            if (!ok) continue;
            long tgt = H.target_of(MultiIndex(e, p));
            if (tgt < 0) continue;
            out.add2(ci, di, static_cast<u32>(tgt), 1);
            clause1_pairs.insert({std::min(ci, di), std::max(ci, di)});
        }
    }

    // clause 2: pairs (x_k, x^{sigma - (p-1)e_i - (p-1)e_i'})
    std::vector<u32> Ee(H.n, p - 1);
    Ee[i - 1] = 0;
    Ee[ip - 1] = 0;
    long Eidx = Hb.rank_to_index[MultiIndex(Ee, p).rank()];
    if (Eidx < 0) throw std::runtime_error("pi_i_cocycle: clause-2 argument not a basis monomial");
    for (u32 k = 1; k <= H.n; ++k) {
        long kidx = Hb.rank_to_index[MultiIndex::unit(H.n, k, p).rank()];
        if (kidx < 0) throw std::runtime_error("pi_i_cocycle: x_k not a basis monomial");
        std::vector<u32> se(H.n, p - 1);
        se[conj_index(k, H.m) - 1] = p - 2;
        long tgt = H.target_of(MultiIndex(se, p));
        if (tgt < 0) continue;
        u32 coeff = half_sign(k, H.m) > 0 ? p - 1 : 1; // -sigma(k)
        auto key = std::make_pair(std::min<u32>(kidx, Eidx), std::max<u32>(kidx, Eidx));
        if (clause1_pairs.count(key))
            throw std::runtime_error("pi_i_cocycle: clause shapes overlap on a basis pair");
        out.add2(static_cast<u32>(kidx), static_cast<u32>(Eidx), static_cast<u32>(tgt), coeff);
    }
    out.finalize();
    return out;
}

Cochain phi_cocycle(const BuiltAlgebra& Hb) {
    HMeta H(Hb);
    const u32 p = H.p, dim = Hb.L->dim(), n = H.n, m = H.m;

    // all delta with |delta| = 3
    std::vector<MultiIndex> deltas;
    {
        std::vector<u32> e(n, 0);
        std::function<void(u32, u32)> rec = [&](u32 pos, u32 left) {
            if (pos == n) {
                if (left == 0) deltas.emplace_back(e, p);
                return;
            }
            for (u32 v = 0; v <= std::min(left, p - 1); ++v) {
                e[pos] = v;
                rec(pos + 1, left - v);
            }
            e[pos] = 0;
        };
        rec(0, 3);
    }

    Cochain out(Hb.L, 2);
    for (u32 ai = 0; ai < dim; ++ai) {
        MultiIndex a = H.mono(ai);
        for (u32 bi = ai + 1; bi < dim; ++bi) {
            MultiIndex b = H.mono(bi);
            MultiIndex bhat = multiindex_sign_conj(b, m).conj;
            SparseRow val;
            for (const auto& d : deltas) {
                if (!d.leq(a) || !d.leq(bhat)) continue;
                auto sc = multiindex_sign_conj(d, m);
                // coeff = binom(a,d) binom(b, hat d) sigma(d) d!
                u32 c = multiindex_binom(a, d).v;
                if (!c) continue;
                c = c * multiindex_binom(b, sc.conj).v % p;
                if (!c) continue;
                c = c * sc.sign.v % p * d.factorial_mod().v % p;
                if (!c) continue;
                // target exponent (a - d) + (b - hat d): the cubic term of the
                // Moyal-type expansion of the Poisson bracket. With this
                // exponent the sum is antisymmetric under the (a,b) swap and
                // passes the cocycle check; overflowing slots are truncated.
                bool ok = true;
                std::vector<u32> e(n);
                for (u32 t = 0; t < n && ok; ++t) {
                    long s = static_cast<long>(a[t]) + b[t] - d[t] - sc.conj[t];
                    if (s < 0 || s >= static_cast<long>(p)) ok = false;
                    else e[t] = static_cast<u32>(s);
                }
                if (!ok) continue;
                u64 r = MultiIndex(e, p).rank();
                if (r == 0 || Hb.rank_to_index[r] < 0) continue; // excluded targets drop
                val.push_back({static_cast<u32>(Hb.rank_to_index[r]), c});
            }
            normalize_row(val, p);
            for (const auto& e : val) out.add2(ai, bi, e.col, e.val);
        }
    }
    out.finalize();
    return out;
}

std::vector<NamedCochain> theorem_cocycles(const BuiltAlgebra& built) {
    std::vector<NamedCochain> out;
    const auto& L = built.L;
    const u32 n = built.spec.n, p = built.spec.p;
    switch (built.spec.family) {
        case Family::W: {
            for (u32 i = 1; i <= n; ++i)
                out.push_back({"Sq(D" + std::to_string(i) + ")",
                               squaring(L->basis_element(w_basis_index(n, p, i, 0)))});
            break;
        }
        case Family::S: {
            for (u32 i = 1; i <= n; ++i)
                out.push_back({"Sq(D" + std::to_string(i) + ")", squaring(L->basis_element(i - 1))});
            out.push_back({"Theta", theta_cocycle(built)});
            break;
        }
        case Family::K: {
            const u32 m = built.m;
            for (u32 i = 1; i <= 2 * m; ++i) {
                long idx = built.rank_to_index[MultiIndex::unit(n, i, p).rank()];
                out.push_back({"Sq(DK(x" + std::to_string(i) + "))",
                               squaring(L->basis_element(static_cast<u32>(idx)))});
            }
            long one = built.rank_to_index[0];
            out.push_back({"Sq(DK(1))", squaring(L->basis_element(static_cast<u32>(one)))});
            break;
        }
        case Family::H: {
            for (u32 i = 1; i <= n; ++i) {
                long idx = built.rank_to_index[MultiIndex::unit(n, i, p).rank()];
                out.push_back({"Sq(DH(x" + std::to_string(i) + "))",
                               squaring(L->basis_element(static_cast<u32>(idx)))});
            }
            if (n >= 4) {
                for (u32 i = 1; i <= n; ++i)
                    for (u32 j = i + 1; j <= n; ++j) {
                        if (j == conj_index(i, built.m)) continue;
                        out.push_back({"Pi_" + std::to_string(i) + std::to_string(j),
                                       pi_ij_cocycle(built, i, j)});
                    }
                for (u32 i = 1; i <= built.m; ++i)
                    out.push_back({"Pi_" + std::to_string(i), pi_i_cocycle(built, i)});
            }
            out.push_back({"Phi", phi_cocycle(built)});
            break;
        }
        case Family::M: {
            const u64 np = monomial_count(2, p);
            out.push_back({"Sq(1)", squaring(L->basis_element(0))});
            for (u32 j = 1; j <= 2; ++j)
                out.push_back({"Sq(D" + std::to_string(j) + ")",
                               squaring(L->basis_element(static_cast<u32>(np + (j - 1) * np)))});
            for (u32 j = 1; j <= 2; ++j)
                out.push_back({"Sq(~D" + std::to_string(j) + ")",
                               squaring(L->basis_element(static_cast<u32>(3 * np + (j - 1) * np)))});
            break;
        }
        case Family::sl:
        case Family::psl: break; // rigid controls list no classes
    }
    return out;
}

} // namespace modlie
