#include "modlie/families.hpp"

#include <algorithm>
#include <stdexcept>

#include "modlie/grading_solve.hpp"
#include "modlie/pmap.hpp"

namespace modlie {

std::string family_name(Family f) {
    switch (f) {
        case Family::W: return "W";
        case Family::S: return "S";
        case Family::H: return "H";
        case Family::K: return "K";
        case Family::M: return "M";
        case Family::sl: return "sl";
        case Family::psl: return "psl";
    }
    return "?";
}

std::optional<Family> family_from_string(const std::string& s) {
    if (s == "W" || s == "w") return Family::W;
    if (s == "S" || s == "s") return Family::S;
    if (s == "H" || s == "h") return Family::H;
    if (s == "K" || s == "k") return Family::K;
    if (s == "M" || s == "m") return Family::M;
    if (s == "sl") return Family::sl;
    if (s == "psl") return Family::psl;
    return std::nullopt;
}

// -- derivations --------------------------------------------------------------

DerivationOnA::DerivationOnA(u32 n_, u32 p_) : n(n_), p(p_), coeffs(n_, TruncatedPolynomial(n_, p_)) {}

bool DerivationOnA::is_zero() const {
    for (const auto& f : coeffs)
        if (!f.is_zero()) return false;
    return true;
}

TruncatedPolynomial DerivationOnA::apply(const TruncatedPolynomial& f) const {
    TruncatedPolynomial out(n, p);
    for (u32 j = 1; j <= n; ++j) {
        if (coeffs[j - 1].is_zero()) continue;
        out += poly_mul(coeffs[j - 1], poly_partial(f, j));
    }
    return out;
}

TruncatedPolynomial DerivationOnA::divergence() const {
    TruncatedPolynomial out(n, p);
    for (u32 j = 1; j <= n; ++j) out += poly_partial(coeffs[j - 1], j);
    return out;
}

DerivationOnA operator+(DerivationOnA a, const DerivationOnA& b) {
    for (u32 j = 0; j < a.n; ++j) a.coeffs[j] += b.coeffs[j];
    return a;
}

DerivationOnA operator-(DerivationOnA a, const DerivationOnA& b) {
    for (u32 j = 0; j < a.n; ++j) a.coeffs[j] -= b.coeffs[j];
    return a;
}

SparseRow DerivationOnA::w_coords() const {
    SparseRow out;
    const u64 np = monomial_count(n, p);
    for (u32 j = 0; j < n; ++j)
        for (auto [r, c] : coeffs[j].terms()) out.push_back({static_cast<u32>(j * np + r), c});
    normalize_row(out, p);
    return out;
}

DerivationOnA DerivationOnA::from_w_coords(const SparseRow& row, u32 n, u32 p) {
    DerivationOnA d(n, p);
    const u64 np = monomial_count(n, p);
    for (const auto& e : row) d.coeffs[e.col / np].add_term(e.col % np, e.val);
    return d;
}

DerivationOnA commutator(const DerivationOnA& d, const DerivationOnA& e) {
    DerivationOnA out(d.n, d.p);
    for (u32 t = 1; t <= d.n; ++t) {
        // [d,e](x_t) = d(e(x_t)) - e(d(x_t)) and e(x_t) is the t-th coefficient
        out.coeffs[t - 1] = d.apply(e.coeffs[t - 1]) - e.apply(d.coeffs[t - 1]);
    }
    return out;
}

DerivationOnA d_ij(const TruncatedPolynomial& f, u32 i, u32 j) {
    const u32 n = f.arity();
    if (i < 1 || i > n || j < 1 || j > n) throw std::out_of_range("d_ij: index out of range");
    DerivationOnA d(n, f.modulus());
    if (i == j) return d;
    d.coeffs[i - 1] += poly_partial(f, j);
    d.coeffs[j - 1] -= poly_partial(f, i);
    return d;
}

DerivationOnA d_hamiltonian(const TruncatedPolynomial& f, u32 m) {
    const u32 n = f.arity();
    if (n != 2 * m) throw std::invalid_argument("d_hamiltonian: arity must be 2m");
    DerivationOnA d(n, f.modulus());
    for (u32 i = 1; i <= m; ++i) {
        d.coeffs[i + m - 1] += poly_partial(f, i);
        d.coeffs[i - 1] -= poly_partial(f, i + m);
    }
    return d;
}

DerivationOnA d_contact(const TruncatedPolynomial& f, u32 m) {
    const u32 n = f.arity();
    if (n != 2 * m + 1) throw std::invalid_argument("d_contact: arity must be 2m+1");
    const u32 p = f.modulus();
    DerivationOnA d(n, p);
    for (u32 i = 1; i <= m; ++i) {
        d.coeffs[i + m - 1] += poly_partial(f, i);
        d.coeffs[i - 1] -= poly_partial(f, i + m);
    }
    TruncatedPolynomial dnf = poly_partial(f, n);
    for (u32 j = 1; j <= 2 * m; ++j) {
        TruncatedPolynomial xj = TruncatedPolynomial::variable(n, j, p);
        d.coeffs[j - 1] += poly_mul(xj, dnf);
        d.coeffs[n - 1] -= poly_mul(xj, poly_partial(f, j));
    }
    d.coeffs[n - 1] += f.scaled(2);
    return d;
}

// -- span solver ---------------------------------------------------------------

SpanSolver::SpanSolver(u32 ambient_dim, u32 p) : ech_(ambient_dim, p, 0, true) {}

long SpanSolver::insert_candidate(const SparseRow& v) {
    long piv = ech_.insert(v);
    if (piv < 0) {
        arrival_to_basis_.push_back(-1);
        return -1;
    }
    long idx = static_cast<long>(arrival_to_basis_count_++);
    arrival_to_basis_.push_back(idx);
    return idx;
}

std::optional<std::vector<u32>> SpanSolver::express(const SparseRow& target) const {
    auto red = ech_.reduce_track(target);
    if (!red.remainder.empty()) return std::nullopt;
    std::vector<u32> coords(arrival_to_basis_count_, 0);
    for (const auto& e : red.combination) {
        long idx = arrival_to_basis_[e.col];
        if (idx < 0) throw std::logic_error("SpanSolver: combination references a dependent candidate");
        coords[static_cast<std::size_t>(idx)] = e.val;
    }
    return coords;
}

std::optional<std::vector<u32>> express_in_span(const std::vector<Element>& vectors, const Element& target) {
    if (vectors.empty()) return target.is_zero() ? std::make_optional(std::vector<u32>{}) : std::nullopt;
    const auto& L = vectors.front().parent;
    for (const auto& v : vectors)
        if (v.parent != L) throw std::invalid_argument("express_in_span: mixed parents");
    if (target.parent != L) throw std::invalid_argument("express_in_span: target parent mismatch");
    SpanSolver solver(L->dim(), L->p());
    std::vector<long> slot; // arrival basis index of each input vector
    for (const auto& v : vectors) {
        SparseRow row;
        for (u32 i = 0; i < L->dim(); ++i)
            if (v.coords[i]) row.push_back({i, v.coords[i]});
        slot.push_back(solver.insert_candidate(row));
    }
    SparseRow trow;
    for (u32 i = 0; i < L->dim(); ++i)
        if (target.coords[i]) trow.push_back({i, target.coords[i]});
    auto combo = solver.express(trow);
    if (!combo) return std::nullopt;
    std::vector<u32> coords(vectors.size(), 0);
    for (std::size_t t = 0; t < vectors.size(); ++t)
        if (slot[t] >= 0) coords[t] = (*combo)[static_cast<std::size_t>(slot[t])];
    return coords;
}

// -- W(n) ----------------------------------------------------------------------

u32 w_basis_index(u32 n, u32 p, u32 j, u64 rank) {
    return static_cast<u32>((j - 1) * monomial_count(n, p) + rank);
}

std::pair<u32, u64> w_basis_decode(u32 n, u32 p, u32 index) {
    const u64 np = monomial_count(n, p);
    return {static_cast<u32>(index / np) + 1, index % np};
}

namespace {

std::string monomial_label(u64 rank, u32 n, u32 p) {
    return "x^" + MultiIndex::from_rank(rank, n, p).to_string();
}

std::string w_label(u32 n, u32 p, u32 j, u64 rank) {
    if (rank == 0) return "D" + std::to_string(j);
    return monomial_label(rank, n, p) + "D" + std::to_string(j);
}

void check_simple_params(const char* who, u32 p) {
    if (p < 5 || !is_prime(p)) throw std::invalid_argument(std::string(who) + ": requires prime p >= 5");
}

// [x^a D_i, x^b D_j] by evaluating the commutator on the generators.
// Appends (w-basis index, coeff) pairs scaled by `scale`.
void w_monomial_bracket(u32 n, u32 p, u32 i, const std::vector<u32>& a, u32 j, const std::vector<u32>& b,
                        u32 scale, SparseRow& out) {
    // value on x_j: x^a d_i(x^b) = b_i x^{a+b-e_i}; value on x_i: -a_j x^{a+b-e_j}
    auto emit = [&](u32 target_j, u32 coeff, u32 drop_axis) {
        if (coeff == 0) return;
        u64 rank = 0;
        for (u32 t = n; t-- > 0;) {
            u32 e = a[t] + b[t] - (t == drop_axis ? 1 : 0);
            if (e >= p) return; // truncation
            rank = rank * p + e;
        }
        out.push_back({w_basis_index(n, p, target_j, rank), coeff * scale % p});
    };
    if (b[i - 1]) emit(j, b[i - 1], i - 1);
    if (a[j - 1]) emit(i, (p - a[j - 1]) % p, j - 1);
}

// Bracket of two derivations given by W-basis coordinate rows.
SparseRow w_bracket_rows(u32 n, u32 p, const SparseRow& u, const SparseRow& v) {
    std::vector<std::pair<u32, std::vector<u32>>> ud, vd; // (j, exponents)
    ud.reserve(u.size());
    vd.reserve(v.size());
    for (const auto& e : u) {
        auto [j, r] = w_basis_decode(n, p, e.col);
        ud.emplace_back(j, MultiIndex::from_rank(r, n, p).exponents());
    }
    for (const auto& e : v) {
        auto [j, r] = w_basis_decode(n, p, e.col);
        vd.emplace_back(j, MultiIndex::from_rank(r, n, p).exponents());
    }
    SparseRow out;
    for (std::size_t s = 0; s < u.size(); ++s)
        for (std::size_t t = 0; t < v.size(); ++t)
            w_monomial_bracket(n, p, ud[s].first, ud[s].second, vd[t].first, vd[t].second,
                               u[s].val * v[t].val % p, out);
    normalize_row(out, p);
    return out;
}

} // namespace

BuiltAlgebra build_W(u32 n, u32 p) {
    check_simple_params("build_W", p);
    if (n < 1) throw std::invalid_argument("build_W: n >= 1 required");
    const u64 np = monomial_count(n, p);
    const u32 dim = static_cast<u32>(n * np);

    LieAlgebra::Builder b("W(" + std::to_string(n) + ") p=" + std::to_string(p), p, dim);
    std::vector<std::vector<u32>> exps(np);
    for (u64 r = 0; r < np; ++r) exps[r] = MultiIndex::from_rank(r, n, p).exponents();

    std::vector<int> grading(dim);
    for (u32 j = 1; j <= n; ++j)
        for (u64 r = 0; r < np; ++r) {
            u32 id = w_basis_index(n, p, j, r);
            b.set_label(id, w_label(n, p, j, r));
            grading[id] = static_cast<int>(MultiIndex::from_rank(r, n, p).degree()) - 1;
        }

    for (u32 id_i = 0; id_i < dim; ++id_i) {
        auto [ji, ri] = w_basis_decode(n, p, id_i);
        for (u32 id_j = id_i + 1; id_j < dim; ++id_j) {
            auto [jj, rj] = w_basis_decode(n, p, id_j);
            SparseRow row;
            w_monomial_bracket(n, p, ji, exps[ri], jj, exps[rj], 1, row);
            normalize_row(row, p);
            if (!row.empty()) b.set_bracket(id_i, id_j, row);
        }
    }
    b.set_grading(grading);

    // p-map D -> D^p, computed by iterating the derivation on the generators
    std::vector<SparseRow> pmap(dim);
    for (u32 id = 0; id < dim; ++id) {
        auto [j, r] = w_basis_decode(n, p, id);
        TruncatedPolynomial xa = TruncatedPolynomial::monomial(MultiIndex::from_rank(r, n, p));
        SparseRow img;
        for (u32 t = 1; t <= n; ++t) {
            TruncatedPolynomial h = TruncatedPolynomial::variable(n, t, p);
            for (u32 it = 0; it < p; ++it) h = poly_mul(xa, poly_partial(h, j));
            for (auto [rr, cc] : h.terms()) img.push_back({w_basis_index(n, p, t, rr), cc});
        }
        normalize_row(img, p);
        pmap[id] = std::move(img);
    }
    b.set_p_map(std::move(pmap));

    BuiltAlgebra out;
    out.spec = {Family::W, n, p};
    out.L = b.build();
    return out;
}

// -- S(n) ----------------------------------------------------------------------

BuiltAlgebra build_S(u32 n, u32 p) {
    check_simple_params("build_S", p);
    if (n < 3) throw std::invalid_argument("build_S: n >= 3 required");
    const u64 np = monomial_count(n, p);
    const u32 wdim = static_cast<u32>(n * np);

    auto span = std::make_shared<SpanSolver>(wdim, p);
    std::vector<SparseRow> basis_w;
    std::vector<std::string> labels;
    std::vector<int> weights;

    auto offer = [&](const DerivationOnA& d, std::string label, int weight) {
        SparseRow row = d.w_coords();
        if (row.empty()) return;
        if (span->insert_candidate(row) >= 0) {
            basis_w.push_back(std::move(row));
            labels.push_back(std::move(label));
            weights.push_back(weight);
        }
    };

    // the degree -1 generators first, so D_1..D_n are basis members
    for (u32 k = 1; k <= n; ++k) {
        u32 j = (k % n) + 1;
        offer(d_ij(TruncatedPolynomial::variable(n, j, p), k, j), "D" + std::to_string(k), -1);
    }
    for (u32 i = 1; i <= n; ++i)
        for (u32 j = i + 1; j <= n; ++j)
            for (u64 r = 1; r < np; ++r) {
                MultiIndex a = MultiIndex::from_rank(r, n, p);
                offer(d_ij(TruncatedPolynomial::monomial(a), i, j),
                      "D" + std::to_string(i) + std::to_string(j) + "(" + monomial_label(r, n, p) + ")",
                      static_cast<int>(a.degree()) - 2);
            }

    const u32 dim = static_cast<u32>(basis_w.size());
    const u64 expected = static_cast<u64>(n - 1) * (np - 1);
    if (dim != expected)
        throw std::runtime_error("build_S: dimension " + std::to_string(dim) + " != expected " +
                                 std::to_string(expected));

    LieAlgebra::Builder b("S(" + std::to_string(n) + ") p=" + std::to_string(p), p, dim);
    for (u32 i = 0; i < dim; ++i) b.set_label(i, labels[i]);
    for (u32 i = 0; i < dim; ++i)
        for (u32 j = i + 1; j < dim; ++j) {
            SparseRow w = w_bracket_rows(n, p, basis_w[i], basis_w[j]);
            if (w.empty()) continue;
            auto coords = span->express(w);
            if (!coords)
                throw std::runtime_error("build_S: bracket of basis " + std::to_string(i) + "," +
                                         std::to_string(j) + " leaves the span");
            SparseRow row;
            for (u32 k = 0; k < dim; ++k)
                if ((*coords)[k]) row.push_back({k, (*coords)[k]});
            b.set_bracket(i, j, row);
        }
    b.set_grading(weights);

    BuiltAlgebra out;
    out.spec = {Family::S, n, p};
    out.L = b.build();
    out.basis_w_coords = std::move(basis_w);
    out.span = span;
    return out;
}

// -- H(n) ----------------------------------------------------------------------

namespace {

struct HFamilyOps {
    u32 n, p, m;
    std::vector<u64> step; // p^i

    HFamilyOps(u32 n_, u32 p_) : n(n_), p(p_), m(n_ / 2), step(n_ + 1) {
        step[0] = 1;
        for (u32 i = 1; i <= n; ++i) step[i] = step[i - 1] * p;
    }
    u32 comp(u64 r, u32 axis0) const { return static_cast<u32>(r / step[axis0] % p); }

    // W-coordinates of D_H(x^a)
    SparseRow dh_coords(u64 r) const {
        SparseRow out;
        for (u32 i = 1; i <= m; ++i) {
            u32 ai = comp(r, i - 1), aim = comp(r, i + m - 1);
            if (ai) out.push_back({w_basis_index(n, p, i + m, r - step[i - 1]), ai});
            if (aim) out.push_back({w_basis_index(n, p, i, r - step[i + m - 1]), (p - aim) % p});
        }
        normalize_row(out, p);
        return out;
    }

    // Solve D_H(f) = w exactly; f_0 is irrelevant and f_sigma is reported so
    // the caller can enforce closure. Returns nullopt if w is not of that form.
    std::optional<std::vector<std::pair<u64, u32>>> recover(const SparseRow& w) const {
        std::vector<std::pair<u64, u32>> f;
        for (const auto& e : w) {
            auto [j, mu] = w_basis_decode(n, p, e.col);
            if (j > m) {
                u32 i = j - m;
                u32 mui = comp(mu, i - 1);
                if (mui == p - 1) continue;
                f.emplace_back(mu + step[i - 1], e.val * inv_mod(mui + 1, p) % p);
            } else {
                u32 ipm = j + m;
                u32 mui = comp(mu, ipm - 1);
                if (mui == p - 1) continue;
                f.emplace_back(mu + step[ipm - 1], (p - e.val) * inv_mod(mui + 1, p) % p);
            }
        }
        std::sort(f.begin(), f.end());
        f.erase(std::unique(f.begin(), f.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }),
                f.end());
        // residual certification: D_H(f) must reproduce w exactly
        SparseRow rebuilt;
        for (auto [r, c] : f)
            for (const auto& e : dh_coords(r)) rebuilt.push_back({e.col, e.val * c % p});
        normalize_row(rebuilt, p);
        SparseRow wn = w;
        normalize_row(wn, p);
        if (rebuilt.size() != wn.size()) return std::nullopt;
        for (std::size_t t = 0; t < wn.size(); ++t)
            if (rebuilt[t].col != wn[t].col || rebuilt[t].val != wn[t].val) return std::nullopt;
        return f;
    }
};

} // namespace

BuiltAlgebra build_H(u32 n, u32 p) {
    check_simple_params("build_H", p);
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("build_H: even n >= 2 required");
    HFamilyOps ops(n, p);
    const u64 np = monomial_count(n, p);
    const u64 sigma = np - 1; // rank of (p-1,...,p-1)

    std::vector<u64> index_to_rank;
    std::vector<long> rank_to_index(np, -1);
    for (u64 r = 1; r < np; ++r) {
        if (r == sigma) continue;
        rank_to_index[r] = static_cast<long>(index_to_rank.size());
        index_to_rank.push_back(r);
    }
    const u32 dim = static_cast<u32>(index_to_rank.size());
    if (dim != np - 2) throw std::runtime_error("build_H: basis enumeration is off");

    std::vector<SparseRow> wrows(dim);
    for (u32 i = 0; i < dim; ++i) wrows[i] = ops.dh_coords(index_to_rank[i]);

    // left-inverse certification: recovery of each image is the unit vector
    for (u32 i = 0; i < dim; ++i) {
        auto f = ops.recover(wrows[i]);
        if (!f || f->size() != 1 || (*f)[0].first != index_to_rank[i] || (*f)[0].second != 1)
            throw std::runtime_error("build_H: image recovery failed, basis not independent");
    }

    LieAlgebra::Builder b("H(" + std::to_string(n) + ") p=" + std::to_string(p), p, dim);
    std::vector<int> grading(dim);
    for (u32 i = 0; i < dim; ++i) {
        b.set_label(i, "DH(" + monomial_label(index_to_rank[i], n, p) + ")");
        grading[i] = static_cast<int>(MultiIndex::from_rank(index_to_rank[i], n, p).degree()) - 2;
    }

    for (u32 i = 0; i < dim; ++i)
        for (u32 j = i + 1; j < dim; ++j) {
            SparseRow w = w_bracket_rows(n, p, wrows[i], wrows[j]);
            if (w.empty()) continue;
            auto f = ops.recover(w);
            if (!f)
                throw std::runtime_error("build_H: bracket (" + std::to_string(i) + "," + std::to_string(j) +
                                         ") is not a Hamiltonian image");
            SparseRow row;
            for (auto [r, c] : *f) {
                if (c == 0) continue;
                if (r == sigma)
                    throw std::runtime_error("build_H: bracket hits the excluded top monomial");
                row.push_back({static_cast<u32>(rank_to_index[r]), c});
            }
            normalize_row(row, p);
            if (!row.empty()) b.set_bracket(i, j, row);
        }
    b.set_grading(grading);

    BuiltAlgebra out;
    out.spec = {Family::H, n, p};
    out.m = ops.m;
    out.L = b.build();
    out.index_to_rank = std::move(index_to_rank);
    out.rank_to_index = std::move(rank_to_index);
    return out;
}

// -- K(n) ----------------------------------------------------------------------

namespace {

struct KFamilyOps {
    u32 n, p, m;
    std::vector<u64> step;

    KFamilyOps(u32 n_, u32 p_) : n(n_), p(p_), m((n_ - 1) / 2), step(n_ + 1) {
        step[0] = 1;
        for (u32 i = 1; i <= n; ++i) step[i] = step[i - 1] * p;
    }
    u32 comp(u64 r, u32 axis0) const { return static_cast<u32>(r / step[axis0] % p); }
    u32 horiz_degree(u64 r) const {
        u32 d = 0;
        for (u32 t = 0; t < 2 * m; ++t) d += comp(r, t);
        return d;
    }
    // coefficient of x^a in the D_n part of D_K(x^a): 2 - sum_{j<=2m} a_j
    u32 dn_coeff(u64 r) const { return (2 + static_cast<u64>(p) * p - horiz_degree(r)) % p; }

    SparseRow dk_coords(u64 r) const {
        SparseRow out;
        for (u32 i = 1; i <= m; ++i) {
            u32 ai = comp(r, i - 1), aim = comp(r, i + m - 1);
            if (ai) out.push_back({w_basis_index(n, p, i + m, r - step[i - 1]), ai});
            if (aim) out.push_back({w_basis_index(n, p, i, r - step[i + m - 1]), (p - aim) % p});
        }
        u32 an = comp(r, n - 1);
        if (an) {
            for (u32 j = 1; j <= 2 * m; ++j) {
                if (comp(r, j - 1) + 1 >= p) continue; // x_j overflow
                out.push_back({w_basis_index(n, p, j, r - step[n - 1] + step[j - 1]), an});
            }
        }
        u32 c = dn_coeff(r);
        if (c) out.push_back({w_basis_index(n, p, n, r), c});
        normalize_row(out, p);
        return out;
    }

    std::optional<std::vector<std::pair<u64, u32>>> recover(const SparseRow& w) const {
        std::vector<std::pair<u64, u32>> f;
        std::vector<std::pair<u64, u32>> entries; // (global key = j*np + mu) -> val for lookups
        const u64 np = step[n];
        auto entry_at = [&](u32 j, u64 mu) -> u32 {
            u64 key = static_cast<u64>(j - 1) * np + mu;
            auto it = std::lower_bound(entries.begin(), entries.end(), key,
                                       [](const auto& e, u64 k) { return e.first < k; });
            return (it != entries.end() && it->first == key) ? it->second : 0;
        };
        for (const auto& e : w) entries.emplace_back(e.col, e.val);
        std::sort(entries.begin(), entries.end());

        // phase 1: nondegenerate monomials straight off the D_n coefficients
        for (const auto& e : w) {
            auto [j, mu] = w_basis_decode(n, p, e.col);
            if (j != n) continue;
            u32 c = dn_coeff(mu);
            if (c) f.emplace_back(mu, e.val * inv_mod(c, p) % p);
        }
        // phase 2: degenerate monomials via a horizontal coefficient; the
        // coupled level-(mu_n + 1) monomial is never degenerate itself.
        std::vector<std::pair<u64, u32>> f_sorted = f;
        std::sort(f_sorted.begin(), f_sorted.end());
        auto f_at = [&](u64 r) -> u32 {
            auto it = std::lower_bound(f_sorted.begin(), f_sorted.end(), r,
                                       [](const auto& e, u64 k) { return e.first < k; });
            return (it != f_sorted.end() && it->first == r) ? it->second : 0;
        };
        // candidate degenerate monomials only matter when some entry of w
        // touches their neighborhood; sweep all entries and test both reads.
        std::vector<std::pair<u64, u32>> extra;
        auto consider = [&](u64 mu) {
            if (dn_coeff(mu) != 0) return;
            u32 jp = 0;
            for (u32 t = 1; t <= 2 * m; ++t)
                if (comp(mu, t - 1)) {
                    jp = t;
                    break;
                }
            if (jp == 0) return; // pure x_n powers are never degenerate
            u32 j = jp <= m ? jp + m : jp - m;
            u64 nu = mu - step[jp - 1];
            u32 val = entry_at(j, nu);
            u32 mun = comp(mu, n - 1);
            u32 bterm = 0;
            if (mun + 1 <= p - 1 && comp(nu, j - 1) >= 1)
                bterm = (mun + 1) * f_at(nu - step[j - 1] + step[n - 1]) % p;
            u32 mujp = comp(mu, jp - 1);
            u32 fmu;
            if (j <= m) // first-sum coefficient is -mu_{j'}
                fmu = (bterm + p - val % p) % p * inv_mod(mujp, p) % p;
            else
                fmu = (val + p - bterm) % p * inv_mod(mujp, p) % p;
            if (fmu) extra.emplace_back(mu, fmu);
        };
        // degenerate mu adjacent to observed horizontal entries
        for (const auto& e : w) {
            auto [j, nu] = w_basis_decode(n, p, e.col);
            if (j == n) continue;
            u32 jp = j <= m ? j + m : j - m;
            if (comp(nu, jp - 1) + 1 <= p - 1) consider(nu + step[jp - 1]);
        }
        // also: degenerate mu whose horizontal entry vanished entirely but
        // whose b-term is nonzero (val = 0 read). Those are reachable from
        // known f values one level down.
        for (const auto& fv : f_sorted) {
            u64 b = fv.first;
            u32 bn = comp(b, n - 1);
            if (bn == 0) continue;
            for (u32 j = 1; j <= 2 * m; ++j) {
                if (comp(b, j - 1) + 1 >= p) continue;
                u64 nu = b + step[j - 1] - step[n - 1];
                u32 jp = j <= m ? j + m : j - m;
                if (comp(nu, jp - 1) + 1 <= p - 1) consider(nu + step[jp - 1]);
            }
        }
        std::sort(extra.begin(), extra.end());
        extra.erase(std::unique(extra.begin(), extra.end(),
                                [](const auto& a, const auto& b) { return a.first == b.first; }),
                    extra.end());
        for (auto& e : extra) f.push_back(e);
        std::sort(f.begin(), f.end());
        f.erase(std::unique(f.begin(), f.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }),
                f.end());

        // residual certification
        SparseRow rebuilt;
        for (auto [r, c] : f)
            for (const auto& e : dk_coords(r)) rebuilt.push_back({e.col, e.val * c % p});
        normalize_row(rebuilt, p);
        SparseRow wn = w;
        normalize_row(wn, p);
        if (rebuilt.size() != wn.size()) return std::nullopt;
        for (std::size_t t = 0; t < wn.size(); ++t)
            if (rebuilt[t].col != wn[t].col || rebuilt[t].val != wn[t].val) return std::nullopt;
        return f;
    }
};

} // namespace

BuiltAlgebra build_K(u32 n, u32 p) {
    check_simple_params("build_K", p);
    if (n < 3 || n % 2 == 0) throw std::invalid_argument("build_K: odd n >= 3 required");
    KFamilyOps ops(n, p);
    const u64 np = monomial_count(n, p);
    const u64 tau = np - 1;
    const bool drop_tau = ((ops.m + 2) % p == 0);

    std::vector<u64> index_to_rank;
    std::vector<long> rank_to_index(np, -1);
    for (u64 r = 0; r < np; ++r) {
        if (drop_tau && r == tau) continue;
        rank_to_index[r] = static_cast<long>(index_to_rank.size());
        index_to_rank.push_back(r);
    }
    const u32 dim = static_cast<u32>(index_to_rank.size());

    std::vector<SparseRow> wrows(dim);
    for (u32 i = 0; i < dim; ++i) wrows[i] = ops.dk_coords(index_to_rank[i]);

    for (u32 i = 0; i < dim; ++i) {
        auto f = ops.recover(wrows[i]);
        if (!f || f->size() != 1 || (*f)[0].first != index_to_rank[i] || (*f)[0].second != 1)
            throw std::runtime_error("build_K: image recovery failed, basis not independent");
    }

    LieAlgebra::Builder b("K(" + std::to_string(n) + ") p=" + std::to_string(p), p, dim);
    std::vector<int> grading(dim);
    for (u32 i = 0; i < dim; ++i) {
        u64 r = index_to_rank[i];
        b.set_label(i, "DK(" + monomial_label(r, n, p) + ")");
        grading[i] = static_cast<int>(MultiIndex::from_rank(r, n, p).degree() + ops.comp(r, n - 1)) - 2;
    }

    for (u32 i = 0; i < dim; ++i)
        for (u32 j = i + 1; j < dim; ++j) {
            SparseRow w = w_bracket_rows(n, p, wrows[i], wrows[j]);
            if (w.empty()) continue;
            auto f = ops.recover(w);
            if (!f)
                throw std::runtime_error("build_K: bracket (" + std::to_string(i) + "," + std::to_string(j) +
                                         ") is not a contact image");
            SparseRow row;
            for (auto [r, c] : *f) {
                if (c == 0) continue;
                if (drop_tau && r == tau)
                    throw std::runtime_error("build_K: bracket hits the excluded top monomial");
                row.push_back({static_cast<u32>(rank_to_index[r]), c});
            }
            normalize_row(row, p);
            if (!row.empty()) b.set_bracket(i, j, row);
        }
    b.set_grading(grading);

    BuiltAlgebra out;
    out.spec = {Family::K, n, p};
    out.m = ops.m;
    out.L = b.build();
    out.index_to_rank = std::move(index_to_rank);
    out.rank_to_index = std::move(rank_to_index);
    return out;
}

// -- Melikian ------------------------------------------------------------------

BuiltAlgebra build_melikian(u32 p) {
    if (p != 5) throw std::invalid_argument("build_melikian: requires p = 5");
    const u32 n = 2;
    const u64 np = monomial_count(n, p); // 25
    const u32 dim = static_cast<u32>(np + 2 * np + 2 * np);

    auto a_id = [&](u64 r) { return static_cast<u32>(r); };
    auto w_id = [&](u32 j, u64 r) { return static_cast<u32>(np + (j - 1) * np + r); };
    auto wt_id = [&](u32 j, u64 r) { return static_cast<u32>(3 * np + (j - 1) * np + r); };

    enum class Part { A, W, Wt };
    auto classify = [&](u32 id) {
        if (id < np) return Part::A;
        return id < 3 * np ? Part::W : Part::Wt;
    };
    auto as_poly = [&](u32 id) { // A part
        return TruncatedPolynomial::monomial(MultiIndex::from_rank(id, n, p));
    };
    auto as_deriv = [&](u32 id, bool tilde) {
        u32 base = tilde ? 3 * static_cast<u32>(np) : static_cast<u32>(np);
        u32 j = (id - base) / static_cast<u32>(np) + 1;
        u64 r = (id - base) % np;
        DerivationOnA d(n, p);
        d.coeffs[j - 1] = TruncatedPolynomial::monomial(MultiIndex::from_rank(r, n, p));
        return d;
    };

    SparseRow row;
    auto emit_a = [&](const TruncatedPolynomial& f, u32 scale) {
        for (auto [r, c] : f.terms()) row.push_back({a_id(r), c * scale % p});
    };
    auto emit_w = [&](const DerivationOnA& d, u32 scale, bool tilde) {
        for (u32 j = 1; j <= n; ++j)
            for (auto [r, c] : d.coeffs[j - 1].terms())
                row.push_back({tilde ? wt_id(j, r) : w_id(j, r), c * scale % p});
    };

    LieAlgebra::Builder b("M p=5", p, dim);
    for (u64 r = 0; r < np; ++r) {
        b.set_label(a_id(r), r == 0 ? "1" : monomial_label(r, n, p));
        for (u32 j = 1; j <= n; ++j) {
            b.set_label(w_id(j, r), w_label(n, p, j, r));
            b.set_label(wt_id(j, r), w_label(n, p, j, r) + "~");
        }
    }

    for (u32 i = 0; i < dim; ++i)
        for (u32 j = i + 1; j < dim; ++j) {
            row.clear();
            Part pi = classify(i), pj = classify(j);
            if (pi == Part::A && pj == Part::A) {
                // [f,g] = 2(g D2(f) - f D2(g)) ~D1 + 2(f D1(g) - g D1(f)) ~D2
                auto f = as_poly(i), g = as_poly(j);
                DerivationOnA d(n, p);
                d.coeffs[0] = (poly_mul(g, poly_partial(f, 2)) - poly_mul(f, poly_partial(g, 2))).scaled(2);
                d.coeffs[1] = (poly_mul(f, poly_partial(g, 1)) - poly_mul(g, poly_partial(f, 1))).scaled(2);
                emit_w(d, 1, true);
            } else if (pi == Part::A && pj == Part::W) {
                // [f, D] = -[D, f] = 2 div(D) f - D(f)
                auto f = as_poly(i);
                auto d = as_deriv(j, false);
                TruncatedPolynomial val = poly_mul(d.divergence(), f).scaled(2) - d.apply(f);
                emit_a(val, 1);
            } else if (pi == Part::A && pj == Part::Wt) {
                // [f, ~E] = f E  (in W)
                auto f = as_poly(i);
                auto e = as_deriv(j, true);
                DerivationOnA d(n, p);
                for (u32 t = 0; t < n; ++t) d.coeffs[t] = poly_mul(f, e.coeffs[t]);
                emit_w(d, 1, false);
            } else if (pi == Part::W && pj == Part::W) {
                emit_w(commutator(as_deriv(i, false), as_deriv(j, false)), 1, false);
            } else if (pi == Part::W && pj == Part::Wt) {
                // [D, ~E] = ~[D,E] + 2 div(D) ~E
                auto d = as_deriv(i, false);
                auto e = as_deriv(j, true);
                DerivationOnA val = commutator(d, e);
                TruncatedPolynomial dv = d.divergence().scaled(2);
                for (u32 t = 0; t < n; ++t) val.coeffs[t] += poly_mul(dv, e.coeffs[t]);
                emit_w(val, 1, true);
            } else {
                // [~D, ~E] = f1 g2 - f2 g1  (in A)
                auto d = as_deriv(i, true);
                auto e = as_deriv(j, true);
                TruncatedPolynomial val =
                    poly_mul(d.coeffs[0], e.coeffs[1]) - poly_mul(d.coeffs[1], e.coeffs[0]);
                emit_a(val, 1);
            }
            normalize_row(row, p);
            if (!row.empty()) b.set_bracket(i, j, row);
        }

    AlgebraPtr ungraded = b.build(); // exhaustive Jacobi gate runs here

    auto gs = grading_solve(*ungraded);
    if (!gs.found) throw std::runtime_error("build_melikian: no grading found");
    auto pm = solve_p_map_all(ungraded);
    if (!pm) throw std::runtime_error("build_melikian: p-map solve failed");

    LieAlgebra::Builder b2("M p=5", p, dim);
    for (u32 i = 0; i < dim; ++i) b2.set_label(i, ungraded->basis_labels()[i]);
    for (u32 i = 0; i < dim; ++i)
        for (u32 j = i + 1; j < dim; ++j) {
            SparseRow r = ungraded->bracket_basis(i, j);
            if (!r.empty()) b2.set_bracket(i, j, r);
        }
    b2.set_grading(gs.weights);
    b2.set_p_map(std::move(*pm));
    LieAlgebra::Builder::Options opts;
    opts.check_jacobi = false; // already verified exhaustively above
    BuiltAlgebra out;
    out.spec = {Family::M, 2, p};
    out.L = b2.build(opts);
    return out;
}

// -- classical controls ---------------------------------------------------------

BuiltAlgebra build_classical(Family tag, u32 n, u32 p) {
    check_simple_params("build_classical", p);
    if (n < 2) throw std::invalid_argument("build_classical: n >= 2 required");
    const bool projective = tag == Family::psl;
    if (projective && n % p != 0)
        throw std::invalid_argument("build_classical: psl(n) needs p | n");

    // basis: off-diagonal E_ab (row-major), then H_1..H_{n-1} (minus one for psl)
    const u32 offdiag = n * n - n;
    const u32 hcount = projective ? n - 2 : n - 1;
    const u32 dim = offdiag + hcount;

    auto e_id = [&](u32 a, u32 bcol) { // 1-based, a != bcol
        u32 idx = 0;
        idx = (a - 1) * (n - 1) + (bcol > a ? bcol - 2 : bcol - 1);
        return idx;
    };

    // diagonal traceless matrix -> H coordinates; for psl reduce H_{n-1}
    auto diag_to_h = [&](const std::vector<i64>& d) {
        // d has n entries summing to 0 mod p; coordinates over H_k = E_kk - E_{k+1,k+1}:
        // coeff(H_k) = d_1 + ... + d_k
        std::vector<i64> h(n - 1, 0);
        i64 pref = 0;
        for (u32 k = 0; k < n - 1; ++k) {
            pref += d[k];
            h[k] = pref;
        }
        if (projective) {
            // H_{n-1} = sum_{i<=n-2} i H_i  (from I = 0)
            i64 top = h[n - 2];
            h[n - 2] = 0;
            for (u32 i = 1; i <= n - 2; ++i) h[i - 1] += top * static_cast<i64>(i);
        }
        return h;
    };

    LieAlgebra::Builder b(std::string(projective ? "psl(" : "sl(") + std::to_string(n) + ") p=" +
                              std::to_string(p),
                          p, dim);
    for (u32 a = 1; a <= n; ++a)
        for (u32 c = 1; c <= n; ++c)
            if (a != c) b.set_label(e_id(a, c), "E(" + std::to_string(a) + "," + std::to_string(c) + ")");
    for (u32 k = 1; k <= hcount; ++k) b.set_label(offdiag + k - 1, "H(" + std::to_string(k) + ")");

    // dense n x n commutator on sparse matrix units, re-expressed in the basis
    auto mat_of = [&](u32 id) {
        std::vector<i64> mat(n * n, 0);
        if (id < offdiag) {
            u32 a = id / (n - 1) + 1;
            u32 rem = id % (n - 1);
            u32 c = rem + 1 >= a ? rem + 2 : rem + 1;
            mat[(a - 1) * n + (c - 1)] = 1;
        } else {
            u32 k = id - offdiag + 1;
            mat[(k - 1) * n + (k - 1)] = 1;
            mat[k * n + k] = -1;
        }
        return mat;
    };

    for (u32 i = 0; i < dim; ++i) {
        auto A = mat_of(i);
        for (u32 j = i + 1; j < dim; ++j) {
            auto B = mat_of(j);
            std::vector<i64> C(n * n, 0);
            for (u32 r = 0; r < n; ++r)
                for (u32 t = 0; t < n; ++t) {
                    i64 v = 0;
                    for (u32 s = 0; s < n; ++s) v += A[r * n + s] * B[s * n + t] - B[r * n + s] * A[s * n + t];
                    C[r * n + t] = v;
                }
            SparseRow r;
            std::vector<i64> diag(n);
            for (u32 t = 0; t < n; ++t) diag[t] = C[t * n + t];
            auto h = diag_to_h(diag);
            for (u32 k = 0; k < hcount; ++k) {
                i64 v = h[k] % static_cast<i64>(p);
                if (v < 0) v += p;
                if (v) r.push_back({offdiag + k, static_cast<u32>(v)});
            }
            for (u32 a = 1; a <= n; ++a)
                for (u32 c = 1; c <= n; ++c) {
                    if (a == c) continue;
                    i64 v = C[(a - 1) * n + (c - 1)] % static_cast<i64>(p);
                    if (v < 0) v += p;
                    if (v) r.push_back({e_id(a, c), static_cast<u32>(v)});
                }
            normalize_row(r, p);
            if (!r.empty()) b.set_bracket(i, j, r);
        }
    }

    AlgebraPtr ungraded = b.build();
    auto gs = grading_solve(*ungraded);

    BuiltAlgebra out;
    out.spec = {tag, n, p};
    if (gs.found) {
        LieAlgebra::Builder b2(ungraded->name(), p, dim);
        for (u32 i = 0; i < dim; ++i) b2.set_label(i, ungraded->basis_labels()[i]);
        for (u32 i = 0; i < dim; ++i)
            for (u32 j = i + 1; j < dim; ++j) {
                SparseRow r = ungraded->bracket_basis(i, j);
                if (!r.empty()) b2.set_bracket(i, j, r);
            }
        b2.set_grading(gs.weights);
        LieAlgebra::Builder::Options opts;
        opts.check_jacobi = false;
        out.L = b2.build(opts);
    } else {
        out.L = ungraded;
    }
    return out;
}

BuiltAlgebra build_family(const FamilySpec& spec) {
    switch (spec.family) {
        case Family::W: return build_W(spec.n, spec.p);
        case Family::S: return build_S(spec.n, spec.p);
        case Family::H: return build_H(spec.n, spec.p);
        case Family::K: return build_K(spec.n, spec.p);
        case Family::M: return build_melikian(spec.p);
        case Family::sl:
        case Family::psl: return build_classical(spec.family, spec.n, spec.p);
    }
    throw std::invalid_argument("build_family: unknown family");
}

bool in_supported_grid(const FamilySpec& s) {
    if (s.p != 5 && s.p != 7) return false;
    switch (s.family) {
        case Family::W: return s.n >= 1 && s.n <= 3;
        case Family::S: return s.n == 3;
        case Family::H: return s.n == 2 || s.n == 4;
        case Family::K: return s.n == 3 || (s.n == 5 && s.p == 5);
        case Family::M: return s.p == 5;
        case Family::sl: return s.n >= 2 && s.n <= 5;
        case Family::psl: return s.n >= 2 && s.n <= 5 && s.n % s.p == 0;
    }
    return false;
}

std::string supported_grid_description() {
    return "p in {5,7}; W: n<=3; S: n=3; H: n in {2,4}; K: n=3 (n=5 at p=5, construction only); "
           "M: p=5; sl: 2<=n<=5; psl: p | n";
}

} // namespace modlie
