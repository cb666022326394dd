#include "modlie/lie_algebra.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace modlie {

bool Subspace::contains(const std::vector<u32>& coords) const {
    std::vector<u32> v = coords;
    for (auto& x : v) x %= p;
    for (const auto& row : rows) {
        u32 lead = row[0].col;
        u32 f = v[lead];
        if (!f) continue;
        for (const auto& e : row) v[e.col] = (v[e.col] + (p - f) * e.val) % p;
    }
    for (u32 x : v)
        if (x) return false;
    return true;
}

int LieAlgebra::min_weight() const {
    int m = 0;
    bool first = true;
    for (int w : *grading_) {
        if (first || w < m) m = w;
        first = false;
    }
    return m;
}

int LieAlgebra::max_weight() const {
    int m = 0;
    bool first = true;
    for (int w : *grading_) {
        if (first || w > m) m = w;
        first = false;
    }
    return m;
}

SparseRow LieAlgebra::bracket_basis(u32 i, u32 j) const {
    SparseRow out;
    if (i == j) return out;
    bool flip = i > j;
    if (flip) std::swap(i, j);
    u64 pr = pair_rank(i, j);
    for (const SparseEntry* e = pair_begin(pr); e != pair_end(pr); ++e)
        out.push_back({e->col, flip ? p_ - e->val : e->val});
    return out;
}

Element LieAlgebra::zero() const { return Element{shared_from_this(), std::vector<u32>(dim_, 0)}; }

Element LieAlgebra::basis_element(u32 k) const {
    if (k >= dim_) throw std::out_of_range("basis_element: index out of range");
    Element e = zero();
    e.coords[k] = 1;
    return e;
}

Element LieAlgebra::element(const std::vector<i64>& ints) const {
    if (ints.size() != dim_) throw std::invalid_argument("element: wrong coordinate count");
    Element e = zero();
    for (u32 i = 0; i < dim_; ++i) {
        i64 r = ints[i] % static_cast<i64>(p_);
        if (r < 0) r += p_;
        e.coords[i] = static_cast<u32>(r);
    }
    return e;
}

Element LieAlgebra::element_from_row(const SparseRow& row) const {
    Element e = zero();
    for (const auto& en : row) e.coords[en.col] = en.val % p_;
    return e;
}

std::vector<u32> LieAlgebra::bracket_coords(const std::vector<u32>& x, const std::vector<u32>& y) const {
    std::vector<u32> out(dim_, 0);
    std::vector<u32> xs, ys;
    for (u32 i = 0; i < dim_; ++i)
        if (x[i]) xs.push_back(i);
    for (u32 j = 0; j < dim_; ++j)
        if (y[j]) ys.push_back(j);
    for (u32 i : xs)
        for (u32 j : ys) {
            if (i == j) continue;
            u32 coeff = x[i] * y[j] % p_;
            if (i < j) {
                u64 pr = pair_rank(i, j);
                for (const SparseEntry* e = pair_begin(pr); e != pair_end(pr); ++e)
                    out[e->col] = (out[e->col] + coeff * e->val) % p_;
            } else {
                u64 pr = pair_rank(j, i);
                for (const SparseEntry* e = pair_begin(pr); e != pair_end(pr); ++e)
                    out[e->col] = (out[e->col] + coeff * (p_ - e->val)) % p_;
            }
        }
    return out;
}

SparseRow LieAlgebra::bracket_row_basis(const SparseRow& row, u32 k) const {
    SparseRow out;
    for (const auto& en : row) {
        if (en.col == k) continue;
        SparseRow br = bracket_basis(en.col, k);
        for (const auto& b : br) out.push_back({b.col, b.val * en.val % p_});
    }
    normalize_row(out, p_);
    return out;
}

void LieAlgebra::build_adT() const {
    // adT_[i * dim + k] = list of (t, c) with coefficient of e_k in [e_i, e_t] equal to c
    adT_.assign(static_cast<std::size_t>(dim_) * dim_, SparseRow{});
    for (u32 i = 0; i < dim_; ++i)
        for (u32 j = i + 1; j < dim_; ++j) {
            u64 pr = pair_rank(i, j);
            for (const SparseEntry* e = pair_begin(pr); e != pair_end(pr); ++e) {
                adT_[static_cast<std::size_t>(i) * dim_ + e->col].push_back({j, e->val});
                adT_[static_cast<std::size_t>(j) * dim_ + e->col].push_back({i, p_ - e->val});
            }
        }
}

const SparseRow& LieAlgebra::ad_transpose(u32 i, u32 k) const {
    std::call_once(adT_once_, [this] { build_adT(); });
    return adT_[static_cast<std::size_t>(i) * dim_ + k];
}

void LieAlgebra::build_producers() const {
    producers_.assign(dim_, {});
    const u64 np = pair_count();
    for (u64 pr = 0; pr < np; ++pr)
        for (const SparseEntry* e = pair_begin(pr); e != pair_end(pr); ++e)
            producers_[e->col].emplace_back(pr, e->val);
}

const std::vector<std::pair<u64, u32>>& LieAlgebra::producers(u32 k) const {
    std::call_once(prod_once_, [this] { build_producers(); });
    return producers_[k];
}

// -- Builder -----------------------------------------------------------------

LieAlgebra::Builder::Builder(std::string name, u32 p, u32 dim) : name_(std::move(name)), p_(p), dim_(dim) {
    if (!is_prime(p)) throw std::invalid_argument("Builder: modulus must be prime");
    if (dim == 0) throw std::invalid_argument("Builder: dimension must be positive");
    labels_.resize(dim);
    for (u32 i = 0; i < dim; ++i) labels_[i] = "e" + std::to_string(i);
}

void LieAlgebra::Builder::set_label(u32 i, std::string label) { labels_.at(i) = std::move(label); }

void LieAlgebra::Builder::add_bracket_entry(u32 i, u32 j, u32 k, u32 c) {
    if (i >= j) throw std::invalid_argument("Builder: bracket entries require i < j");
    if (j >= dim_ || k >= dim_) throw std::out_of_range("Builder: index out of range");
    c %= p_;
    if (c) raw_.push_back({pair_rank(i, j), k, c});
}

void LieAlgebra::Builder::set_bracket(u32 i, u32 j, const SparseRow& row) {
    for (const auto& e : row) add_bracket_entry(i, j, e.col, e.val);
}

void LieAlgebra::Builder::set_grading(std::vector<int> weights) {
    if (weights.size() != dim_) throw std::invalid_argument("Builder: grading size mismatch");
    grading_ = std::move(weights);
}

void LieAlgebra::Builder::set_p_map(std::vector<SparseRow> images) {
    if (images.size() != dim_) throw std::invalid_argument("Builder: p-map size mismatch");
    p_map_ = PMap{std::move(images)};
}

AlgebraPtr LieAlgebra::Builder::build() { return build(Options{}); }

AlgebraPtr LieAlgebra::Builder::build(const Options& opts) {
    auto alg = std::shared_ptr<LieAlgebra>(new LieAlgebra());
    alg->name_ = name_;
    alg->p_ = p_;
    alg->dim_ = dim_;
    alg->labels_ = labels_;

    std::sort(raw_.begin(), raw_.end(), [](const RawEntry& a, const RawEntry& b) {
        return a.pr != b.pr ? a.pr < b.pr : a.k < b.k;
    });
    const u64 np = static_cast<u64>(dim_) * (dim_ - 1) / 2;
    alg->offsets_.assign(np + 1, 0);
    alg->arena_.clear();
    std::size_t idx = 0;
    for (u64 pr = 0; pr < np; ++pr) {
        alg->offsets_[pr] = alg->arena_.size();
        while (idx < raw_.size() && raw_[idx].pr == pr) {
            u32 k = raw_[idx].k;
            u64 acc = 0;
            while (idx < raw_.size() && raw_[idx].pr == pr && raw_[idx].k == k) acc += raw_[idx++].c;
            u32 c = static_cast<u32>(acc % p_);
            if (c) alg->arena_.push_back({k, c});
        }
    }
    alg->offsets_[np] = alg->arena_.size();
    raw_.clear();
    raw_.shrink_to_fit();

    if (grading_) {
        if (opts.validate_grading && !is_valid_grading(*alg, *grading_))
            throw std::runtime_error("Builder: supplied grading violates bracket homogeneity");
        alg->grading_ = grading_;
    }
    if (p_map_) alg->p_map_ = p_map_;

    if (opts.check_jacobi) {
        auto check = [&](u32 i, u32 j, u32 k) {
            Element d = jacobi_defect(alg, i, j, k);
            if (!d.is_zero())
                throw std::runtime_error("Jacobi identity fails on (" + std::to_string(i) + "," +
                                         std::to_string(j) + "," + std::to_string(k) + ") in " + name_);
        };
        if (dim_ <= opts.exhaustive_limit) {
            for (u32 i = 0; i < dim_; ++i)
                for (u32 j = i + 1; j < dim_; ++j)
                    for (u32 k = j + 1; k < dim_; ++k) check(i, j, k);
        } else {
            std::mt19937_64 rng(opts.seed);
            std::uniform_int_distribution<u32> d(0, dim_ - 1);
            for (u64 t = 0; t < opts.random_triples; ++t) {
                u32 i = d(rng), j = d(rng), k = d(rng);
                if (i == j || j == k || i == k) continue;
                check(i, j, k);
            }
        }
    }
    return alg;
}

// -- operations ---------------------------------------------------------------

namespace {
void check_parents(const Element& x, const Element& y) {
    if (x.parent != y.parent) throw std::invalid_argument("Element: parent algebra mismatch");
}

// Re-echelonize arbitrary spanning rows so Subspace::contains can reduce
// by increasing lead column.
Subspace make_subspace(const std::vector<SparseRow>& spanning, u32 n, u32 p) {
    StreamEchelon ech(n, p);
    for (const auto& r : spanning)
        if (!r.empty()) ech.insert(r);
    Subspace s{n, p, {}};
    for (u32 c = 0; c < n; ++c)
        if (ech.has_pivot(c)) s.rows.push_back(ech.pivot_row(c));
    return s;
}
} // namespace

Element bracket(const Element& x, const Element& y) {
    check_parents(x, y);
    return Element{x.parent, x.parent->bracket_coords(x.coords, y.coords)};
}

Element add(const Element& x, const Element& y) {
    check_parents(x, y);
    Element out = x;
    const u32 p = x.parent->p();
    for (u32 i = 0; i < out.coords.size(); ++i) out.coords[i] = (out.coords[i] + y.coords[i]) % p;
    return out;
}

Element sub(const Element& x, const Element& y) {
    check_parents(x, y);
    Element out = x;
    const u32 p = x.parent->p();
    for (u32 i = 0; i < out.coords.size(); ++i) out.coords[i] = (out.coords[i] + p - y.coords[i]) % p;
    return out;
}

Element scale(const Element& x, u32 c) {
    Element out = x;
    const u32 p = x.parent->p();
    c %= p;
    for (auto& v : out.coords) v = v * c % p;
    return out;
}

Element jacobi_defect(const AlgebraPtr& L, u32 i, u32 j, u32 k) {
    const u32 p = L->p();
    std::vector<u32> acc(L->dim(), 0);
    auto add_term = [&](u32 a, u32 b, u32 c) {
        // [[e_a, e_b], e_c]
        SparseRow ab = L->bracket_basis(a, b);
        SparseRow res = L->bracket_row_basis(ab, c);
        for (const auto& e : res) acc[e.col] = (acc[e.col] + e.val) % p;
    };
    add_term(i, j, k);
    add_term(j, k, i);
    add_term(k, i, j);
    return Element{L, std::move(acc)};
}

DenseMatrix ad_matrix(const Element& x) {
    const auto& L = *x.parent;
    DenseMatrix m(L.dim(), L.dim(), L.p());
    for (u32 i = 0; i < L.dim(); ++i) {
        if (!x.coords[i]) continue;
        for (u32 j = 0; j < L.dim(); ++j) {
            if (i == j) continue;
            SparseRow br = L.bracket_basis(i, j);
            for (const auto& e : br) m.at(e.col, j) = (m.at(e.col, j) + x.coords[i] * e.val) % L.p();
        }
    }
    return m;
}

KillingForm killing_form(const AlgebraPtr& L) {
    const u32 n = L->dim(), p = L->p();
    // ad(e_i) as column-major sparse: per column j the list of (k, c)
    std::vector<std::vector<SparseRow>> ad(n, std::vector<SparseRow>(n));
    for (u32 i = 0; i < n; ++i)
        for (u32 j = 0; j < n; ++j)
            if (i != j) ad[i][j] = L->bracket_basis(i, j);
    DenseMatrix gram(n, n, p);
    for (u32 i = 0; i < n; ++i)
        for (u32 j = i; j < n; ++j) {
            u64 tr = 0;
            // tr(ad_i ad_j) = sum_l (ad_i ad_j)_{ll}
            for (u32 l = 0; l < n; ++l)
                for (const auto& e : ad[j][l]) // e_l -> e.val * e_{e.col}
                    for (const auto& f : ad[i][e.col])
                        if (f.col == l) tr += static_cast<u64>(e.val) * f.val;
            u32 v = static_cast<u32>(tr % p);
            gram.at(i, j) = v;
            gram.at(j, i) = v;
        }
    return KillingForm{gram, dense_rank(gram)};
}

Subspace derived_subalgebra(const AlgebraPtr& L) {
    StreamEchelon ech(L->dim(), L->p());
    const u64 np = L->pair_count();
    for (u64 pr = 0; pr < np; ++pr) {
        SparseRow row(L->pair_begin(pr), L->pair_end(pr));
        if (!row.empty()) ech.insert(row);
    }
    Subspace s{L->dim(), L->p(), {}};
    for (u32 c = 0; c < L->dim(); ++c)
        if (ech.has_pivot(c)) s.rows.push_back(ech.pivot_row(c));
    return s;
}

Subspace center(const AlgebraPtr& L) {
    const u32 n = L->dim(), p = L->p();
    StreamEchelon ech(n, p);
    // equations: for each (i, k), sum_j c^k_{ij} x_j = 0
    for (u32 i = 0; i < n; ++i) {
        std::vector<SparseRow> rows_by_k(n);
        for (u32 j = 0; j < n; ++j) {
            if (i == j) continue;
            for (const auto& e : L->bracket_basis(i, j)) rows_by_k[e.col].push_back({j, e.val});
        }
        for (auto& r : rows_by_k)
            if (!r.empty()) ech.insert(r);
    }
    std::vector<SparseRow> rows;
    for (auto& v : ech.kernel()) {
        SparseRow row;
        for (u32 c = 0; c < n; ++c)
            if (v[c]) row.push_back({c, v[c]});
        rows.push_back(std::move(row));
    }
    return make_subspace(rows, n, p);
}

Subspace ideal_closure(const Element& x) {
    const auto& L = x.parent;
    const u32 n = L->dim(), p = L->p();
    StreamEchelon ech(n, p);
    std::vector<SparseRow> worklist;
    SparseRow x_row;
    for (u32 i = 0; i < n; ++i)
        if (x.coords[i]) x_row.push_back({i, x.coords[i] % p});
    if (x_row.empty()) return Subspace{n, p, {}};
    long piv = ech.insert(x_row);
    if (piv >= 0) worklist.push_back(ech.pivot_row(static_cast<u32>(piv)));
    while (!worklist.empty()) {
        SparseRow v = std::move(worklist.back());
        worklist.pop_back();
        for (u32 i = 0; i < n; ++i) {
            SparseRow w;
            for (const auto& e : v) {
                if (e.col == i) continue;
                for (const auto& b : L->bracket_basis(i, e.col)) w.push_back({b.col, b.val * e.val % p});
            }
            normalize_row(w, p);
            if (w.empty()) continue;
            long np_ = ech.insert(w);
            if (np_ >= 0) worklist.push_back(ech.pivot_row(static_cast<u32>(np_)));
        }
    }
    Subspace s{n, p, {}};
    for (u32 c = 0; c < n; ++c)
        if (ech.has_pivot(c)) s.rows.push_back(ech.pivot_row(c));
    return s;
}

bool same_structure(const LieAlgebra& a, const LieAlgebra& b) {
    if (a.p() != b.p() || a.dim() != b.dim() || a.name() != b.name()) return false;
    if (a.basis_labels() != b.basis_labels()) return false;
    if (a.has_grading() != b.has_grading()) return false;
    if (a.has_grading() && a.grading() != b.grading()) return false;
    if (a.has_p_map() != b.has_p_map()) return false;
    const u64 np = a.pair_count();
    for (u64 pr = 0; pr < np; ++pr) {
        auto sa = a.pair_begin(pr), ea = a.pair_end(pr);
        auto sb = b.pair_begin(pr), eb = b.pair_end(pr);
        if (ea - sa != eb - sb) return false;
        for (; sa != ea; ++sa, ++sb)
            if (sa->col != sb->col || sa->val != sb->val) return false;
    }
    if (a.has_p_map())
        for (u32 i = 0; i < a.dim(); ++i) {
            const auto &ra = a.p_map()[i], &rb = b.p_map()[i];
            if (ra.size() != rb.size()) return false;
            for (std::size_t t = 0; t < ra.size(); ++t)
                if (ra[t].col != rb[t].col || ra[t].val != rb[t].val) return false;
        }
    return true;
}

bool is_valid_grading(const LieAlgebra& L, const std::vector<int>& weights) {
    if (weights.size() != L.dim()) return false;
    for (u32 i = 0; i < L.dim(); ++i)
        for (u32 j = i + 1; j < L.dim(); ++j) {
            u64 pr = LieAlgebra::pair_rank(i, j);
            for (const SparseEntry* e = L.pair_begin(pr); e != L.pair_end(pr); ++e)
                if (weights[e->col] != weights[i] + weights[j]) return false;
        }
    return true;
}

} // namespace modlie
