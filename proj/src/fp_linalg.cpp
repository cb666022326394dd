#include "modlie/fp_linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace modlie {

void normalize_row(SparseRow& row, u32 p) {
    std::sort(row.begin(), row.end(), [](const SparseEntry& a, const SparseEntry& b) { return a.col < b.col; });
    SparseRow out;
    out.reserve(row.size());
    for (std::size_t i = 0; i < row.size();) {
        u64 v = 0;
        u32 c = row[i].col;
        while (i < row.size() && row[i].col == c) v += row[i++].val;
        u32 r = static_cast<u32>(v % p);
        if (r) out.push_back({c, r});
    }
    row.swap(out);
}

StreamEchelon::StreamEchelon(u32 ncols, u32 p, u32 aug_cols, bool track_provenance)
    : ncols_(ncols),
      main_cols_(ncols - aug_cols),
      p_(p),
      track_prov_(track_provenance),
      pivot_of_col_(ncols, -1),
      acc_(ncols, 0),
      mark_(ncols, 0) {
    if (aug_cols > ncols) throw std::invalid_argument("StreamEchelon: aug_cols > ncols");
}

long StreamEchelon::insert(const SparseRow& row) {
    const u64 row_id = next_row_id_++;
    std::vector<u32> touched;
    touched.reserve(row.size() * 4);
    auto scatter = [&](u32 col, u32 addend) {
        u32 v = acc_[col] + addend; // addend < p^2 is avoided by reducing first
        if (v >= p_) v %= p_;
        acc_[col] = v;
        if (!mark_[col]) {
            mark_[col] = 1;
            touched.push_back(col);
            heap_.push(col);
        }
    };

    for (const auto& e : row) {
        if (e.col >= ncols_) throw std::out_of_range("StreamEchelon: column out of range");
        u32 v = e.val % p_;
        if (v) scatter(e.col, v);
    }

    // provenance accumulator over inserted row ids
    SparseRow prov;
    if (track_prov_) prov.push_back({static_cast<u32>(row_id), 1});
    auto prov_sub = [&](const SparseRow& piv_prov, u32 factor) {
        if (!track_prov_) return;
        for (const auto& e : piv_prov) prov.push_back({e.col, e.val * (p_ - factor) % p_});
        normalize_row(prov, p_);
    };

    long result = -1;
    while (!heap_.empty()) {
        u32 c = heap_.top();
        heap_.pop();
        if (acc_[c] == 0) continue;
        if (c >= main_cols_ || pivot_of_col_[c] < 0) {
            // harvest: `c` is the lead of a new pivot row (or an augmented-only row)
            SparseRow out;
            out.push_back({c, acc_[c]});
            acc_[c] = 0;
            while (!heap_.empty()) {
                u32 cc = heap_.top();
                heap_.pop();
                if (acc_[cc] == 0) continue;
                out.push_back({cc, acc_[cc]});
                acc_[cc] = 0;
            }
            u32 lead_inv = inv_mod(out[0].val, p_);
            if (lead_inv != 1)
                for (auto& e : out) e.val = e.val * lead_inv % p_;
            stored_entries_ += out.size();
            if (c >= main_cols_) {
                degenerate_.push_back(std::move(out));
                if (track_prov_) {
                    if (lead_inv != 1)
                        for (auto& e : prov) e.val = e.val * lead_inv % p_;
                    degenerate_prov_.push_back(std::move(prov));
                }
                result = -1;
            } else {
                pivot_of_col_[c] = static_cast<long>(rows_.size());
                rows_.push_back(std::move(out));
                if (track_prov_) {
                    if (lead_inv != 1)
                        for (auto& e : prov) e.val = e.val * lead_inv % p_;
                    prov_.push_back(std::move(prov));
                }
                result = static_cast<long>(c);
            }
            break;
        }
        // eliminate against the pivot row with lead c
        u32 factor = acc_[c];
        acc_[c] = 0;
        const SparseRow& piv = rows_[pivot_of_col_[c]];
        u32 neg = p_ - factor;
        for (std::size_t i = 1; i < piv.size(); ++i) scatter(piv[i].col, neg * piv[i].val % p_);
        if (track_prov_) prov_sub(prov_[pivot_of_col_[c]], factor);
    }

    for (u32 c : touched) {
        acc_[c] = 0;
        mark_[c] = 0;
    }
    return result;
}

std::vector<std::vector<u8>> StreamEchelon::kernel() const {
    // pivot rows ordered by decreasing lead column for back-substitution
    std::vector<std::pair<u32, u32>> piv; // (lead col, row idx)
    piv.reserve(rows_.size());
    for (u32 c = 0; c < main_cols_; ++c)
        if (pivot_of_col_[c] >= 0) piv.emplace_back(c, static_cast<u32>(pivot_of_col_[c]));
    // ascending by construction; iterate in reverse below

    std::vector<std::vector<u8>> basis;
    for (u32 f = 0; f < main_cols_; ++f) {
        if (pivot_of_col_[f] >= 0) continue;
        std::vector<u8> v(main_cols_, 0);
        v[f] = 1;
        for (auto it = piv.rbegin(); it != piv.rend(); ++it) {
            if (it->first > f) continue; // entries of this pivot row are all > f except none relevant
            const SparseRow& row = rows_[it->second];
            u64 s = 0;
            for (std::size_t i = 1; i < row.size(); ++i)
                if (row[i].col < main_cols_) s += static_cast<u64>(row[i].val) * v[row[i].col];
            u32 r = static_cast<u32>(s % p_);
            v[it->first] = static_cast<u8>(r ? p_ - r : 0);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

std::vector<u32> StreamEchelon::solve(u32 aug_index) const {
    const u32 bcol = main_cols_ + aug_index;
    std::vector<u32> x(main_cols_, 0);
    for (u32 c = main_cols_; c-- > 0;) {
        if (pivot_of_col_[c] < 0) continue;
        const SparseRow& row = rows_[pivot_of_col_[c]];
        u64 rhs = 0, s = 0;
        for (std::size_t i = 1; i < row.size(); ++i) {
            if (row[i].col == bcol) rhs = row[i].val;
            else if (row[i].col < main_cols_) s += static_cast<u64>(row[i].val) * x[row[i].col];
        }
        x[c] = static_cast<u32>((rhs + p_ - s % p_) % p_);
    }
    return x;
}

StreamEchelon::Reduction StreamEchelon::reduce_track(const SparseRow& row) const {
    std::vector<u32> acc(ncols_, 0);
    std::vector<u8> mark(ncols_, 0);
    std::priority_queue<u32, std::vector<u32>, std::greater<u32>> heap;
    auto scatter = [&](u32 col, u32 addend) {
        u32 v = acc[col] + addend;
        if (v >= p_) v %= p_;
        acc[col] = v;
        if (!mark[col]) {
            mark[col] = 1;
            heap.push(col);
        }
    };
    for (const auto& e : row) {
        u32 v = e.val % p_;
        if (v) scatter(e.col, v);
    }
    SparseRow combo, remainder;
    while (!heap.empty()) {
        u32 c = heap.top();
        heap.pop();
        if (acc[c] == 0) continue;
        if (c < main_cols_ && pivot_of_col_[c] >= 0) {
            u32 factor = acc[c];
            acc[c] = 0;
            long idx = pivot_of_col_[c];
            const SparseRow& piv = rows_[idx];
            u32 neg = p_ - factor;
            for (std::size_t i = 1; i < piv.size(); ++i) scatter(piv[i].col, neg * piv[i].val % p_);
            if (track_prov_)
                for (const auto& e : prov_[idx]) combo.push_back({e.col, e.val * factor % p_});
        } else {
            remainder.push_back({c, acc[c]});
            acc[c] = 0;
        }
    }
    normalize_row(combo, p_);
    return Reduction{std::move(remainder), std::move(combo)};
}

SparseRow StreamEchelon::provenance_of_pivot(u32 col) const {
    if (!track_prov_) throw std::logic_error("StreamEchelon: provenance not tracked");
    return prov_[pivot_of_col_[col]];
}

SparseRow StreamEchelon::provenance_of_inconsistency(u32 idx) const {
    if (!track_prov_) throw std::logic_error("StreamEchelon: provenance not tracked");
    return degenerate_prov_[idx];
}

DenseMatrix DenseMatrix::identity(u32 n, u32 mod) {
    DenseMatrix m(n, n, mod);
    for (u32 i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

bool DenseMatrix::is_zero() const {
    for (u32 v : a)
        if (v) return false;
    return true;
}

std::vector<u32> DenseMatrix::apply(const std::vector<u32>& x) const {
    if (x.size() != nc) throw std::invalid_argument("DenseMatrix::apply: size mismatch");
    std::vector<u32> y(nr, 0);
    for (u32 r = 0; r < nr; ++r) {
        u64 s = 0;
        const u32* row = &a[static_cast<std::size_t>(r) * nc];
        for (u32 c = 0; c < nc; ++c) s += static_cast<u64>(row[c]) * x[c];
        y[r] = static_cast<u32>(s % p);
    }
    return y;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.nc != b.nr || a.p != b.p) throw std::invalid_argument("DenseMatrix: shape/modulus mismatch");
    DenseMatrix c(a.nr, b.nc, a.p);
    for (u32 r = 0; r < a.nr; ++r)
        for (u32 k = 0; k < a.nc; ++k) {
            u32 v = a.at(r, k);
            if (!v) continue;
            const u32* brow = &b.a[static_cast<std::size_t>(k) * b.nc];
            u32* crow = &c.a[static_cast<std::size_t>(r) * c.nc];
            for (u32 cc = 0; cc < b.nc; ++cc) crow[cc] = (crow[cc] + v * brow[cc]) % a.p;
        }
    return c;
}

DenseMatrix mat_pow(const DenseMatrix& m, u64 e) {
    DenseMatrix acc = DenseMatrix::identity(m.nr, m.p), base = m;
    while (e > 0) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

u32 dense_rank(const DenseMatrix& m) {
    std::vector<std::vector<u32>> rows(m.nr, std::vector<u32>(m.nc));
    for (u32 r = 0; r < m.nr; ++r)
        for (u32 c = 0; c < m.nc; ++c) rows[r][c] = m.at(r, c);
    return dense_rank(rows, m.p);
}

u32 dense_rank(std::vector<std::vector<u32>>& m, u32 p) {
    if (m.empty()) return 0;
    const std::size_t nr = m.size(), nc = m[0].size();
    for (auto& row : m)
        for (auto& v : row) v %= p;
    u32 rank = 0;
    for (std::size_t c = 0; c < nc && rank < nr; ++c) {
        std::size_t piv = nr;
        for (std::size_t r = rank; r < nr; ++r)
            if (m[r][c]) {
                piv = r;
                break;
            }
        if (piv == nr) continue;
        std::swap(m[rank], m[piv]);
        u32 inv = inv_mod(m[rank][c], p);
        for (std::size_t cc = c; cc < nc; ++cc) m[rank][cc] = m[rank][cc] * inv % p;
        for (std::size_t r = 0; r < nr; ++r) {
            if (r == rank || m[r][c] == 0) continue;
            u32 f = p - m[r][c];
            for (std::size_t cc = c; cc < nc; ++cc) m[r][cc] = (m[r][cc] + f * m[rank][cc]) % p;
        }
        ++rank;
    }
    return rank;
}

u32 sparse_rank(const std::vector<SparseRow>& rows, u32 ncols, u32 p) {
    StreamEchelon e(ncols, p);
    for (const auto& r : rows) e.insert(r);
    return e.rank();
}

} // namespace modlie
