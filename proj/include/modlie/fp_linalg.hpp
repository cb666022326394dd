#ifndef MODLIE_FP_LINALG_HPP
#define MODLIE_FP_LINALG_HPP

#include <cstdint>
#include <queue>
#include <vector>

#include "modlie/fp.hpp"

namespace modlie {

using u8 = std::uint8_t;

struct SparseEntry {
    u32 col;
    u32 val;
    bool operator==(const SparseEntry&) const = default;
};
using SparseRow = std::vector<SparseEntry>;

/// Sort by column, combine duplicates mod p, drop zeros.
void normalize_row(SparseRow& row, u32 p);

/// Streaming row-echelon form over F_p.
///
/// Rows are fed one at a time; each is reduced against the pivot rows seen so
/// far and either becomes a new pivot (stored as inserted, never updated
/// afterwards, so fill-in stays bounded by first-insertion size) or vanishes.
/// Ranks are exact and deterministic: reduction walks columns in increasing
/// order and a row's pivot is its lowest surviving column.
///
/// With `aug_cols` > 0 the last aug_cols columns are right-hand sides:
/// they participate in reduction but are never chosen as pivots. Rows whose
/// main part vanishes while an augmented entry survives are kept separately
/// as inconsistency witnesses.
class StreamEchelon {
public:
    StreamEchelon(u32 ncols, u32 p, u32 aug_cols = 0, bool track_provenance = false);

    /// Returns the pivot column created, or -1 if the row vanished
    /// (or was moved to the inconsistency list).
    long insert(const SparseRow& row);

    u32 rank() const { return static_cast<u32>(rows_.size()); }
    u32 main_cols() const { return main_cols_; }
    u32 modulus() const { return p_; }

    bool has_pivot(u32 col) const { return pivot_of_col_[col] >= 0; }
    const SparseRow& pivot_row(u32 col) const { return rows_[pivot_of_col_[col]]; }

    /// Kernel of the main-column space as dense vectors, one per free
    /// column, in ascending free-column order.
    std::vector<std::vector<u8>> kernel() const;

    /// Back-substituted solution of the system encoded by the pivot rows for
    /// augmented column k (free variables set to zero). Only meaningful when
    /// no inconsistency row touches k.
    std::vector<u32> solve(u32 aug_index) const;

    /// Rows that reduced to zero on the main columns with a nonzero
    /// augmented part. Entry columns are >= main_cols().
    const std::vector<SparseRow>& inconsistency_rows() const { return degenerate_; }

    /// Reduce a row against the current pivots without inserting it.
    /// Returns the remainder and (when provenance is tracked) the
    /// combination of previously inserted rows that was subtracted, so
    /// row = combination + remainder.
    struct Reduction {
        SparseRow remainder;
        SparseRow combination; // over inserted row ids
    };
    Reduction reduce_track(const SparseRow& row) const;

    /// Provenance (combination over inserted row ids) of the pivot row with
    /// the given pivot column, or of inconsistency row `idx` when col is
    /// negative. Requires track_provenance.
    SparseRow provenance_of_pivot(u32 col) const;
    SparseRow provenance_of_inconsistency(u32 idx) const;

    u64 stored_entries() const { return stored_entries_; }

private:
    u32 ncols_, main_cols_, p_;
    bool track_prov_;
    u64 next_row_id_ = 0;
    u64 stored_entries_ = 0;
    std::vector<long> pivot_of_col_;
    std::vector<SparseRow> rows_;
    std::vector<SparseRow> prov_;
    std::vector<SparseRow> degenerate_;
    std::vector<SparseRow> degenerate_prov_;

    // scratch for the scatter-gather reduction
    std::vector<u32> acc_;
    std::vector<u8> mark_;
    std::priority_queue<u32, std::vector<u32>, std::greater<u32>> heap_;
};

/// Row-major dense matrix over F_p.
struct DenseMatrix {
    u32 nr = 0, nc = 0, p = 2;
    std::vector<u32> a;

    DenseMatrix() = default;
    DenseMatrix(u32 rows, u32 cols, u32 mod) : nr(rows), nc(cols), p(mod), a(static_cast<std::size_t>(rows) * cols, 0) {}
    static DenseMatrix identity(u32 n, u32 mod);

    u32& at(u32 r, u32 c) { return a[static_cast<std::size_t>(r) * nc + c]; }
    u32 at(u32 r, u32 c) const { return a[static_cast<std::size_t>(r) * nc + c]; }

    bool is_zero() const;
    std::vector<u32> apply(const std::vector<u32>& x) const; // matrix * vector

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
    friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
        return a.nr == b.nr && a.nc == b.nc && a.p == b.p && a.a == b.a;
    }
};

DenseMatrix mat_pow(const DenseMatrix& m, u64 e);

/// Exact rank of a dense matrix (destructive), entries reduced mod p.
u32 dense_rank(std::vector<std::vector<u32>>& m, u32 p);

u32 dense_rank(const DenseMatrix& m);

/// Convenience: rank of a list of sparse rows.
u32 sparse_rank(const std::vector<SparseRow>& rows, u32 ncols, u32 p);

} // namespace modlie

#endif
