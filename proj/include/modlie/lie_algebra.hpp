#ifndef MODLIE_LIE_ALGEBRA_HPP
#define MODLIE_LIE_ALGEBRA_HPP

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "modlie/fp_linalg.hpp"

namespace modlie {

class LieAlgebra;
using AlgebraPtr = std::shared_ptr<const LieAlgebra>;

/// Coordinate vector in a LieAlgebra's basis. Carries the parent algebra,
/// which is checked on every binary operation.
struct Element {
    AlgebraPtr parent;
    std::vector<u32> coords;

    bool is_zero() const {
        for (u32 v : coords)
            if (v) return false;
        return true;
    }
    friend bool operator==(const Element& a, const Element& b) {
        return a.parent == b.parent && a.coords == b.coords;
    }
    friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }
};

/// Row-echelon basis of a subspace of F_p^dim.
struct Subspace {
    u32 ambient_dim = 0;
    u32 p = 2;
    std::vector<SparseRow> rows; // echelon rows, lead coefficient 1

    u32 dim() const { return static_cast<u32>(rows.size()); }
    bool contains(const std::vector<u32>& coords) const;
};

/// Finite-dimensional Lie algebra over F_p given by a structure-constant
/// table. Only pairs i<j are stored; antisymmetry and [e_i,e_i]=0 are
/// structural. Immutable after construction and shareable across threads.
class LieAlgebra : public std::enable_shared_from_this<LieAlgebra> {
public:
    struct PMap {
        std::vector<SparseRow> images; // per basis index
    };

    u32 p() const { return p_; }
    u32 dim() const { return dim_; }
    const std::string& name() const { return name_; }
    const std::vector<std::string>& basis_labels() const { return labels_; }

    bool has_grading() const { return grading_.has_value(); }
    const std::vector<int>& grading() const { return *grading_; }
    int min_weight() const;
    int max_weight() const;

    bool has_p_map() const { return p_map_.has_value(); }
    const std::vector<SparseRow>& p_map() const { return p_map_->images; }

    static u64 pair_rank(u32 i, u32 j) { return static_cast<u64>(j) * (j - 1) / 2 + i; }
    u64 pair_count() const { return static_cast<u64>(dim_) * (dim_ - 1) / 2; }

    /// Structure constants of [e_i, e_j] for i < j, as stored.
    const SparseEntry* pair_begin(u64 pr) const { return arena_.data() + offsets_[pr]; }
    const SparseEntry* pair_end(u64 pr) const { return arena_.data() + offsets_[pr + 1]; }

    /// [e_i, e_j] for arbitrary i, j (sign handled; empty when i == j).
    SparseRow bracket_basis(u32 i, u32 j) const;

    Element zero() const;
    Element basis_element(u32 k) const;
    Element element(const std::vector<i64>& ints) const;
    Element element_from_row(const SparseRow& row) const;

    /// Raw-coordinate bracket used by hot paths; result accumulated densely.
    std::vector<u32> bracket_coords(const std::vector<u32>& x, const std::vector<u32>& y) const;

    /// [row-of-(t,c), e_k] as a sparse row.
    SparseRow bracket_row_basis(const SparseRow& row, u32 k) const;

    u64 table_nnz() const { return arena_.size(); }

    /// For fixed (i, k): the list of (t, c) with [e_i, e_t] having
    /// coefficient c at e_k. Cached on first use.
    const SparseRow& ad_transpose(u32 i, u32 k) const;

    /// For fixed k: the list of (pair_rank, c) with c_{ij}^k != 0.
    const std::vector<std::pair<u64, u32>>& producers(u32 k) const;

    class Builder;

private:
    LieAlgebra() = default;

    std::string name_;
    u32 p_ = 5, dim_ = 0;
    std::vector<std::string> labels_;
    std::vector<u64> offsets_;
    std::vector<SparseEntry> arena_;
    std::optional<std::vector<int>> grading_;
    std::optional<PMap> p_map_;

    mutable std::once_flag adT_once_, prod_once_;
    mutable std::vector<SparseRow> adT_;
    mutable std::vector<std::vector<std::pair<u64, u32>>> producers_;
    void build_adT() const;
    void build_producers() const;
};

/// Accumulates structure constants and finalizes into an immutable algebra.
/// build() runs the Jacobi gate: exhaustive on all basis triples for
/// dim <= 130, otherwise on sampled triples (seeded, deterministic).
class LieAlgebra::Builder {
public:
    Builder(std::string name, u32 p, u32 dim);

    void set_label(u32 i, std::string label);
    /// Requires i < j; entries (k, c) accumulate.
    void add_bracket_entry(u32 i, u32 j, u32 k, u32 c);
    void set_bracket(u32 i, u32 j, const SparseRow& row);
    void set_grading(std::vector<int> weights);
    void set_p_map(std::vector<SparseRow> images);

    struct Options {
        bool check_jacobi = true;
        bool validate_grading = true;
        u64 random_triples = 100000; // used above the exhaustive cutoff
        u64 seed = 0x6a61636f62u;
        u32 exhaustive_limit = 130;
    };
    AlgebraPtr build(const Options& opts);
    AlgebraPtr build();

private:
    std::string name_;
    u32 p_, dim_;
    std::vector<std::string> labels_;
    struct RawEntry {
        u64 pr;
        u32 k, c;
    };
    std::vector<RawEntry> raw_;
    std::optional<std::vector<int>> grading_;
    std::optional<PMap> p_map_;
};

// -- lie_core operations ----------------------------------------------------

Element bracket(const Element& x, const Element& y);
Element add(const Element& x, const Element& y);
Element sub(const Element& x, const Element& y);
Element scale(const Element& x, u32 c);

/// [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]; zero iff Jacobi
/// holds on the triple.
Element jacobi_defect(const AlgebraPtr& L, u32 i, u32 j, u32 k);

DenseMatrix ad_matrix(const Element& x);

struct KillingForm {
    DenseMatrix gram;
    u32 rank;
};
KillingForm killing_form(const AlgebraPtr& L);

Subspace derived_subalgebra(const AlgebraPtr& L);
Subspace center(const AlgebraPtr& L);
Subspace ideal_closure(const Element& x);

/// Exact homogeneity scan: c_{ij}^k != 0 implies w(k) = w(i) + w(j).
bool is_valid_grading(const LieAlgebra& L, const std::vector<int>& weights);

/// Field-for-field comparison of two algebras (labels, table, grading, p-map).
bool same_structure(const LieAlgebra& a, const LieAlgebra& b);

} // namespace modlie

#endif
