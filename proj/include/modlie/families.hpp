#ifndef MODLIE_FAMILIES_HPP
#define MODLIE_FAMILIES_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "modlie/lie_algebra.hpp"
#include "modlie/trunc_poly.hpp"

namespace modlie {

enum class Family { W, S, H, K, M, sl, psl };

std::string family_name(Family f);
std::optional<Family> family_from_string(const std::string& s);

struct FamilySpec {
    Family family;
    u32 n; // ignored for M (always 2 variables)
    u32 p;
};

/// Derivation sum f_j D_j of A(n), determined by its values on the
/// generators x_1..x_n.
struct DerivationOnA {
    u32 n, p;
    std::vector<TruncatedPolynomial> coeffs;

    DerivationOnA(u32 n_, u32 p_);
    static DerivationOnA zero(u32 n, u32 p) { return DerivationOnA(n, p); }

    bool is_zero() const;
    TruncatedPolynomial apply(const TruncatedPolynomial& f) const;
    TruncatedPolynomial divergence() const;

    friend DerivationOnA operator+(DerivationOnA a, const DerivationOnA& b);
    friend DerivationOnA operator-(DerivationOnA a, const DerivationOnA& b);
    friend bool operator==(const DerivationOnA& a, const DerivationOnA& b) {
        return a.n == b.n && a.p == b.p && a.coeffs == b.coeffs;
    }

    /// Coordinates in the canonical W(n) basis x^a D_j -> (j-1) p^n + rank(a).
    SparseRow w_coords() const;
    static DerivationOnA from_w_coords(const SparseRow& row, u32 n, u32 p);
};

/// Commutator [D,E], computed by evaluating both compositions on the
/// generators (a derivation is determined by its values on x_1..x_n).
DerivationOnA commutator(const DerivationOnA& d, const DerivationOnA& e);

/// D_ij(f) = D_j(f) D_i - D_i(f) D_j.
DerivationOnA d_ij(const TruncatedPolynomial& f, u32 i, u32 j);

/// D_H(f) = sum_{i<=m} [D_i(f) D_{i+m} - D_{i+m}(f) D_i], n = 2m.
DerivationOnA d_hamiltonian(const TruncatedPolynomial& f, u32 m);

/// D_K(f) = sum_{i<=m} [D_i(f)D_{i+m} - D_{i+m}(f)D_i]
///        + sum_{j<=2m} x_j [D_n(f)D_j - D_j(f)D_n] + 2 f D_n, n = 2m+1.
DerivationOnA d_contact(const TruncatedPolynomial& f, u32 m);

/// Echelonized span with basis re-expression. Candidates inserted in order;
/// the ones that enlarge the span become basis vectors.
class SpanSolver {
public:
    SpanSolver(u32 ambient_dim, u32 p);
    /// Returns the basis index assigned to the candidate, or -1 if dependent.
    long insert_candidate(const SparseRow& v);
    u32 basis_size() const { return static_cast<u32>(arrival_to_basis_count_); }
    /// Exact coordinates of target over the selected basis, or nullopt
    /// when the target lies outside the span.
    std::optional<std::vector<u32>> express(const SparseRow& target) const;

private:
    StreamEchelon ech_;
    std::vector<long> arrival_to_basis_;
    std::size_t arrival_to_basis_count_ = 0;
};

/// express_in_span on Elements: exact coordinates over `vectors`,
/// or nullopt with the target certified outside the span.
std::optional<std::vector<u32>> express_in_span(const std::vector<Element>& vectors, const Element& target);

/// A constructed algebra together with the family bookkeeping the cocycle
/// formulas need (monomial labels, embeddings, re-expression solvers).
struct BuiltAlgebra {
    FamilySpec spec;
    AlgebraPtr L;
    u32 m = 0; // half arity for H, K

    // H, K: basis index <-> monomial rank of the defining isomorphism
    std::vector<u64> index_to_rank;
    std::vector<long> rank_to_index;

    // S: W(n)-coordinates of each basis vector and the span solver
    std::vector<SparseRow> basis_w_coords;
    std::shared_ptr<SpanSolver> span;

    // gradings usable for block refinement (independent, verified);
    // first entry is the attached Z-grading
    std::vector<std::vector<int>> refinement_gradings;
};

BuiltAlgebra build_W(u32 n, u32 p);
BuiltAlgebra build_S(u32 n, u32 p);
BuiltAlgebra build_H(u32 n, u32 p);
BuiltAlgebra build_K(u32 n, u32 p);
BuiltAlgebra build_melikian(u32 p);
BuiltAlgebra build_classical(Family tag, u32 n, u32 p);

BuiltAlgebra build_family(const FamilySpec& spec);

/// Desk-scale parameter grid accepted by the CLI.
bool in_supported_grid(const FamilySpec& spec);
std::string supported_grid_description();

// W(n) basis arithmetic shared with the cocycle formulas.
u32 w_basis_index(u32 n, u32 p, u32 j, u64 rank); // j is 1-based
std::pair<u32, u64> w_basis_decode(u32 n, u32 p, u32 index);

} // namespace modlie

#endif
