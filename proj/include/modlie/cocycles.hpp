#ifndef MODLIE_COCYCLES_HPP
#define MODLIE_COCYCLES_HPP

#include <string>
#include <vector>

#include "modlie/cochain.hpp"
#include "modlie/families.hpp"

namespace modlie {

/// Squaring operator of a derivation:
///   Sq(D)(x,y) = sum_{i=1}^{p-1} [D^i x, D^{p-i} y] / (i! (p-i)!).
/// The matrix must satisfy the Leibniz identity (checked on seeded random
/// pairs); the divisions are precomputed inverse factorials mod p.
Cochain squaring(const AlgebraPtr& L, const DenseMatrix& D, u64 seed = 0x5178);

/// Sq(gamma) := Sq(ad(gamma)).
Cochain squaring(const Element& gamma);

/// Theta(D_i, D_j) = D_ij(x^tau) on the degree -1 basis of S(n); zero on
/// every other pair of the canonical basis.
Cochain theta_cocycle(const BuiltAlgebra& S);

/// Pi_ij on H(n), n >= 4, i < j, j != i'.
Cochain pi_ij_cocycle(const BuiltAlgebra& H, u32 i, u32 j);

/// Pi_i on H(n), n >= 4, 1 <= i <= m. Both defining clauses are summed;
/// their argument shapes are disjoint and that is asserted at runtime.
Cochain pi_i_cocycle(const BuiltAlgebra& H, u32 i);

/// Phi on H(n): the |delta| = 3 sum, evaluated verbatim on ordered basis
/// pairs and extended by antisymmetry. Negative or truncated target
/// exponents and the excluded targets x^0, x^sigma contribute zero.
Cochain phi_cocycle(const BuiltAlgebra& H);

struct NamedCochain {
    std::string name;
    Cochain c;
};

/// The classes listed by the H^2 description of the family: Sq(D_i) for W;
/// Sq(D_i) and Theta for S; Sq(D_K(x_i)) and Sq(D_K(1)) for K; the Sq, Pi
/// and Phi family for H; the five Sq classes for M; empty for sl/psl.
std::vector<NamedCochain> theorem_cocycles(const BuiltAlgebra& built);

} // namespace modlie

#endif
