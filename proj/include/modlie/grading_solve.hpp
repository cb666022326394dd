#ifndef MODLIE_GRADING_SOLVE_HPP
#define MODLIE_GRADING_SOLVE_HPP

#include <vector>

#include "modlie/lie_algebra.hpp"

namespace modlie {

/// Result of solving the homogeneity constraints w(k) = w(i) + w(j) over all
/// stored structure constants.
///
/// `weights` is a canonical integer solution: within each connected component
/// of the constraint graph we take the least-squares projection of the
/// all-ones vector onto the rational solution space (falling back to the
/// first basis vector when the projection vanishes), scaled primitive, with
/// the sign chosen so the most negative weight is as close to zero as
/// possible. On W(n) this reproduces w(x^a D_j) = |a| - 1.
///
/// `found` is false when some component that carries constraints admits only
/// the zero grading.
struct GradingSolveResult {
    bool found = false;
    std::vector<int> weights;
    std::vector<std::vector<int>> space_basis; // primitive integer gradings spanning the space
};

GradingSolveResult grading_solve(const LieAlgebra& L);

} // namespace modlie

#endif
