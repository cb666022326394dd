#ifndef MODLIE_PMAP_HPP
#define MODLIE_PMAP_HPP

#include <optional>
#include <string>
#include <vector>

#include "modlie/lie_algebra.hpp"

namespace modlie {

/// Solve ad(y) = ad(x)^p for y. Returns nullopt ("not inner") when the
/// p-th iterate of ad(x) is not an inner derivation. The returned y
/// satisfies the matrix identity exactly (verified before returning).
std::optional<Element> p_map_solve(const Element& x);

/// Basis-wise p-map for the whole algebra, all right-hand sides solved
/// against one elimination of the ad-coefficient system.
std::optional<std::vector<SparseRow>> solve_p_map_all(const AlgebraPtr& L);

/// x^[p] for an arbitrary element, extended from the basis table via the
/// scaling and sum axioms.
Element p_power(const Element& x);

/// s_i(x0, x1) summed over the maps u:[1..p-1] -> {0,1} with i zeros,
/// scaled by -1/i (the value-0 slots select x0; the word acts on x1).
Element s_i_wordsum(u32 i, const Element& x0, const Element& x1);

/// s_i(x0, x1) by coefficient extraction: i * s_i is the t^{i-1}
/// coefficient of ad(t x0 + x1)^{p-1}(x0), recovered by interpolation.
Element s_i_coefficient(u32 i, const Element& x0, const Element& x1);

struct PAxiomReport {
    bool axiom1 = true; // ad(e^[p]) = ad(e)^p on every basis vector
    bool axiom2 = true; // (a x)^[p] = a^p x^[p] on random samples
    bool axiom3 = true; // (x+y)^[p] = x^[p] + y^[p] + sum s_i(x,y)
    bool si_crosscheck = true;
    std::string witness; // first failure, empty if all pass
    bool all() const { return axiom1 && axiom2 && axiom3 && si_crosscheck; }
};

/// Checks the axioms of the stored p-map: axiom 1 exactly on the basis,
/// axioms 2 and 3 on seeded random samples, plus the word-sum vs
/// coefficient-extraction cross-check of the s_i values.
PAxiomReport verify_p_axioms(const AlgebraPtr& L, u32 samples, u64 seed);

} // namespace modlie

#endif
