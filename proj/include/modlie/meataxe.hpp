#ifndef MODLIE_MEATAXE_HPP
#define MODLIE_MEATAXE_HPP

#include <vector>

#include "modlie/lie_algebra.hpp"

namespace modlie {

/// Monic characteristic polynomial, ascending coefficients, degree = dim.
/// Hessenberg reduction, exact over F_p.
std::vector<u32> charpoly(const DenseMatrix& m);

/// Distinct monic irreducible factors over F_p, sorted by (degree, coeffs).
/// Cantor-Zassenhaus; the seed makes the randomized splitting reproducible.
std::vector<std::vector<u32>> distinct_irreducible_factors(std::vector<u32> f, u32 p, u64 seed);

struct SimplicityResult {
    enum class Verdict { Simple, NotSimple, Undecided } verdict;
    Subspace ideal;        // proper nonzero ideal when NotSimple
    u32 attempts_used = 0; // MeatAxe seeds consumed
};

/// Decides simplicity through irreducibility of the adjoint module with a
/// Norton-style certificate. Never returns a wrong answer: after the
/// attempt budget is exhausted the verdict is Undecided.
SimplicityResult is_simple(const AlgebraPtr& L, u64 seed = 0x6d656174, u32 budget = 24);

} // namespace modlie

#endif
