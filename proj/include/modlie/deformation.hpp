#ifndef MODLIE_DEFORMATION_HPP
#define MODLIE_DEFORMATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "modlie/cocycles.hpp"
#include "modlie/cohomology.hpp"

namespace modlie {

/// First-order deformation [x,y]' = [x,y] + eps f(x,y) over F[eps]/(eps^2).
/// The eps-component of the Jacobi defect of [-,-]' is computed by direct
/// rule application, independently of the differential code path.
struct DualNumberAlgebra {
    AlgebraPtr base;
    Cochain f;

    /// eps-part of [[x,y]',z]' + [[y,z]',x]' + [[z,x]',y]' on basis triples.
    Element jacobi_eps_defect(u32 i, u32 j, u32 k) const;

    struct JacobiScan {
        bool zero;
        u32 i = 0, j = 0, k = 0; // witness when nonzero
    };
    /// Exhaustive for dim <= 130, seeded random triples above.
    JacobiScan jacobi_scan(u64 random_triples = 100000, u64 seed = 0xdef0) const;
};

DualNumberAlgebra deform(const AlgebraPtr& L, const Cochain& f);

/// Equivalence of two first-order deformations. A positive answer carries
/// the map id + eps*phi, verified to intertwine the deformed brackets on
/// every basis pair; a negative answer carries the coboundary certificate.
struct EquivalenceResult {
    bool equivalent;
    Cochain phi;
    bool witness_verified;
    std::vector<std::pair<u64, u32>> certificate;
};
EquivalenceResult deformation_equiv(const Cochain& f, const Cochain& g);

struct VerifyOptions {
    u64 block_cap = 200000000;
    double time_cap_seconds = 0;
    u32 jobs = 1;
    u64 batch_col_cap = 400000;
};

/// End-to-end check of one family: build, materialize the listed classes,
/// check each is a cocycle, compute the span of their classes and dim H^2
/// in graded mode, and report the three-way match. When the full graded
/// computation exceeds the budget, H^2 is computed exactly on the weight
/// blocks that contain the listed classes and the match is judged
/// blockwise (fallback mode).
struct TheoremReport {
    FamilySpec spec;
    u32 listed = 0;
    std::vector<std::pair<std::string, bool>> class_checks; // cocycle verdicts
    u32 span = 0;
    bool h2_complete = false;
    u64 h2_total = 0;
    bool used_fallback = false;
    std::vector<std::pair<int, u64>> h2_on_listed_weights;
    bool match = false;
    double seconds = 0;
};

TheoremReport verify_theorem(const FamilySpec& spec, const VerifyOptions& opts = VerifyOptions{});

} // namespace modlie

#endif
