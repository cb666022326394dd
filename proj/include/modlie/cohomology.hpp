#ifndef MODLIE_COHOMOLOGY_HPP
#define MODLIE_COHOMOLOGY_HPP

#include <string>
#include <vector>

#include "modlie/cochain.hpp"

namespace modlie {

enum class CohomMode { Graded, Dense };

struct CohomOptions {
    u32 q = 2;
    CohomMode mode = CohomMode::Graded;
    u64 block_cap = 200000000; // C^q + C^{q+1} coordinate cap per weight block
    double time_cap_seconds = 0; // 0 = unlimited
    u32 jobs = 1;
    bool want_representatives = false;
    std::vector<int> restrict_weights; // nonempty: compute only these blocks
    u64 batch_col_cap = 400000;        // live C^q columns per elimination batch
};

struct BlockReport {
    int weight = 0;
    u64 dim_low = 0;  // C^{q-1}
    u64 dim_mid = 0;  // C^q
    u64 dim_high = 0; // C^{q+1}
    u64 rank_low = 0; // rank d_{q-1}
    u64 rank_mid = 0; // rank d_q
    u64 h = 0;
    bool completed = false;
    bool skipped_budget = false;
    double seconds = 0;
};

struct CohomologyReport {
    u32 q = 2;
    bool graded = true;
    std::vector<BlockReport> blocks; // ascending weight
    u64 total_h = 0;
    bool complete = true; // every block completed
    double seconds = 0;
    std::vector<Cochain> representatives; // canonical reduced form, by weight
};

/// Coordinate counts of C^q per weight of the attached Z-grading.
struct WeightBlockInfo {
    int weight;
    u64 count;
};
std::vector<WeightBlockInfo> weight_blocks(const AlgebraPtr& L, u32 q);

/// Exact dim H^q by block-diagonalized sparse elimination. Graded mode
/// refines the attached Z-grading by every independent grading of the
/// algebra (the differential preserves each one), which keeps the
/// elimination blocks small; reports stay aggregated per Z-weight.
CohomologyReport h_dim(const AlgebraPtr& L, const CohomOptions& opts);

/// Solve d1(phi) = c. A negative answer carries an exact certificate:
/// a functional y on the 2-cochain coordinates with y(d1 x) = 0 for all x
/// and y(c) != 0.
struct CoboundaryResult {
    bool is_coboundary;
    Cochain phi;                                  // degree 1, valid when solved
    std::vector<std::pair<u64, u32>> certificate; // (C^2 coordinate id, coeff)
};
CoboundaryResult coboundary_solve(const Cochain& c);

/// Dimension of the span of the classes of the given cocycles in H^2,
/// computed as rank(cocycles with im d1) - rank(im d1) on their blocks.
u32 class_span_dim(const std::vector<Cochain>& cocycles);

} // namespace modlie

#endif
