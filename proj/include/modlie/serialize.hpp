#ifndef MODLIE_SERIALIZE_HPP
#define MODLIE_SERIALIZE_HPP

#include <optional>
#include <string>
#include <vector>

#include "modlie/deformation.hpp"
#include "modlie/lie_algebra.hpp"

namespace modlie {

/// Schema-versioned structured-text (JSON) algebra file. Coefficients are
/// least nonnegative residues, indices 0-based, brackets stored for i < j
/// only. Rendering is canonical: parse(render(L)) round-trips bit-exactly.
std::string render_algebra(const LieAlgebra& L, const std::string& family, std::optional<u32> n);

struct LoadedAlgebra {
    AlgebraPtr L;
    std::string family; // empty when the file carries none
    std::optional<u32> n;
    u32 schema_version = 0;
};

/// Throws std::runtime_error with a location-bearing message on malformed
/// input. Jacobi/grading are not validated here; `verify` runs those suites.
LoadedAlgebra parse_algebra(const std::string& text);

void write_algebra_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// One row of the theorem-verification table.
struct ResultRow {
    std::string family;
    std::optional<u32> n;
    u32 p = 0;
    bool ok = true;     // construction and checks ran
    std::string error;  // when !ok
    u32 listed = 0;
    u32 span = 0;
    std::string h2;     // total, or "partial(k)" in fallback mode
    std::string match;  // "yes" / "NO" / "error"
    double wall_ms = 0;
};

ResultRow row_from_report(const TheoremReport& rep, double wall_ms);

/// Tab-separated table with a fixed header. With timing off the wall column
/// renders as "-" so identical runs are byte-identical.
std::string render_result_table(const std::vector<ResultRow>& rows, bool with_timing);

} // namespace modlie

#endif
