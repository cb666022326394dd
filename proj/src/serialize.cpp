#include "modlie/serialize.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace modlie {

using ordered_json = nlohmann::ordered_json;

std::string render_algebra(const LieAlgebra& L, const std::string& family, std::optional<u32> n) {
    ordered_json j;
    j["schema_version"] = 1;
    j["name"] = L.name();
    if (family.empty()) j["family"] = nullptr;
    else j["family"] = family;
    if (n) j["n"] = *n;
    else j["n"] = nullptr;
    j["p"] = L.p();
    j["dim"] = L.dim();
    j["basis_labels"] = L.basis_labels();
    if (L.has_grading()) j["grading"] = L.grading();
    else j["grading"] = nullptr;

    ordered_json brackets = ordered_json::array();
    for (u32 i = 0; i < L.dim(); ++i)
        for (u32 jj = i + 1; jj < L.dim(); ++jj) {
            u64 pr = LieAlgebra::pair_rank(i, jj);
            if (L.pair_begin(pr) == L.pair_end(pr)) continue;
            ordered_json row = ordered_json::array();
            for (const SparseEntry* e = L.pair_begin(pr); e != L.pair_end(pr); ++e)
                row.push_back({e->col, e->val});
            brackets.push_back({i, jj, row});
        }
    j["brackets"] = std::move(brackets);

    if (L.has_p_map()) {
        ordered_json pm = ordered_json::array();
        for (u32 i = 0; i < L.dim(); ++i) {
            if (L.p_map()[i].empty()) continue;
            ordered_json row = ordered_json::array();
            for (const auto& e : L.p_map()[i]) row.push_back({e.col, e.val});
            pm.push_back({i, row});
        }
        j["p_map"] = std::move(pm);
    } else {
        j["p_map"] = nullptr;
    }
    return j.dump(1) + "\n";
}

LoadedAlgebra parse_algebra(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("algebra file: ") + e.what());
    }
    auto fail = [](const std::string& what) -> void {
        throw std::runtime_error("algebra file: " + what);
    };
    if (!j.contains("schema_version") || !j["schema_version"].is_number_unsigned())
        fail("missing schema_version");
    u32 schema = j["schema_version"].get<u32>();
    if (schema != 1) fail("unsupported schema_version " + std::to_string(schema));
    for (const char* field : {"name", "p", "dim", "basis_labels", "brackets"})
        if (!j.contains(field)) fail(std::string("missing field '") + field + "'");

    const u32 p = j["p"].get<u32>();
    const u32 dim = j["dim"].get<u32>();
    if (!is_prime(p)) fail("p = " + std::to_string(p) + " is not prime");
    if (dim == 0) fail("dim must be positive");

    LieAlgebra::Builder b(j["name"].get<std::string>(), p, dim);
    const auto& labels = j["basis_labels"];
    if (!labels.is_array() || labels.size() != dim) fail("basis_labels must list dim entries");
    for (u32 i = 0; i < dim; ++i) b.set_label(i, labels[i].get<std::string>());

    std::size_t row_no = 0;
    for (const auto& row : j["brackets"]) {
        ++row_no;
        auto loc = [&] { return " (brackets entry " + std::to_string(row_no) + ")"; };
        if (!row.is_array() || row.size() != 3) fail("bracket rows are [i, j, [[k,c],...]]" + loc());
        u32 i = row[0].get<u32>(), jj = row[1].get<u32>();
        if (!(i < jj) || jj >= dim) fail("bracket indices need i < j < dim" + loc());
        for (const auto& e : row[2]) {
            if (!e.is_array() || e.size() != 2) fail("bracket entries are [k, c]" + loc());
            u32 k = e[0].get<u32>(), c = e[1].get<u32>();
            if (k >= dim) fail("target index out of range" + loc());
            if (c == 0 || c >= p) fail("coefficients lie in [1, p)" + loc());
            b.add_bracket_entry(i, jj, k, c);
        }
    }

    if (j.contains("grading") && !j["grading"].is_null()) {
        const auto& g = j["grading"];
        if (!g.is_array() || g.size() != dim) fail("grading must list dim weights");
        b.set_grading(g.get<std::vector<int>>());
    }
    if (j.contains("p_map") && !j["p_map"].is_null()) {
        std::vector<SparseRow> images(dim);
        for (const auto& row : j["p_map"]) {
            if (!row.is_array() || row.size() != 2) fail("p_map rows are [i, [[k,c],...]]");
            u32 i = row[0].get<u32>();
            if (i >= dim) fail("p_map index out of range");
            for (const auto& e : row[1]) {
                u32 k = e[0].get<u32>(), c = e[1].get<u32>();
                if (k >= dim || c == 0 || c >= p) fail("p_map entry out of range");
                images[i].push_back({k, c});
            }
        }
        b.set_p_map(std::move(images));
    }

    LieAlgebra::Builder::Options opts;
    opts.check_jacobi = false;     // `verify` owns the invariant suites
    opts.validate_grading = false; // likewise
    LoadedAlgebra out;
    out.L = b.build(opts);
    out.schema_version = schema;
    if (j.contains("family") && !j["family"].is_null()) out.family = j["family"].get<std::string>();
    if (j.contains("n") && !j["n"].is_null()) out.n = j["n"].get<u32>();
    return out;
}

void write_algebra_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ResultRow row_from_report(const TheoremReport& rep, double wall_ms) {
    ResultRow row;
    row.family = family_name(rep.spec.family);
    if (rep.spec.family != Family::M) row.n = rep.spec.n;
    row.p = rep.spec.p;
    row.listed = rep.listed;
    row.span = rep.span;
    if (rep.h2_complete) {
        row.h2 = std::to_string(rep.h2_total);
    } else {
        u64 s = 0;
        for (auto& [w, h] : rep.h2_on_listed_weights) s += h;
        row.h2 = "partial(" + std::to_string(s) + ")";
    }
    row.match = rep.match ? "yes" : "NO";
    row.wall_ms = wall_ms;
    return row;
}

std::string render_result_table(const std::vector<ResultRow>& rows, bool with_timing) {
    std::ostringstream out;
    out << "family\tn\tp\tlisted\tspan\th2\tmatch\twall_ms\n";
    for (const auto& r : rows) {
        out << r.family << '\t' << (r.n ? std::to_string(*r.n) : std::string("-")) << '\t' << r.p << '\t';
        if (!r.ok) {
            out << "-\t-\t-\terror\t";
        } else {
            out << r.listed << '\t' << r.span << '\t' << r.h2 << '\t' << r.match << '\t';
        }
        if (with_timing) out << static_cast<u64>(r.wall_ms);
        else out << '-';
        out << '\n';
    }
    return out.str();
}

} // namespace modlie
