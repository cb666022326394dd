// Command-line workbench: construct the Cartan-type families, verify their
// invariants, compute graded H^2, and run the theorem table.
//
// Exit codes: 0 = all pass, 1 = mathematical mismatch, 2 = usage or parse
// error, 3 = budget exceeded.

#include <CLI11.hpp>
#include <random>
#include <chrono>
#include <iostream>
#include <sstream>

#include "modlie/cohomology.hpp"
#include "modlie/deformation.hpp"
#include "modlie/meataxe.hpp"
#include "modlie/pmap.hpp"
#include "modlie/serialize.hpp"

using namespace modlie;

namespace {

constexpr int EXIT_OK = 0, EXIT_MISMATCH = 1, EXIT_USAGE = 2, EXIT_BUDGET = 3;

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct CommonFlags {
    u64 seed = 20240601;
    u32 jobs = 1;
    u64 block_cap = 200000000;
    double time_cap = 0;
};

std::optional<FamilySpec> parse_family_spec(const std::string& family, u32 n, u32 p, std::string& err) {
    auto fam = family_from_string(family);
    if (!fam) {
        err = "unknown family '" + family + "'";
        return std::nullopt;
    }
    FamilySpec spec{*fam, *fam == Family::M ? 2u : n, p};
    if (!is_prime(p)) {
        err = "p = " + std::to_string(p) + " is not prime; supported grid: " + supported_grid_description();
        return std::nullopt;
    }
    if (!in_supported_grid(spec)) {
        err = "unsupported parameters; supported grid: " + supported_grid_description();
        return std::nullopt;
    }
    return spec;
}

int cmd_construct(const std::string& family, u32 n, u32 p, const std::string& out_path) {
    std::string err;
    auto spec = parse_family_spec(family, n, p, err);
    if (!spec) {
        std::cerr << "construct: " << err << "\n";
        return EXIT_USAGE;
    }
    BuiltAlgebra built = build_family(*spec);
    std::optional<u32> n_field;
    if (spec->family != Family::M) n_field = spec->n;
    std::string text = render_algebra(*built.L, family_name(spec->family), n_field);
    write_algebra_file(out_path, text);
    std::cout << "name: " << built.L->name() << "\n";
    std::cout << "dim: " << built.L->dim() << "\n";
    if (built.L->has_grading())
        std::cout << "grading: [" << built.L->min_weight() << ", " << built.L->max_weight() << "]\n";
    else
        std::cout << "grading: none\n";
    std::cout << "file: " << out_path << "\n";
    return EXIT_OK;
}

int cmd_verify(const std::string& in_path, std::vector<std::string> checks, const CommonFlags& flags) {
    LoadedAlgebra loaded;
    try {
        loaded = parse_algebra(read_text_file(in_path));
    } catch (const std::exception& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return EXIT_USAGE;
    }
    const auto& L = loaded.L;
    if (checks.empty()) checks = {"jacobi", "grading", "pmap", "simple"};

    bool any_fail = false;
    std::ostringstream out;
    out << "{\n  \"algebra\": \"" << L->name() << "\",\n  \"checks\": [\n";
    bool first = true;
    auto emit = [&](const std::string& name, const std::string& status, const std::string& detail) {
        if (!first) out << ",\n";
        first = false;
        out << "    {\"check\": \"" << name << "\", \"status\": \"" << status << "\"";
        if (!detail.empty()) out << ", \"detail\": \"" << detail << "\"";
        out << "}";
        if (status == "fail") any_fail = true;
    };

    for (const auto& check : checks) {
        if (check == "jacobi") {
            bool ok = true;
            std::string witness;
            const u32 dimn = L->dim();
            auto test = [&](u32 i, u32 j, u32 k) {
                if (!jacobi_defect(L, i, j, k).is_zero()) {
                    ok = false;
                    witness = "triple (" + std::to_string(i) + "," + std::to_string(j) + "," +
                              std::to_string(k) + ")";
                }
            };
            if (dimn <= 130) {
                for (u32 i = 0; i < dimn && ok; ++i)
                    for (u32 j = i + 1; j < dimn && ok; ++j)
                        for (u32 k = j + 1; k < dimn && ok; ++k) test(i, j, k);
            } else {
                std::mt19937_64 rng(flags.seed);
                for (u64 t = 0; t < 100000 && ok; ++t) {
                    u32 i = static_cast<u32>(rng() % dimn), j = static_cast<u32>(rng() % dimn),
                        k = static_cast<u32>(rng() % dimn);
                    if (i != j && j != k && i != k) test(i, j, k);
                }
            }
            emit("jacobi", ok ? "pass" : "fail", witness);
        } else if (check == "grading") {
            if (!L->has_grading()) emit("grading", "absent", "no grading present");
            else emit("grading", is_valid_grading(*L, L->grading()) ? "pass" : "fail", "");
        } else if (check == "pmap") {
            if (!L->has_p_map()) {
                emit("pmap", "absent", "no p-map present");
            } else {
                auto rep = verify_p_axioms(L, 100, flags.seed);
                emit("pmap", rep.all() ? "pass" : "fail", rep.witness);
            }
        } else if (check == "simple") {
            auto res = is_simple(L, flags.seed);
            if (res.verdict == SimplicityResult::Verdict::Simple) emit("simple", "pass", "simple");
            else if (res.verdict == SimplicityResult::Verdict::Undecided)
                emit("simple", "undecided", "budget exhausted");
            else
                emit("simple", "info",
                     "proper ideal of dimension " + std::to_string(res.ideal.dim()));
        } else {
            std::cerr << "verify: unknown check '" << check << "'\n";
            return EXIT_USAGE;
        }
    }
    out << "\n  ]\n}\n";
    std::cout << out.str();
    return any_fail ? EXIT_MISMATCH : EXIT_OK;
}

int cmd_cohomology(const std::string& in_path, u32 q, const std::string& mode, bool reps,
                   const CommonFlags& flags) {
    LoadedAlgebra loaded;
    try {
        loaded = parse_algebra(read_text_file(in_path));
    } catch (const std::exception& e) {
        std::cerr << "cohomology: " << e.what() << "\n";
        return EXIT_USAGE;
    }
    if (q != 2) {
        std::cerr << "cohomology: only q = 2 is supported\n";
        return EXIT_USAGE;
    }
    CohomOptions opts;
    opts.q = q;
    opts.mode = mode == "dense" ? CohomMode::Dense : CohomMode::Graded;
    opts.jobs = flags.jobs;
    opts.block_cap = flags.block_cap;
    opts.time_cap_seconds = flags.time_cap;
    opts.want_representatives = reps;
    if (opts.mode == CohomMode::Graded && !loaded.L->has_grading()) {
        std::cerr << "cohomology: file carries no grading; use --mode dense\n";
        return EXIT_USAGE;
    }
    auto rep = h_dim(loaded.L, opts);
    for (const auto& b : rep.blocks) {
        std::cout << "block w=" << b.weight << ": C1=" << b.dim_low << " C2=" << b.dim_mid
                  << " C3=" << b.dim_high;
        if (b.completed)
            std::cout << " rank_d1=" << b.rank_low << " rank_d2=" << b.rank_mid << " H2=" << b.h;
        else if (b.skipped_budget)
            std::cout << " skipped=budget";
        else
            std::cout << " skipped=time";
        std::cout << "\n";
        std::cerr << "# block w=" << b.weight << " wall_ms=" << static_cast<u64>(b.seconds * 1000) << "\n";
    }
    std::cout << "total H^" << q << " = " << rep.total_h << (rep.complete ? " (complete)" : " (partial)")
              << "\n";
    if (reps) {
        u32 idx = 0;
        for (const auto& r : rep.representatives) {
            std::cout << "representative " << idx++ << ":";
            for (auto [id, v] : r.entries()) {
                u32 target = static_cast<u32>(id % loaded.L->dim());
                u32 i, j;
                decode_pair_rank(id / loaded.L->dim(), i, j);
                std::cout << " (" << i << "," << j << "->" << target << ")*" << v;
            }
            std::cout << "\n";
        }
    }
    std::cerr << "# wall_ms=" << static_cast<u64>(rep.seconds * 1000) << "\n";
    return rep.complete ? EXIT_OK : EXIT_BUDGET;
}

int run_theorem_row(const FamilySpec& spec, const CommonFlags& flags, ResultRow& row) {
    double t0 = now_ms();
    try {
        VerifyOptions vo;
        vo.block_cap = flags.block_cap;
        vo.time_cap_seconds = flags.time_cap;
        vo.jobs = flags.jobs;
        TheoremReport rep = verify_theorem(spec, vo);
        row = row_from_report(rep, now_ms() - t0);
        if (rep.match) return EXIT_OK;
        return rep.h2_complete || rep.used_fallback ? EXIT_MISMATCH : EXIT_BUDGET;
    } catch (const std::exception& e) {
        row.family = family_name(spec.family);
        if (spec.family != Family::M) row.n = spec.n;
        row.p = spec.p;
        row.ok = false;
        row.error = e.what();
        row.wall_ms = now_ms() - t0;
        return EXIT_MISMATCH;
    }
}

int cmd_theorem(const std::string& family, u32 n, u32 p, const CommonFlags& flags, bool timing) {
    std::string err;
    auto spec = parse_family_spec(family, n, p, err);
    if (!spec) {
        std::cerr << "theorem: " << err << "\n";
        return EXIT_USAGE;
    }
    ResultRow row;
    int code = run_theorem_row(*spec, flags, row);
    std::cout << render_result_table({row}, timing);
    if (!row.error.empty()) std::cerr << "theorem: " << row.error << "\n";
    return code;
}

std::vector<FamilySpec> default_grid() {
    return {
        {Family::W, 1, 5}, {Family::W, 1, 7}, {Family::W, 2, 5},
        {Family::S, 3, 5}, {Family::H, 2, 5}, {Family::K, 3, 5},
        {Family::M, 2, 5}, {Family::sl, 2, 5}, {Family::sl, 2, 7},
    };
}

int cmd_sweep(const std::string& grid_path, const CommonFlags& flags, bool timing) {
    std::vector<FamilySpec> grid;
    std::vector<std::string> bad_rows;
    if (grid_path.empty()) {
        grid = default_grid();
    } else {
        std::istringstream in(read_text_file(grid_path));
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string fam, ns, ps;
            if (!(ls >> fam)) continue;
            if (fam[0] == '#') continue;
            if (!(ls >> ns >> ps)) {
                bad_rows.push_back(line);
                continue;
            }
            std::string err;
            u32 n = ns == "-" ? 2 : static_cast<u32>(std::stoul(ns));
            auto spec = parse_family_spec(fam, n, static_cast<u32>(std::stoul(ps)), err);
            if (!spec) bad_rows.push_back(line + "  # " + err);
            else grid.push_back(*spec);
        }
    }

    std::vector<ResultRow> rows;
    int worst = EXIT_OK;
    double total0 = now_ms();
    for (const auto& spec : grid) {
        ResultRow row;
        int code = run_theorem_row(spec, flags, row);
        rows.push_back(row);
        if (code == EXIT_MISMATCH) worst = EXIT_MISMATCH;
        else if (code == EXIT_BUDGET && worst == EXIT_OK) worst = EXIT_BUDGET;
    }
    for (const auto& b : bad_rows) {
        ResultRow row;
        row.family = b;
        row.ok = false;
        row.error = "unsupported grid row";
        row.match = "error";
        rows.push_back(row);
        worst = std::max(worst, EXIT_MISMATCH);
    }
    std::cout << render_result_table(rows, timing);
    std::cerr << "# total_wall_ms=" << static_cast<u64>(now_ms() - total0) << "\n";
    return worst;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact workbench for modular Lie algebras of Cartan type"};
    app.require_subcommand(1);

    CommonFlags flags;
    app.add_option("--seed", flags.seed, "seed for randomized checks");
    app.add_option("--jobs", flags.jobs, "parallel workers for block cohomology");
    app.add_option("--block-cap", flags.block_cap, "per-weight-block coordinate cap");
    app.add_option("--time-cap", flags.time_cap, "global time cap in seconds (0 = off)");
    bool timing = false;
    app.add_flag("--timing", timing, "print real wall times in tables (non-reproducible)");

    std::string family, out_path = "algebra.json", in_path, mode = "graded", grid_path;
    u32 n = 1, p = 5, q = 2;
    bool reps = false;
    std::vector<std::string> checks;

    auto* construct = app.add_subcommand("construct", "build a family member and write its file");
    construct->add_option("--family", family, "W | S | H | K | M | sl | psl")->required();
    construct->add_option("--n", n, "arity (ignored for M)");
    construct->add_option("--p", p, "field characteristic")->required();
    construct->add_option("--out", out_path, "output path");

    auto* verify = app.add_subcommand("verify", "run invariant suites on an algebra file");
    verify->add_option("--in", in_path, "algebra file")->required();
    verify->add_option("--checks", checks, "subset of jacobi,grading,pmap,simple")->delimiter(',');

    auto* cohom = app.add_subcommand("cohomology", "compute H^2 of an algebra file");
    cohom->add_option("--in", in_path, "algebra file")->required();
    cohom->add_option("--q", q, "cochain degree (2)");
    cohom->add_option("--mode", mode, "graded | dense");
    cohom->add_flag("--reps", reps, "print canonical representatives");

    auto* theorem = app.add_subcommand("theorem", "verify the H^2 description of one family");
    theorem->add_option("--family", family)->required();
    theorem->add_option("--n", n);
    theorem->add_option("--p", p)->required();

    auto* sweep = app.add_subcommand("sweep", "run the theorem table over a grid");
    sweep->add_option("--grid", grid_path, "grid file: 'family n p' per line ('-' n for M); default grid when omitted");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? EXIT_OK : EXIT_USAGE;
    }

    try {
        if (construct->parsed()) return cmd_construct(family, n, p, out_path);
        if (verify->parsed()) return cmd_verify(in_path, checks, flags);
        if (cohom->parsed()) return cmd_cohomology(in_path, q, mode, reps, flags);
        if (theorem->parsed()) return cmd_theorem(family, n, p, flags, timing);
        if (sweep->parsed()) return cmd_sweep(grid_path, flags, timing);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_MISMATCH;
    }
    return EXIT_USAGE;
}
