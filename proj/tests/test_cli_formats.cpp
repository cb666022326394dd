#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "modlie/serialize.hpp"

using namespace modlie;

namespace {

#ifndef MODLIE_CLI_PATH
#define MODLIE_CLI_PATH ""
#endif

int run_cli(const std::string& args) {
    std::string cmd = std::string(MODLIE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("algebra files round-trip bit-exactly") {
    for (auto built : {build_W(2, 5), build_melikian(5), build_classical(Family::sl, 2, 7)}) {
        std::optional<u32> n;
        if (built.spec.family != Family::M) n = built.spec.n;
        std::string text = render_algebra(*built.L, family_name(built.spec.family), n);
        LoadedAlgebra loaded = parse_algebra(text);
        CHECK(same_structure(*built.L, *loaded.L));
        CHECK(loaded.family == family_name(built.spec.family));
        std::string again = render_algebra(*loaded.L, loaded.family, loaded.n);
        CHECK(text == again);
    }
}

TEST_CASE("malformed files are rejected with context") {
    CHECK_THROWS_AS((void)parse_algebra("not json"), std::runtime_error);
    CHECK_THROWS_AS((void)parse_algebra("{}"), std::runtime_error);
    // coefficient out of range
    std::string bad = R"({"schema_version":1,"name":"x","family":null,"n":null,"p":5,"dim":2,
        "basis_labels":["a","b"],"grading":null,"brackets":[[0,1,[[0,7]]]],"p_map":null})";
    CHECK_THROWS_WITH_AS((void)parse_algebra(bad), doctest::Contains("coefficients"), std::runtime_error);
    // bad index order
    std::string bad2 = R"({"schema_version":1,"name":"x","family":null,"n":null,"p":5,"dim":2,
        "basis_labels":["a","b"],"grading":null,"brackets":[[1,0,[[0,1]]]],"p_map":null})";
    CHECK_THROWS_WITH_AS((void)parse_algebra(bad2), doctest::Contains("i < j"), std::runtime_error);
}

TEST_CASE("result table renders deterministically") {
    ResultRow a;
    a.family = "W";
    a.n = 1;
    a.p = 5;
    a.listed = 1;
    a.span = 1;
    a.h2 = "1";
    a.match = "yes";
    a.wall_ms = 123.4;
    ResultRow b;
    b.family = "M";
    b.p = 5;
    b.listed = 5;
    b.span = 5;
    b.h2 = "5";
    b.match = "yes";
    b.wall_ms = 9999.9;
    std::string t1 = render_result_table({a, b}, false);
    std::string t2 = render_result_table({a, b}, false);
    CHECK(t1 == t2);
    CHECK(t1.find("wall_ms") != std::string::npos);
    CHECK(t1.find("123") == std::string::npos); // timing suppressed by default
    CHECK(render_result_table({a}, true).find("123") != std::string::npos);
    // fixed header row
    CHECK(t1.rfind("family\tn\tp\tlisted\tspan\th2\tmatch\twall_ms\n", 0) == 0);
}

TEST_CASE("cli end to end") {
    if (std::string(MODLIE_CLI_PATH).empty()) return;
    std::string tmp = "/tmp/modlie_test_w1.json";

    // construct writes a loadable file and reports dimensions
    CHECK(run_cli("construct --family W --n 1 --p 5 --out " + tmp) == 0);
    LoadedAlgebra loaded = parse_algebra(read_text_file(tmp));
    CHECK(loaded.L->dim() == 5);

    // non-prime p is a usage error
    CHECK(run_cli("construct --family W --n 1 --p 4 --out /tmp/nope.json") == 2);
    // outside the supported grid
    CHECK(run_cli("construct --family W --n 9 --p 5 --out /tmp/nope.json") == 2);

    // verify passes on a freshly constructed file
    CHECK(run_cli("verify --in " + tmp) == 0);
    CHECK(run_cli("verify --in /tmp/does_not_exist.json") == 2);

    // a corrupted structure constant trips the jacobi suite
    {
        LieAlgebra::Builder bad("corrupt", loaded.L->p(), loaded.L->dim());
        bool bumped = false;
        for (u32 i = 0; i < loaded.L->dim(); ++i)
            for (u32 j = i + 1; j < loaded.L->dim(); ++j) {
                SparseRow r = loaded.L->bracket_basis(i, j);
                if (!bumped && !r.empty()) {
                    r[0].val = r[0].val % (loaded.L->p() - 1) + 1; // cyclic shift on [1, p)
                    bumped = true;
                }
                if (!r.empty()) bad.set_bracket(i, j, r);
            }
        REQUIRE(bumped);
        LieAlgebra::Builder::Options o;
        o.check_jacobi = false;
        write_algebra_file("/tmp/modlie_corrupt.json", render_algebra(*bad.build(o), "", std::nullopt));
        CHECK(run_cli("verify --in /tmp/modlie_corrupt.json --checks jacobi") == 1);
    }

    // cohomology on the file
    CHECK(run_cli("cohomology --in " + tmp + " --q 2 --mode graded") == 0);
    CHECK(run_cli("cohomology --in " + tmp + " --q 2 --mode dense") == 0);
    CHECK(run_cli("cohomology --in " + tmp + " --q 3") == 2);

    // theorem row
    CHECK(run_cli("theorem --family W --n 1 --p 5") == 0);
    CHECK(run_cli("theorem --family W --n 1 --p 11") == 2);

    // empty grid sweeps successfully
    write_algebra_file("/tmp/modlie_grid_empty.txt", "# nothing here\n");
    CHECK(run_cli("sweep --grid /tmp/modlie_grid_empty.txt") == 0);
    // a grid with one unsupported row records the error and continues
    write_algebra_file("/tmp/modlie_grid_bad.txt", "W 1 5\nW 9 5\n");
    CHECK(run_cli("sweep --grid /tmp/modlie_grid_bad.txt") == 1);
}
