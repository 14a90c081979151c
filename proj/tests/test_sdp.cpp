#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "flagcalc/ipm.hpp"
#include "flagcalc/sdp.hpp"
#include "flagcalc/sdpa.hpp"

using namespace flagcalc;

namespace {

Theory graph() { return Theory::make("Graph", {{"edges", 2, false}}); }

Theory tf_graph() {
    Theory g = graph();
    return g.exclude({make_flag(g, 3, {{"edges", {{0, 1}, {0, 2}, {1, 2}}}})});
}

AlgebraElement edge_density(const Theory& g) {
    return element_of(make_flag(g, 2, {{"edges", {{0, 1}}}}));
}

AlgebraElement k3_density(const Theory& g) {
    return element_of(make_flag(g, 3, {{"edges", {{0, 1}, {0, 2}, {1, 2}}}}));
}

std::vector<std::tuple<int, int, int, int, double>> all_entries(const SdpInstance& inst) {
    std::vector<std::tuple<int, int, int, int, double>> v;
    for (const auto& e : inst.C) v.emplace_back(-1, e.block, e.i, e.j, e.v);
    for (size_t h = 0; h < inst.A.size(); ++h)
        for (const auto& e : inst.A[h]) v.emplace_back(static_cast<int>(h), e.block, e.i, e.j, e.v);
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("admissible types") {
    Theory g = graph();
    // N=3: only the pointed type
    auto t3 = admissible_types(g, 3);
    REQUIRE(t3.size() == 1);
    CHECK(t3[0].size() == 1);
    // N=4: empty type plus one representative each of edge / nonedge
    auto t4 = admissible_types(g, 4);
    CHECK(t4.size() == 3);
    // N=5: point plus one type per 3-vertex graph
    auto t5 = admissible_types(g, 5);
    CHECK(t5.size() == 5);
}

TEST_CASE("Mantel bound at N=3") {
    Theory tf = tf_graph();
    SolveOptions opts;
    opts.verbosity = 0;
    SdpReport rep = solve_sdp(tf, edge_density(tf), 3, true, {}, opts);

    CHECK(rep.bound == doctest::Approx(0.5).epsilon(1e-7));
    // internal form is a minimization, so weak duality reads pobj >= dobj
    CHECK(rep.sol.primal_obj >= rep.sol.dual_obj - 1e-7);
    CHECK(rep.sol.primal_obj - rep.sol.dual_obj < 1e-6);

    // structure: one pointed type, no mu block, slack block, free bound
    REQUIRE(rep.form.types.size() == 1);
    CHECK(rep.form.mu_block == -1);
    REQUIRE(rep.form.instance.blocks.size() == 2);
    CHECK(rep.form.instance.blocks[0] == 2);
    CHECK(rep.form.instance.blocks[1] == -3);
    CHECK(rep.form.instance.fcoef == std::vector<double>(3, 1.0));
    CHECK(rep.sol.free_value == doctest::Approx(0.5).epsilon(1e-7));
    REQUIRE(rep.form.basis_N->size() == 3);
    CHECK(rep.form.target_N.coeffs[0] == 0);
    CHECK(rep.form.target_N.coeffs[1] == Rational(1, 3));
    CHECK(rep.form.target_N.coeffs[2] == Rational(2, 3));

    // the dual vector is the pseudo-moment vector of the extremal object;
    // for Mantel that is the balanced complete bipartite limit
    const auto& y = rep.sol.y;
    REQUIRE(y.size() == 3);
    double sum = 0;
    for (double v : y) {
        CHECK(v >= -1e-7);
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(y[0] == doctest::Approx(0.25).epsilon(1e-5));
    CHECK(y[2] == doctest::Approx(0.75).epsilon(1e-5));
}

TEST_CASE("trivial senses") {
    Theory g = graph();
    SolveOptions opts;
    opts.verbosity = 0;
    // max edge = 1, min edge = 0
    CHECK(solve_sdp(g, edge_density(g), 3, true, {}, opts).bound ==
          doctest::Approx(1.0).epsilon(1e-7));
    CHECK(solve_sdp(g, edge_density(g), 3, false, {}, opts).bound ==
          doctest::Approx(0.0).scale(1).epsilon(1e-7));
}

TEST_CASE("Kruskal-Katona step: max triangles under edge <= 1/2") {
    Theory g = graph();
    AlgebraElement half_minus_edge = add_constant(scale(edge_density(g), Rational(-1)), Rational(1, 2));
    SolveOptions opts;
    opts.verbosity = 0;
    SdpReport rep = solve_sdp(g, k3_density(g), 4, true, {half_minus_edge}, opts);
    CHECK(std::abs(rep.bound - 0.3535533923) < 1e-6);
    CHECK(rep.form.mu_block >= 0);
    CHECK(!rep.form.rows.empty());
    // multipliers complement the assumption size: products land exactly on N
    for (const auto& r : rep.form.rows) {
        CHECK(r.positive == 0);
        CHECK(r.multiplier.size() == 2);
        CHECK(r.multiplier.type_size() == 0);
    }
}

TEST_CASE("typed assumption: degree <= 1/2 forces edge <= 1/2") {
    Theory g = graph();
    Flag p1 = make_flag(g, 2, {{"edges", {{0, 1}}}}, {0});
    AlgebraElement half_minus_deg =
        add(constant_element(g, p1.ftype_flag(), 2, Rational(1, 2)), scale(element_of(p1), Rational(-1)));
    SolveOptions opts;
    opts.verbosity = 0;
    SdpReport rep = solve_sdp(g, edge_density(g), 4, true, {half_minus_deg}, opts);
    CHECK(rep.bound == doctest::Approx(0.5).epsilon(1e-6));
    for (const auto& r : rep.form.rows) {
        CHECK(r.multiplier.type_size() == 1);
        CHECK(r.multiplier.size() == 3);
    }
}

TEST_CASE("contradictory assumptions are reported") {
    Theory g = graph();
    AlgebraElement lo = add_constant(edge_density(g), Rational(-3, 4));   // edge >= 3/4
    AlgebraElement hi = add_constant(scale(edge_density(g), Rational(-1)), Rational(1, 4));  // edge <= 1/4
    SolveOptions opts;
    opts.verbosity = 0;
    CHECK_THROWS_AS(solve_sdp(g, edge_density(g), 4, true, {lo, hi}, opts), std::runtime_error);
}

TEST_CASE("SDPA export is deterministic and round-trips") {
    Theory tf = tf_graph();
    SdpFormulation f1 = assemble(tf, edge_density(tf), 4, true, {}, true);
    SdpFormulation f2 = assemble(tf, edge_density(tf), 4, true, {}, false);
    std::string s1 = sdpa_string(f1.instance);
    std::string s2 = sdpa_string(f2.instance);
    CHECK(s1 == s2);
    CHECK(!s1.empty());

    // reading back gives the split form of the exported instance
    SdpInstance pure = split_free(f1.instance);
    std::istringstream is(s1);
    SdpInstance back = read_sdpa(is);
    CHECK(back.blocks == pure.blocks);
    REQUIRE(back.b.size() == pure.b.size());
    for (size_t h = 0; h < back.b.size(); ++h) CHECK(back.b[h] == pure.b[h]);
    CHECK(all_entries(back) == all_entries(pure));
    // and the reread instance serializes to the same bytes
    CHECK(sdpa_string(back) == s1);
}

TEST_CASE("read_sdpa tolerates comments and separators") {
    std::istringstream is(
        "\"comment line\n"
        "* another comment\n"
        " 1 \n"
        "2\n"
        "{2, -1}\n"
        "(0.5)\n"
        "0 1 1 2 -1.0\n"
        "1 1 1 1 1.0\n"
        "1 2 1 1 2.0\n");
    SdpInstance inst = read_sdpa(is);
    CHECK(inst.blocks == std::vector<int>{2, -1});
    REQUIRE(inst.b.size() == 1);
    CHECK(inst.b[0] == 0.5);
    REQUIRE(inst.C.size() == 1);  // stored as -F_0
    CHECK(inst.C[0].v == 1.0);
    CHECK(inst.C[0].i == 0);
    CHECK(inst.C[0].j == 1);
    REQUIRE(inst.A.size() == 1);
    CHECK(inst.A[0].size() == 2);

    std::istringstream bad("1\n1\n{-2}\n1.0\n1 1 1 2 1.0\n");
    CHECK_THROWS_AS(read_sdpa(bad), std::runtime_error);
}

TEST_CASE("solution files round-trip") {
    Theory tf = tf_graph();
    SdpFormulation f = assemble(tf, edge_density(tf), 3, true);
    SdpInstance pure = split_free(f.instance);
    SdpSolution sol = ipm_solve(pure);
    std::ostringstream os;
    write_sol(os, pure, sol);
    std::istringstream is(os.str());
    SdpSolution back = read_sol(is, pure);
    REQUIRE(back.y.size() == sol.y.size());
    for (size_t h = 0; h < sol.y.size(); ++h) CHECK(back.y[h] == sol.y[h]);
    REQUIRE(back.X.size() == sol.X.size());
    for (size_t b = 0; b < sol.X.size(); ++b) {
        REQUIRE(back.X[b].size() == sol.X[b].size());
        for (size_t k = 0; k < sol.X[b].size(); ++k) {
            CHECK(back.X[b][k] == sol.X[b][k]);
            CHECK(back.Z[b][k] == sol.Z[b][k]);
        }
    }
    CHECK(back.primal_obj == doctest::Approx(sol.primal_obj).epsilon(1e-9));
    CHECK(back.dual_obj == doctest::Approx(sol.dual_obj).epsilon(1e-9));
}

TEST_CASE("external solver path matches the embedded solver") {
    const char* bin = std::getenv("SDPA_SOLVE_BIN");
    REQUIRE(bin != nullptr);
    Theory tf = tf_graph();
    SolveOptions embedded;
    embedded.verbosity = 0;
    SolveOptions external;
    external.solver_command = bin;
    external.verbosity = 0;
    SdpReport a = solve_sdp(tf, edge_density(tf), 4, true, {}, embedded);
    SdpReport b = solve_sdp(tf, edge_density(tf), 4, true, {}, external);
    CHECK(a.bound == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(b.bound == doctest::Approx(a.bound).epsilon(1e-9));
    REQUIRE(b.sol.y.size() == a.sol.y.size());
    for (size_t h = 0; h < a.sol.y.size(); ++h)
        CHECK(b.sol.y[h] == doctest::Approx(a.sol.y[h]).scale(1).epsilon(1e-9));
}

TEST_CASE("solver input validation") {
    Theory g = graph();
    Theory tf = tf_graph();
    CHECK_THROWS_AS(assemble(tf, edge_density(g), 3, true), std::invalid_argument);
    CHECK_THROWS_AS(assemble(g, k3_density(g), 2, true), std::invalid_argument);
    SdpInstance empty;
    CHECK_THROWS_AS(ipm_solve(empty), std::invalid_argument);
}
