#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flagcalc/flag.hpp"
#include "flagcalc/theory.hpp"

using namespace flagcalc;

namespace {

Theory graph() { return Theory::make("Graph", {{"edges", 2, false}}); }

}  // namespace

TEST_CASE("theory validation") {
    CHECK_THROWS(Theory::make("T", {}));
    CHECK_THROWS(Theory::make("T", {{"a b", 2, false}}));
    CHECK_THROWS(Theory::make("T", {{"", 2, false}}));
    CHECK_THROWS(Theory::make("T", {{"e", 0, false}}));
    CHECK_THROWS(Theory::make("T", {{"e", 9, false}}));
    CHECK_THROWS(Theory::make("T", {{"e", 2, false}, {"e", 2, false}}));
    // full symmetry wants >= 2 relations of one arity and orderedness
    CHECK_THROWS(Theory::make("T", {{"e", 2, false}}, Symmetry::Full));
    CHECK_THROWS(Theory::make("T", {{"e", 2, false}, {"f", 3, false}}, Symmetry::Full));
    CHECK_THROWS(Theory::make("T", {{"e", 2, false}, {"f", 2, true}}, Symmetry::Full));
    CHECK_NOTHROW(Theory::make("T", {{"e", 2, false}, {"f", 2, false}}, Symmetry::Full));
}

TEST_CASE("combine concatenates and checks names") {
    Theory g = graph();
    Theory t3 = Theory::make("ThreeGraph", {{"edges3", 3, false}});
    Theory c = Theory::combine("TwoThreeGraph", {g, t3});
    CHECK(c.relations().size() == 2);
    CHECK(c.relations()[0].name == "edges");
    CHECK(c.relations()[1].arity == 3);
    CHECK_THROWS(Theory::combine("X", {g, g}));  // duplicate relation names
    Flag f = make_flag(c, 3, {{"edges", {{0, 1}, {0, 2}}}, {"edges3", {{0, 1, 2}}}});
    CHECK(f.size() == 3);
}

TEST_CASE("full symmetry identifies relation swaps") {
    Theory g = graph();
    Theory gp = Theory::make("OtherGraph", {{"oedges", 2, false}});
    Theory c0 = Theory::combine("DoubleEdgeGraph", {g, gp}, Symmetry::None);
    Theory c1 = Theory::combine("SymmetricDoubleEdgeGraph", {g, gp}, Symmetry::Full);
    Flag a0 = make_flag(c0, 2, {{"edges", {{0, 1}}}});
    Flag b0 = make_flag(c0, 2, {{"oedges", {{0, 1}}}});
    CHECK(!(a0 == b0));
    Flag a1 = make_flag(c1, 2, {{"edges", {{0, 1}}}});
    Flag b1 = make_flag(c1, 2, {{"oedges", {{0, 1}}}});
    CHECK(a1 == b1);
}

TEST_CASE("exclusion reduces and hashes deterministically") {
    Theory g = graph();
    Flag k3 = make_flag(g, 3, {{"edges", {{0, 1}, {0, 2}, {1, 2}}}});
    Flag k4 = make_flag(g, 4, {{"edges", {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}}});
    Theory no_k3 = g.exclude({k3});
    Theory no_k3_then_k4 = no_k3.exclude({k4});
    Theory no_k4_then_k3 = g.exclude({k4}).exclude({k3});
    CHECK(no_k3.state_hash() == no_k3_then_k4.state_hash());
    CHECK(no_k3.state_hash() == no_k4_then_k3.state_hash());
    CHECK(no_k3.excluded().size() == 1);
    CHECK(g.state_hash() != no_k3.state_hash());
    CHECK(no_k3 == no_k3_then_k4);

    // excluded structure construction is rejected afterwards
    CHECK_THROWS_WITH(make_flag(no_k3, 3, {{"edges", {{0, 1}, {0, 2}, {1, 2}}}}),
                      "flag contains an excluded configuration");
    CHECK_THROWS(make_flag(no_k3, 4, {{"edges", {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}}}));
    // untyped requirement
    Flag edge_typed = make_flag(g, 2, {{"edges", {{0, 1}}}}, {0});
    CHECK_THROWS(g.exclude({edge_typed}));
}

TEST_CASE("pattern exclusion expands before reduction") {
    Theory g = graph();
    // required edge 01, forbidden edge 02, free 12: expands to two graphs
    Pattern p(g, 3, {{"edges", {{0, 1}}}}, {{"edges", {{0, 2}}}});
    auto flags = p.compatible_flags();
    CHECK(flags.size() == 2);  // path and single edge
    Theory t = g.exclude({}, {p});
    CHECK(t.excluded().size() == 2);
    // same state as excluding the two expansions directly
    Flag e1 = make_flag(g, 3, {{"edges", {{0, 1}}}});
    Flag path = make_flag(g, 3, {{"edges", {{0, 1}, {1, 2}}}});
    CHECK(t.state_hash() == g.exclude({e1, path}).state_hash());
}

TEST_CASE("combined theories inherit exclusions freely") {
    Theory g = graph();
    Flag k3 = make_flag(g, 3, {{"edges", {{0, 1}, {0, 2}, {1, 2}}}});
    Theory tri_free = g.exclude({k3});
    Theory colors = Theory::make("Color", {{"c0", 1, false}});
    Theory c = Theory::combine("ColoredTriangleFree", {tri_free, colors});
    // K3 is excluded regardless of coloring
    CHECK_THROWS(make_flag(c, 3, {{"edges", {{0, 1}, {0, 2}, {1, 2}}}, {"c0", {{0}}}}));
    CHECK_NOTHROW(make_flag(c, 3, {{"edges", {{0, 1}, {0, 2}}}, {"c0", {{0}, {1}, {2}}}}));
    // expansion covers every coloring of K3: 4 structures up to iso, reduced
    CHECK(c.excluded().size() == 4);
}

TEST_CASE("serialization is name independent") {
    Theory a = Theory::make("A", {{"edges", 2, false}});
    Theory b = Theory::make("B", {{"edges", 2, false}});
    CHECK(a.state_hash() == b.state_hash());
    CHECK(a == b);
    Theory c = Theory::make("C", {{"edges", 2, true}});
    CHECK(a.state_hash() != c.state_hash());
}
