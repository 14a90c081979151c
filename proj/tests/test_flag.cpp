#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "flagcalc/flag.hpp"
#include "oracles.hpp"

using namespace flagcalc;

namespace {

Theory graph() { return Theory::make("Graph", {{"edges", 2, false}}); }
Theory digraph() { return Theory::make("DiGraph", {{"arcs", 2, true}}); }
Theory threegraph() { return Theory::make("ThreeGraph", {{"edges3", 3, false}}); }

}  // namespace

TEST_CASE("construction validation") {
    Theory g = graph();
    CHECK_THROWS(make_flag(g, 3, {{"edges", {{0, 3}}}}));      // out of range
    CHECK_THROWS(make_flag(g, 3, {{"edges", {{1, 1}}}}));      // repeated vertex
    CHECK_THROWS(make_flag(g, 3, {{"edges", {{0, 1, 2}}}}));   // arity mismatch
    CHECK_THROWS(make_flag(g, 3, {{"nope", {{0, 1}}}}));       // unknown relation
    CHECK_THROWS(make_flag(g, 3, {}, {0, 0}));                 // repeated mark
    CHECK_THROWS(make_flag(g, 3, {}, {5}));                    // mark out of range
    Theory d = digraph();
    CHECK_THROWS(make_flag(d, 2, {{"arcs", {{0, 0}}}}));       // no loops
    CHECK_NOTHROW(make_flag(d, 2, {{"arcs", {{0, 1}, {1, 0}}}}));
}

TEST_CASE("labels do not matter") {
    Theory g = graph();
    Flag t1 = make_flag(g, 3, {{"edges", {{0, 1}, {0, 2}, {1, 2}}}});
    Flag t2 = make_flag(g, 3, {{"edges", {{2, 1}, {2, 0}, {1, 0}}}});
    CHECK(t1 == t2);
    CHECK(t1.key() == t2.key());
    Flag cherry1 = make_flag(g, 3, {{"edges", {{0, 1}, {0, 2}}}});
    Flag cherry2 = make_flag(g, 3, {{"edges", {{1, 0}, {1, 2}}}});
    Flag path_edge = make_flag(g, 3, {{"edges", {{0, 1}}}});
    CHECK(cherry1 == cherry2);
    CHECK(!(cherry1 == path_edge));
    CHECK(!(cherry1 == t1));
}

TEST_CASE("typed equality respects marks") {
    Theory g = graph();
    Flag center = make_flag(g, 3, {{"edges", {{0, 1}, {0, 2}}}}, {0});
    Flag center2 = make_flag(g, 3, {{"edges", {{1, 0}, {1, 2}}}}, {1});
    Flag leaf = make_flag(g, 3, {{"edges", {{0, 1}, {0, 2}}}}, {1});
    Flag leaf2 = make_flag(g, 3, {{"edges", {{0, 1}, {0, 2}}}}, {2});
    CHECK(center == center2);
    CHECK(leaf == leaf2);
    CHECK(!(center == leaf));
    CHECK(center.unlabeled() == leaf.unlabeled());
    // mark order matters for larger types
    Flag e01 = make_flag(g, 3, {{"edges", {{0, 1}}}}, {0, 2});
    Flag e01b = make_flag(g, 3, {{"edges", {{0, 1}}}}, {1, 2});
    CHECK(e01 == e01b);  // 0 and 1 are swapped by an automorphism
    Flag e01c = make_flag(g, 3, {{"edges", {{0, 1}}}}, {2, 0});
    CHECK(!(e01 == e01c));  // reversing the mark order is a different type
    Flag mixed = make_flag(g, 3, {{"edges", {{0, 1}}}}, {0, 1});
    CHECK(!(e01 == mixed));
}

TEST_CASE("random relabeling invariance") {
    std::mt19937 rng(12345);
    for (const Theory& th : {graph(), digraph(), threegraph(),
                             Theory::make("C1", {{"e", 2, false}, {"f", 2, false}}, Symmetry::Full)}) {
        const auto& specs = th.relations();
        for (int trial = 0; trial < 120; ++trial) {
            unsigned n = 2 + rng() % 5;
            // random structure as tuple input
            RelationInput input;
            for (const auto& spec : specs) {
                TupleInput tl;
                for (const Tuple& t : all_tuples(n, spec.arity, spec.ordered))
                    if (rng() % 2) {
                        std::vector<int> vt;
                        for (unsigned i = 0; i < t.len; ++i) vt.push_back(t.v[i]);
                        tl.push_back(vt);
                    }
                input[spec.name] = tl;
            }
            unsigned s = rng() % (n + 1);
            std::vector<int> marks(n);
            std::iota(marks.begin(), marks.end(), 0);
            std::shuffle(marks.begin(), marks.end(), rng);
            marks.resize(s);
            Flag f1 = make_flag(th, n, input, marks);

            // relabel everything through a random permutation
            std::vector<int> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            RelationInput input2;
            for (const auto& [name, tuples] : input) {
                TupleInput tl;
                for (const auto& t : tuples) {
                    std::vector<int> vt;
                    for (int x : t) vt.push_back(perm[x]);
                    tl.push_back(vt);
                }
                input2[name] = tl;
            }
            std::vector<int> marks2;
            for (int m : marks) marks2.push_back(perm[m]);
            Flag f2 = make_flag(th, n, input2, marks2);
            REQUIRE(f1 == f2);
            REQUIRE(f1.key() == f2.key());
        }
    }
}

TEST_CASE("equality agrees with brute-force isomorphism") {
    std::mt19937 rng(777);
    for (const Theory& th : {graph(), digraph(),
                             Theory::make("C1", {{"e", 2, false}, {"f", 2, false}}, Symmetry::Full)}) {
        const auto& specs = th.relations();
        auto random_flag = [&](unsigned n, unsigned s) {
            RelationInput input;
            for (const auto& spec : specs) {
                TupleInput tl;
                for (const Tuple& t : all_tuples(n, spec.arity, spec.ordered))
                    if (rng() % 2) {
                        std::vector<int> vt(t.v.begin(), t.v.begin() + t.len);
                        tl.push_back(vt);
                    }
                input[spec.name] = tl;
            }
            std::vector<int> marks;
            for (unsigned i = 0; i < s; ++i) marks.push_back(static_cast<int>(i));
            return make_flag(th, n, input, marks);
        };
        for (int trial = 0; trial < 200; ++trial) {
            unsigned n = 2 + rng() % 4;
            unsigned s = rng() % (n + 1);
            Flag a = random_flag(n, s);
            Flag b = random_flag(n, s);
            bool lib = (a == b);
            bool brute = oracles::brute_isomorphic(*th.data(), a.core(), a.type_size(), b.core(),
                                                   b.type_size());
            REQUIRE(lib == brute);
        }
    }
}

TEST_CASE("type and subflag helpers") {
    Theory g = graph();
    Flag k4m = make_flag(g, 4, {{"edges", {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}}}});
    Flag triangle = make_flag(g, 3, {{"edges", {{0, 1}, {0, 2}, {1, 2}}}});
    Flag cherry = make_flag(g, 3, {{"edges", {{0, 1}, {0, 2}}}});
    Flag edge = make_flag(g, 2, {{"edges", {{0, 1}}}});
    CHECK(contains_induced(k4m, triangle));
    CHECK(contains_induced(k4m, cherry));
    CHECK(contains_induced(k4m, edge));
    CHECK(!contains_induced(k4m, make_flag(g, 3, {})));
    CHECK(!contains_induced(k4m, make_flag(g, 4, {{"edges", {{0, 1}, {2, 3}}}})));

    Flag pointed = make_flag(g, 3, {{"edges", {{0, 1}, {0, 2}}}}, {0});
    Flag tp = pointed.ftype_flag();
    CHECK(tp.size() == 1);
    CHECK(tp.type_size() == 1);
    Flag pe = make_flag(g, 2, {{"edges", {{0, 1}}}}, {0});
    CHECK(pointed.same_type(pe));

    // induced subflag keeps marks
    Flag sub = induced_subflag(pointed, {0, 1});
    CHECK(sub == pe);
    CHECK_THROWS(induced_subflag(pointed, {1, 2}));  // drops the mark
}

TEST_CASE("rendering") {
    Theory g = graph();
    Flag triangle = make_flag(g, 3, {{"edges", {{0, 1}, {0, 2}, {1, 2}}}});
    CHECK(triangle.render() == "Flag on 3 points, ftype from () with edges=(01 02 12)");
    CHECK(triangle.literal() == "flag(3; edges = 01 02 12)");
    Flag pe = make_flag(g, 2, {{"edges", {{0, 1}}}}, {0});
    CHECK(pe.render() == "Flag on 2 points, ftype from (0,) with edges=(01)");
    CHECK(pe.literal() == "flag(2; edges = 01; ftype = 0)");
    Flag empty5 = make_flag(g, 5, {});
    CHECK(empty5.render() == "Flag on 5 points, ftype from () with edges=()");
    Flag two_marks = make_flag(g, 3, {{"edges", {{0, 1}}}}, {0, 1});
    CHECK(two_marks.render() == "Flag on 3 points, ftype from (0, 1) with edges=(01)");
}

TEST_CASE("patterns") {
    Theory g = graph();
    Pattern p(g, 3, {{"edges", {{0, 1}}}}, {{"edges", {{0, 2}}}});
    auto flags = p.compatible_flags();
    REQUIRE(flags.size() == 2);
    CHECK(p.matches(make_flag(g, 3, {{"edges", {{0, 1}}}})));
    CHECK(p.matches(make_flag(g, 3, {{"edges", {{0, 1}, {1, 2}}}})));
    CHECK(!p.matches(make_flag(g, 3, {{"edges", {{0, 1}, {0, 2}, {1, 2}}}})));
    CHECK_THROWS(Pattern(g, 3, {{"edges", {{0, 1}}}}, {{"edges", {{1, 0}}}}));  // overlap
}
