#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "flagcalc/blowup.hpp"

using namespace flagcalc;

namespace {

Theory graph() { return Theory::make("Graph", {{"edges", 2, false}}); }

// sum of the k-vertex flags with exactly l edges
AlgebraElement strs(const Theory& g, unsigned k, unsigned l) {
    AlgebraElement e = zero_element(g, empty_type(g), k);
    for (size_t i = 0; i < e.basis->size(); ++i)
        if (e.basis->flags[i].core().rels[0].size() == l) e.coeffs[i] = 1;
    return e;
}

}  // namespace

TEST_CASE("clique blow-up densities") {
    Theory g = graph();
    // lambda(3,1): two equal cliques
    BlowupTemplate two_cliques =
        BlowupTemplate::equal_parts(g, 2, {{"edges", {{0, 0}, {1, 1}}}});
    CHECK(two_cliques.value(strs(g, 3, 1)) == Rational(3, 4));
    // lambda(4,1): five equal cliques
    BlowupTemplate five_cliques = BlowupTemplate::equal_parts(
        g, 5, {{"edges", {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}}}});
    CHECK(five_cliques.value(strs(g, 4, 1)) == Rational(72, 125));
    // lambda(4,2): blow-up of two disjoint triangles
    BlowupTemplate two_triangles = BlowupTemplate::equal_parts(
        g, 6, {{"edges", {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}}}});
    CHECK(two_triangles.value(strs(g, 4, 2)) == Rational(1, 2));
    // lambda(4,3): complete bipartite
    BlowupTemplate bipartite = BlowupTemplate::equal_parts(g, 2, {{"edges", {{0, 1}}}});
    CHECK(bipartite.value(strs(g, 4, 3)) == Rational(1, 2));
}

TEST_CASE("quasi-random cherry density formula") {
    Theory g = graph();
    Flag cherry = make_flag(g, 3, {{"edges", {{0, 1}, {1, 2}}}});
    // clique of relative size x, edges to the rest with probability p:
    // induced cherry density is 3px(x-1)(3xp-2x-p)
    auto formula = [](const Rational& x, const Rational& p) -> Rational {
        return 3 * p * x * (x - 1) * (3 * x * p - 2 * x - p);
    };
    auto density_at = [&](const Rational& x, const Rational& p) {
        BlowupTemplate t(g, {x, 1 - x}, {{"edges", {{0, 0}}}}, {{"edges", {{{0, 1}, p}}}});
        return t.density(cherry);
    };
    CHECK(density_at(Rational(1, 2), 1) == Rational(3, 8));
    CHECK(density_at(Rational(1, 3), Rational(1, 4)) == Rational(1, 9));
    for (const auto& x : {Rational(1, 5), Rational(2, 3)})
        for (const auto& p : {Rational(1, 2), Rational(5, 7)})
            CHECK(density_at(x, p) == formula(x, p));
}

TEST_CASE("mass conservation and lift consistency") {
    Theory g = graph();
    BlowupTemplate t(g, {Rational(1, 2), Rational(1, 4), Rational(1, 4)},
                     {{"edges", {{0, 1}}}},
                     {{"edges", {{{0, 0}, Rational(1, 3)}, {{1, 2}, Rational(3, 4)}}}});
    for (unsigned n = 1; n <= 4; ++n) {
        AlgebraElement x = t.element(n);
        Rational total(0);
        for (const auto& c : x.coeffs) total += c;
        CHECK(total == 1);
    }
    // the moment vector is consistent across sizes
    Flag cherry = make_flag(g, 3, {{"edges", {{0, 1}, {1, 2}}}});
    AlgebraElement x4 = t.element(4);
    CHECK(evaluate(lift(element_of(cherry), 4), x4.coeffs) == t.density(cherry));
    CHECK(t.value(lift(element_of(cherry), 4)) == t.density(cherry));
}

TEST_CASE("excluded structures reject the blow-up") {
    Theory g = graph();
    Flag k3 = make_flag(g, 3, {{"edges", {{0, 1}, {0, 2}, {1, 2}}}});
    Theory tf = g.exclude({k3});
    BlowupTemplate bip = BlowupTemplate::equal_parts(tf, 2, {{"edges", {{0, 1}}}});
    AlgebraElement x = bip.element(3);
    Rational total(0);
    for (const auto& c : x.coeffs) total += c;
    CHECK(total == 1);
    BlowupTemplate clique = BlowupTemplate::equal_parts(tf, 2, {{"edges", {{0, 0}, {1, 1}}}});
    CHECK_THROWS_WITH_AS(clique.element(3),
                         doctest::Contains("positive mass on excluded structure"),
                         std::runtime_error);
}

TEST_CASE("ordered relations blow up directionally") {
    Theory d = Theory::make("DiGraph", {{"arcs", 2, true}});
    BlowupTemplate t = BlowupTemplate::equal_parts(d, 2, {{"arcs", {{0, 1}, {0, 0}}}});
    AlgebraElement x = t.element(2);
    const auto& b = x.basis;
    Flag digon = make_flag(d, 2, {{"arcs", {{0, 1}, {1, 0}}}});
    Flag single = make_flag(d, 2, {{"arcs", {{0, 1}}}});
    Flag none = make_flag(d, 2, {});
    CHECK(x.coeffs[b->index_of(digon)] == Rational(1, 4));
    CHECK(x.coeffs[b->index_of(single)] == Rational(1, 2));
    CHECK(x.coeffs[b->index_of(none)] == Rational(1, 4));
}

TEST_CASE("projected squares are nonnegative in the limit") {
    Theory g = graph();
    BlowupTemplate t(g, {Rational(2, 5), Rational(3, 5)}, {{"edges", {{0, 0}}}},
                     {{"edges", {{{0, 1}, Rational(2, 7)}}}});
    Flag point = make_flag(g, 1, {}, {0});
    auto b2 = generate(g, 2, point);
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> num(-5, 5);
    for (int trial = 0; trial < 10; ++trial) {
        AlgebraElement f = zero_element(g, point, 2);
        for (auto& c : f.coeffs) c = Rational(num(rng)) / 3;
        CHECK(t.value(multiply(f, f)) >= 0);
    }
    (void)b2;
}

TEST_CASE("Monte Carlo agreement") {
    Theory g = graph();
    std::vector<double> w = {0.5, 0.25, 0.25};
    BlowupTemplate t(g, {Rational(1, 2), Rational(1, 4), Rational(1, 4)},
                     {{"edges", {{0, 1}}}},
                     {{"edges", {{{0, 0}, Rational(1, 3)}, {{1, 2}, Rational(3, 4)}}}});
    AlgebraElement exact = t.element(3);
    const unsigned n = 3;
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::map<std::string, long> tally;
    const long samples = 100000;
    for (long it = 0; it < samples; ++it) {
        std::vector<int> part(n);
        for (auto& p : part) {
            double u = unif(rng);
            p = u < w[0] ? 0 : (u < w[0] + w[1] ? 1 : 2);
        }
        FlagCore core;
        core.n = n;
        core.rels.resize(1);
        for (unsigned i = 0; i < n; ++i)
            for (unsigned j = i + 1; j < n; ++j) {
                int a = std::min(part[i], part[j]), b = std::max(part[i], part[j]);
                bool present = false;
                if (a == 0 && b == 1) present = true;
                else if (a == 0 && b == 0) present = unif(rng) < 1.0 / 3;
                else if (a == 1 && b == 2) present = unif(rng) < 3.0 / 4;
                if (present) {
                    Tuple t2{};
                    t2.len = 2;
                    t2.v[0] = static_cast<uint8_t>(i);
                    t2.v[1] = static_cast<uint8_t>(j);
                    core.rels[0].push_back(t2);
                }
            }
        ++tally[canonicalize_core(*g.data(), core, 0).key];
    }
    for (size_t i = 0; i < exact.basis->size(); ++i) {
        double est = static_cast<double>(tally[exact.basis->flags[i].key()]) / samples;
        CHECK(std::abs(est - to_double(exact.coeffs[i])) < 0.01);
    }
}

TEST_CASE("template validation") {
    Theory g = graph();
    CHECK_THROWS_WITH_AS(BlowupTemplate(g, {Rational(1, 2)}, {}), "part weights must sum to 1",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(BlowupTemplate(g, {Rational(3, 2), Rational(-1, 2)}, {}),
                         "part weights must be positive", std::invalid_argument);
    CHECK_THROWS_WITH_AS(BlowupTemplate::equal_parts(g, 2, {{"arcs", {{0, 1}}}}),
                         "unknown relation 'arcs' in blow-up", std::invalid_argument);
    CHECK_THROWS_WITH_AS(BlowupTemplate::equal_parts(g, 2, {{"edges", {{0, 1, 0}}}}),
                         "pattern arity mismatch for relation 'edges'", std::invalid_argument);
    CHECK_THROWS_WITH_AS(BlowupTemplate::equal_parts(g, 2, {{"edges", {{0, 2}}}}),
                         "part index out of range in relation 'edges'", std::invalid_argument);
    // unordered patterns are multisets: [1,0] duplicates [0,1]
    CHECK_THROWS_WITH_AS(BlowupTemplate::equal_parts(g, 2, {{"edges", {{0, 1}, {1, 0}}}}),
                         "pattern [0 1] listed twice", std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        BlowupTemplate::equal_parts(g, 2, {{"edges", {{0, 1}}}}, {{"edges", {{{1, 0}, Rational(1, 2)}}}}),
        "pattern [0 1] listed twice", std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        BlowupTemplate::equal_parts(g, 2, {}, {{"edges", {{{0, 1}, Rational(3, 2)}}}}),
        "random pattern probability must be in [0, 1]", std::invalid_argument);
}
