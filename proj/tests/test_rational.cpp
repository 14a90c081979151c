#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flagcalc/rational.hpp"

using namespace flagcalc;

TEST_CASE("parse and print") {
    CHECK(rational_to_string(parse_rational("3/4")) == "3/4");
    CHECK(rational_to_string(parse_rational("-6/8")) == "-3/4");
    CHECK(rational_to_string(parse_rational("7")) == "7");
    CHECK(rational_to_string(parse_rational("0/5")) == "0");
    CHECK_THROWS(parse_rational("0.5"));
    CHECK_THROWS(parse_rational("1e-3"));
    CHECK_THROWS(parse_rational(""));
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("abc"));
}

TEST_CASE("double round trips") {
    Rational half = rational_from_double(0.5);
    CHECK(half == Rational(1, 2));
    Rational tiny = rational_from_double(0.1);
    CHECK(tiny != Rational(1, 10));  // 0.1 is not dyadic
    CHECK(to_double(Rational(1, 3)) == doctest::Approx(1.0 / 3));
    CHECK(shortest_double_string(0.5) == "0.5");
    double x = 0.1 + 0.2;
    CHECK(std::stod(shortest_double_string(x)) == x);
}

TEST_CASE("best rational approximation") {
    // pi convergents
    Rational pi = rational_from_double(3.14159265358979);
    CHECK(best_rational_approx(pi, 10) == Rational(22, 7));
    CHECK(best_rational_approx(pi, 150) == Rational(355, 113));
    CHECK(best_rational_approx(Rational(1, 3), 100) == Rational(1, 3));
    CHECK(best_rational_approx(Rational(-22, 7), 6) == Rational(-19, 6));
    CHECK(best_rational_approx(Rational(-22, 7), 3) == -3);
    // golden ratio-ish: semiconvergent choice
    Rational x(103, 64);
    CHECK(best_rational_approx(x, 64) == x);
    Rational near_half(511, 1024);
    CHECK(best_rational_approx(near_half, 16) == Rational(1, 2));
    // exhaustive correctness at small denominators
    for (int num = -7; num <= 7; ++num) {
        Rational target = Rational(num) / 5;
        for (int d = 1; d <= 12; ++d) {
            Rational best = best_rational_approx(target, d);
            CHECK(best.get_den() <= d);
            for (int q = 1; q <= d; ++q)
                for (int p = -3 * q - 2; p <= 3 * q + 2; ++p)
                    CHECK(abs(target - best) <= abs(target - Rational(p) / q));
        }
    }
}

TEST_CASE("floor rounding") {
    CHECK(floor_to_denom(Rational(5, 7), 8) == Rational(5, 8));
    CHECK(floor_to_denom(Rational(-5, 7), 8) == Rational(-3, 4));
    CHECK(floor_to_denom(Rational(3, 4), 8) == Rational(3, 4));
    CHECK(floor_to_denom(Rational(0), 16) == 0);
}

TEST_CASE("combinatorial helpers") {
    CHECK(binomial(6, 3) == 20);
    CHECK(binomial(4, 0) == 1);
    CHECK(binomial(3, 5) == 0);
    CHECK(falling_factorial(5, 2) == 20);
    CHECK(falling_factorial(5, 0) == 1);
    CHECK(falling_factorial(3, 4) == 0);
}
