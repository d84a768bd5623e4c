#include <cmath>
#include <initializer_list>
#include <numbers>

#include "doctest.h"
#include "qae/toyproblem.hpp"

using namespace qae;
using doctest::Approx;

TEST_CASE("two-bin discretization") {
    const double b = std::numbers::pi / 5.0;
    const double c = std::cos(b / 2.0);
    CHECK(true_alpha({b, 1}) == Approx((1.0 + c * c) / 2.0).epsilon(1e-15));
    CHECK(true_alpha({b, 1}) == Approx(0.952254).epsilon(1e-6));
}

TEST_CASE("default problem") {
    ToyProblem p;
    double direct = 0.0;
    for (int x = 0; x < 8; ++x) {
        const double c = std::cos(p.b_max * x / 8.0);
        direct += c * c;
    }
    CHECK(true_alpha(p) == Approx(direct / 8.0).epsilon(1e-15));
    CHECK(theta_from_alpha(true_alpha(p)) == Approx(std::acos(std::sqrt(direct / 8.0))).epsilon(1e-15));
}

TEST_CASE("fine discretization approaches the integral") {
    const double b = std::numbers::pi / 5.0;
    // Integral of cos^2 over [0, b], divided by b, done by hand.
    const double integral = (b / 2.0 + std::sin(2.0 * b) / 4.0) / b;
    CHECK(continuum_alpha(b) == Approx(integral).epsilon(1e-15));
    CHECK(std::abs(true_alpha({b, 20}) - integral) < 1e-5);
    CHECK(integral == Approx(0.87841).epsilon(1e-5));

    double previous = INFINITY;
    for (unsigned m = 2; m <= 16; ++m) {
        const double err = std::abs(true_alpha({b, m}) - integral);
        CHECK(err < previous);
        CHECK(err * std::ldexp(1.0, static_cast<int>(m)) < 1.0);
        previous = err;
    }
}

TEST_CASE("alpha is non-increasing in b_max") {
    for (unsigned m : {1u, 3u, 8u}) {
        double last = 1.0;
        for (int i = 1; i <= 100; ++i) {
            const double a = true_alpha({i * (std::numbers::pi / 2.0) / 100.0, m});
            CHECK(a <= last);
            last = a;
        }
    }
    CHECK(true_alpha({1e-12, 5}) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("theta conversion") {
    CHECK(theta_from_alpha(1.0) == 0.0);
    CHECK(theta_from_alpha(0.5) == Approx(std::numbers::pi / 4.0).epsilon(1e-15));
    CHECK(theta_from_alpha(0.0) == Approx(std::numbers::pi / 2.0).epsilon(1e-15));
    CHECK_THROWS(theta_from_alpha(1.5));
    CHECK_THROWS(theta_from_alpha(-0.1));
}

TEST_CASE("hardware arithmetic") {
    CHECK(grover_cnot_count(1) == 10);
    CHECK(grover_cnot_count(3) == 22);
    CHECK(grover_cnot_count(10) == 64);
    CHECK_THROWS(grover_cnot_count(0));

    CHECK(gamma_effective(0.01, 3) == Approx(1.0 - std::pow(0.99, 22)).epsilon(1e-14));
    CHECK(gamma_effective(0.01, 3) == Approx(0.198).epsilon(0.01));
    CHECK(gamma_effective(0.0, 7) == 0.0);
    CHECK(gamma_effective(1e-5, 10) == Approx(6.4e-4).epsilon(0.01));
    CHECK(gamma_effective(1.0, 1) == 1.0);
    CHECK_THROWS(gamma_effective(1.2, 3));

    for (double g = 0.0; g < 0.2; g += 0.01) {
        CHECK(gamma_effective(g + 0.01, 4) >= gamma_effective(g, 4));
        CHECK(gamma_effective(g, 5) >= gamma_effective(g, 4));
    }
}

TEST_CASE("problem validation") {
    CHECK_THROWS(ToyProblem{0.0, 3}.validate());
    CHECK_THROWS(ToyProblem{0.5, 0}.validate());
    CHECK_THROWS(ToyProblem{0.5, 25}.validate());
    CHECK_NOTHROW(ToyProblem{0.5, 24}.validate());
}
