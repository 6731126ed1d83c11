#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "cflab/errors.hpp"
#include "cflab/pressure.hpp"

using namespace cflab;

namespace {

// Independent brute-force re-enumeration of the cylinder sum in plain
// doubles: nested digit loops, continuants in uint64.
double brute_cylinder_sum(unsigned n, uint64_t M, double B, double s) {
    double total = 0;
    std::vector<uint64_t> digits(n, 1);
    const double pref = std::pow(B, -(3.0 * s - 1.0) * n);
    while (true) {
        uint64_t q_prev = 0, q = 1;
        for (unsigned i = 0; i < n; ++i) {
            uint64_t nx = digits[i] * q + q_prev;
            q_prev = q;
            q = nx;
        }
        total += pref * std::pow(static_cast<double>(q), -2.0 * s);
        unsigned i = 0;
        for (; i < n; ++i) {
            if (digits[i] < M) {
                ++digits[i];
                break;
            }
            digits[i] = 1;
        }
        if (i == n) break;
    }
    return total;
}

}  // namespace

TEST_CASE("phi: form factories validate their parameters") {
    CHECK_THROWS_AS(PhiSpec::power(0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(PhiSpec::power(1.0, -0.5), ValidationError);
    CHECK_THROWS_AS(PhiSpec::geometric(0.0, 2.0), ValidationError);
    CHECK_THROWS_AS(PhiSpec::geometric(1.0, 0.5), ValidationError);
    CHECK_THROWS_AS(PhiSpec::doubly(0.5, 2.0), ValidationError);
    CHECK_THROWS_AS(PhiSpec::doubly(2.0, 0.5), ValidationError);
    CHECK_THROWS_AS(PhiSpec::table({}), ValidationError);
    CHECK_THROWS_AS(PhiSpec::table({1.0, -2.0}), ValidationError);
    CHECK_THROWS_AS(PhiSpec::table({3.0, 2.0}), ValidationError);  // must be non-decreasing
}

TEST_CASE("phi: values and thresholds") {
    PhiSpec p = PhiSpec::power(1.0, 2.0);
    CHECK(p.value(3) == doctest::Approx(9.0));
    CHECK(p.threshold(3) == Integer(9));
    PhiSpec frac = PhiSpec::power(0.5, 1.0);
    CHECK(frac.threshold(5) == Integer(3));  // ceil(2.5)
    CHECK(frac.threshold(1) == Integer(1));  // phi <= 1 clamps to 1

    PhiSpec g = PhiSpec::geometric(1.0, 2.0);
    CHECK(g.value(10) == doctest::Approx(1024.0));
    CHECK(g.threshold(10) == Integer(1024));

    PhiSpec d = PhiSpec::doubly(2.0, 2.0);
    CHECK(d.value(3) == doctest::Approx(256.0));
    CHECK(d.threshold(3) == Integer(256));
    // 2^(2^20) has ~315653 digits: representable intent, but beyond the
    // documented 2^4096 threshold cap.
    CHECK_THROWS_AS(d.threshold(20), ValidationError);

    PhiSpec t = PhiSpec::table({2.0, 4.5, 8.0});
    CHECK(t.value(2) == doctest::Approx(4.5));
    CHECK(t.threshold(2) == Integer(5));
    CHECK(t.horizon() == 3);
    CHECK_THROWS_AS(t.value(4), ValidationError);
}

TEST_CASE("phi: liminf exponents per form") {
    LiminfExponents a = liminf_exponents(PhiSpec::power(3.0, 2.0));
    CHECK(a.logB == 0.0);
    CHECK(a.logb == 0.0);
    CHECK(a.exact);

    LiminfExponents b = liminf_exponents(PhiSpec::geometric(5.0, 4.0));
    CHECK(b.logB == doctest::Approx(std::log(4.0)));
    CHECK(b.logb == 0.0);

    LiminfExponents c = liminf_exponents(PhiSpec::doubly(2.0, 3.0));
    CHECK(std::isinf(c.logB));
    CHECK(c.logb == doctest::Approx(std::log(3.0)));

    // Degenerate doubly forms collapse to constants.
    LiminfExponents d = liminf_exponents(PhiSpec::doubly(1.0, 5.0));
    CHECK(d.logB == 0.0);
    CHECK(d.logb == 0.0);

    LiminfExponents e = liminf_exponents(PhiSpec::table({2.0, 4.0, 16.0}), 3);
    CHECK_FALSE(e.exact);
}

TEST_CASE("cylinder_sum: matches a brute-force re-enumeration") {
    for (unsigned n : {1u, 2u, 3u}) {
        for (uint64_t M : {1ull, 2ull, 3ull, 4ull}) {
            for (double B : {1.5, 2.0}) {
                for (double s : {0.4, 0.7}) {
                    const double mine = cylinder_sum(n, M, B, s).to_double();
                    const double brute = brute_cylinder_sum(n, M, B, s);
                    CHECK(mine == doctest::Approx(brute).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("cylinder_sum: budget cap") {
    CHECK_THROWS_AS(cylinder_sum(10, 10, 2.0, 0.6), BudgetError);
    CHECK_THROWS_AS(solve_sn(12, 8, 2.0), BudgetError);
}

TEST_CASE("solve_sn: M = 1 degenerates to exactly 1/3") {
    for (double B : {1.1, 2.0, 10.0})
        for (unsigned n : {1u, 2u, 3u}) CHECK(solve_sn(n, 1, B) == 1.0 / 3.0);
}

TEST_CASE("solve_sn: frozen bisection oracles") {
    CHECK(solve_sn(1, 2, 2.0) == doctest::Approx(0.5232167148117011).epsilon(1e-9));
    CHECK(solve_sn(2, 2, 2.0) == doctest::Approx(0.43878640509419553).epsilon(1e-9));
    CHECK(solve_sn(3, 8, 1.05) == doctest::Approx(0.9289014518816234).epsilon(1e-9));
    CHECK(solve_sn(3, 64, 2.0) == doctest::Approx(0.7115818657424022).epsilon(1e-9));
    // The root really is a root.
    const double s = solve_sn(2, 3, 1.7);
    CHECK(cylinder_sum(2, 3, 1.7, s).to_double() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("solve_sn: monotone in B (antitone) and in M (isotone)") {
    const std::vector<double> Bs{1.1, 2.0, 4.0, 16.0, 256.0};
    for (unsigned n : {1u, 2u}) {
        for (uint64_t M : {2ull, 4ull, 8ull}) {
            double prev = std::numeric_limits<double>::infinity();
            for (double B : Bs) {
                double s = solve_sn(n, M, B);
                CHECK(s < prev);
                prev = s;
            }
        }
        for (double B : {2.0, 16.0}) {
            double prev = 0.0;
            for (uint64_t M : {1ull, 2ull, 4ull, 8ull}) {
                double s = solve_sn(n, M, B);
                CHECK(s > prev);
                prev = s;
            }
        }
    }
}

TEST_CASE("solve_sn: validation and bracket failure") {
    CHECK_THROWS_AS(solve_sn(0, 2, 2.0), ValidationError);
    CHECK_THROWS_AS(solve_sn(1, 0, 2.0), ValidationError);
    CHECK_THROWS_AS(solve_sn(1, 2, 1.0), ValidationError);  // needs B > 1
    // Near B = 1 with a rich alphabet the root escapes the [1/3, 2] bracket.
    CHECK_THROWS_AS(solve_sn(1, 8, 1.001), NumericalError);
}

TEST_CASE("pressure_approx: band brackets the approximant") {
    PressureApprox pa = pressure_approx(2, 3, 0.6, 2.0);
    CHECK(pa.lo <= pa.value);
    CHECK(pa.value <= pa.hi + 1e-15);
    CHECK(pa.hi == doctest::Approx(pa.value));
    // At the root s_n, the approximant is log(1)/n = 0.
    const double s = solve_sn(2, 3, 2.0);
    PressureApprox root = pressure_approx(2, 3, s, 2.0);
    CHECK(root.value == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("dimension: closed-form regimes") {
    DimensionResult a = dimension(PhiSpec::power(1.0, 2.0));
    CHECK(a.regime == DimRegime::B_eq_1);
    CHECK(a.dim == 1.0);
    CHECK(a.method == "closed_form");

    DimensionResult b = dimension(PhiSpec::doubly(2.718281828459045, 2.0));
    CHECK(b.regime == DimRegime::B_inf_b_finite);
    CHECK(b.dim == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    DimensionResult c = dimension(PhiSpec::doubly(10.0, 3.0));
    CHECK(c.dim == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("dimension: finite-B regime attaches the s_n diagnostics") {
    DimensionResult r = dimension(PhiSpec::geometric(1.0, 2.0), 3, 2);
    CHECK(r.regime == DimRegime::B_finite);
    CHECK(r.method == "sn_extrapolation");
    REQUIRE(r.s_seq.size() == 3);
    CHECK(r.s_seq[0] == doctest::Approx(0.5232167148117011).epsilon(1e-9));
    CHECK(r.s_seq[1] == doctest::Approx(0.43878640509419553).epsilon(1e-9));
    CHECK(r.dim == r.s_seq.back());
    CHECK(r.dim > 1.0 / 3.0);
    CHECK(r.dim < 1.0);
}
