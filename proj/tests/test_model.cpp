#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "decum/errors.hpp"
#include "decum/model.hpp"

using namespace decum;

namespace {

MomentSummary summary(double mean, double variance) {
    MomentSummary m;
    m.mean = mean;
    m.variance = variance;
    m.n = 2;
    return m;
}

MomentSummary summary(double mean, double variance, double skew, double kurt) {
    MomentSummary m = summary(mean, variance);
    m.skewness = skew;
    m.kurtosis = kurt;
    return m;
}

// Fourth-order rate written out in powers of V / (1+E) instead of the
// reduced-volatility grouping, used to cross-check the implementation.
double gamma4_expanded(double E, double V, double S, double K, double s) {
    const double g = 1.0 + E;
    return 1.0 - (1.0 + s) / g *
                     (1.0 + V / (g * g) - std::pow(V, 1.5) * S / (g * g * g) +
                      V * V * K / (g * g * g * g));
}

}  // namespace

TEST_CASE("second-order depletion rate matches hand-computed values") {
    CHECK(gamma2(summary(0.082, 0.0), 0.029).value ==
          doctest::Approx(0.048983364140480594).epsilon(1e-14));
    CHECK(gamma2(summary(0.082, 0.029), 0.029).value ==
          doctest::Approx(0.021403881700554527).epsilon(1e-14));
    CHECK(gamma2(summary(0.0, 0.0), 0.0).value == 0.0);
    // annual-scale values round to the published 0.049 and 0.021
    CHECK(std::abs(gamma2(summary(0.082, 0.0), 0.029).value - 0.049) < 5e-4);
    CHECK(std::abs(gamma2(summary(0.082, 0.029), 0.029).value - 0.021) < 5e-4);
    // monthly-scale spot value
    CHECK(gamma2(summary(0.00823, 0.00164), 0.003).value ==
          doctest::Approx(0.0035558).epsilon(2e-4));
}

TEST_CASE("second-order rate is symmetric in growth and variance") {
    const double pairs[][2] = {{0.003, 0.0006}, {0.029, 0.082}, {0.0, 0.01}};
    for (auto [a, b] : pairs) {
        // bitwise equality: the formula treats s and V through the same
        // symmetric product s + V + s*V
        CHECK(gamma2(summary(0.0065, a), b).value == gamma2(summary(0.0065, b), a).value);
    }
}

TEST_CASE("second-order rate input validation") {
    CHECK_THROWS_AS(gamma2(summary(-1.0, 0.01), 0.003), ValidationError);
    CHECK_THROWS_AS(gamma2(summary(0.005, -0.01), 0.003), ValidationError);
    CHECK_THROWS_AS(gamma2(summary(0.005, 0.01), -1.0), ValidationError);
}

TEST_CASE("fourth-order depletion rate matches hand-computed values") {
    CHECK(gamma4(summary(0.082, 0.029, 0.0, 3.0), 0.029).value ==
          doctest::Approx(0.023675096588627875).epsilon(1e-14));
    CHECK(gamma4(summary(0.082, 0.029, 0.0, 5.0), 0.029).value ==
          doctest::Approx(0.022508004668614134).epsilon(1e-14));
}

TEST_CASE("fourth-order rate agrees with its expanded form") {
    const double Es[] = {0.0, 0.003, 0.0065, 0.082};
    const double Vs[] = {1e-6, 1e-4, 0.0006, 0.029};
    const double Ss[] = {-0.5, 0.0, 1.1};
    const double Ks[] = {1.5, 3.0, 20.5};
    for (double E : Es)
        for (double V : Vs)
            for (double S : Ss)
                for (double K : Ks) {
                    const double got = gamma4(summary(E, V, S, K), 0.003).value;
                    const double want = gamma4_expanded(E, V, S, K, 0.003);
                    CHECK(std::abs(got - want) <= 1e-14);
                }
}

TEST_CASE("fourth-order rate collapses to second order when variance is negligible") {
    const double Es[] = {0.0, 0.005, 0.01};
    const double Vs[] = {1e-6, 1e-5, 1e-4};
    const double ss[] = {0.0, 0.003};
    for (double E : Es)
        for (double V : Vs)
            for (double s : ss) {
                const double g4 = gamma4(summary(E, V, 0.0, 3.0), s).value;
                const double g2 = gamma2(summary(E, V), s).value;
                CHECK(std::abs(g4 - g2) < 5e-6);
            }
}

TEST_CASE("fourth-order rate requires higher moments") {
    CHECK_THROWS_AS(gamma4(summary(0.005, 0.001), 0.003), ValidationError);
}

TEST_CASE("withdrawal rate reproduces hand-computed values") {
    CHECK(withdrawal_rate(0.049, PlanParams::finite(30)) ==
          doctest::Approx(0.06294327710786667).epsilon(1e-14));
    CHECK(withdrawal_rate(0.021, PlanParams::finite(30)) ==
          doctest::Approx(0.04458887962375817).epsilon(1e-14));
    // published annual-scale rates: 6.3% and about 4.5%
    CHECK(std::abs(withdrawal_rate(0.049, PlanParams::finite(30)) - 0.063) < 1e-3);
    CHECK(std::abs(withdrawal_rate(0.021, PlanParams::finite(30)) - 0.045) < 1e-3);
    // monthly-scale rates: a slightly negative rate still funds 360 months
    CHECK(withdrawal_rate(-0.000742, PlanParams::finite(360)) ==
          doctest::Approx(0.00242).epsilon(5e-3));
    CHECK(withdrawal_rate(0.00415, PlanParams::finite(360)) ==
          doctest::Approx(0.00534).epsilon(5e-3));
}

TEST_CASE("withdrawal rate at gamma zero is exactly 1/t") {
    CHECK(withdrawal_rate(0.0, PlanParams::finite(360)) == 1.0 / 360.0);
    CHECK(withdrawal_rate(0.0, PlanParams::finite(12)) == 1.0 / 12.0);
}

TEST_CASE("withdrawal rate is continuous across the small-gamma branch") {
    for (long t : {12L, 360L, 600L}) {
        const double at_zero = 1.0 / static_cast<double>(t);
        const double eps = 1e-9 / static_cast<double>(t);
        for (double g : {eps * 1.01, -eps * 1.01, eps * 0.99, -eps * 0.99}) {
            CHECK(std::abs(withdrawal_rate(g, PlanParams::finite(t)) - at_zero) < 1e-10);
        }
    }
}

TEST_CASE("withdrawal rate domain checks") {
    CHECK_THROWS_AS(withdrawal_rate(1.0, PlanParams::finite(360)), ValidationError);
    CHECK_THROWS_AS(withdrawal_rate(1.5, PlanParams::finite(360)), ValidationError);
    CHECK_THROWS_AS(withdrawal_rate(0.05, PlanParams::finite(0)), ValidationError);
    CHECK_THROWS_AS(withdrawal_rate(0.05, PlanParams::finite(-5)), ValidationError);
}

TEST_CASE("perpetual plans return gamma itself inside (0, 2)") {
    CHECK(withdrawal_rate(0.021, PlanParams::perpetual()) == 0.021);
    CHECK(withdrawal_rate(1.9, PlanParams::perpetual()) == 1.9);
    CHECK_THROWS_AS(withdrawal_rate(0.0, PlanParams::perpetual()), ValidationError);
    CHECK_THROWS_AS(withdrawal_rate(-0.01, PlanParams::perpetual()), ValidationError);
    CHECK_THROWS_AS(withdrawal_rate(2.0, PlanParams::perpetual()), ValidationError);
    CHECK(expected_w_over_c(0.021, PlanParams::perpetual()) ==
          doctest::Approx(1.0 / 0.021).epsilon(1e-15));
}

TEST_CASE("withdrawal rate rises in gamma and falls in horizon") {
    const double gammas[] = {-0.05, -0.01, -0.001, 0.0, 0.001, 0.01, 0.05};
    for (long t : {12L, 120L, 360L, 600L}) {
        double prev = -1.0;
        for (double g : gammas) {
            const double w = withdrawal_rate(g, PlanParams::finite(t));
            CHECK(w > prev);
            prev = w;
        }
    }
    for (double g : gammas) {
        double prev = 2.0;
        for (long t : {12L, 120L, 360L, 600L}) {
            const double w = withdrawal_rate(g, PlanParams::finite(t));
            CHECK(w < prev);
            prev = w;
        }
    }
}

TEST_CASE("finite rate approaches gamma as the horizon grows") {
    for (double g : {0.001, 0.01, 0.05, 0.1}) {
        double prev_gap = 1.0;
        for (long t : {120L, 600L, 3000L, 12000L}) {
            const double gap = std::abs(withdrawal_rate(g, PlanParams::finite(t)) - g);
            // non-strict: the gap underflows to exactly 0 for large t
            CHECK(gap <= prev_gap);
            prev_gap = gap;
        }
        CHECK(prev_gap < 1e-6);
    }
}

TEST_CASE("expected withdrawals reciprocate the withdrawal rate") {
    for (double g : {-0.05, -0.02, -0.001, 0.001, 0.02, 0.05}) {
        for (long t : {12L, 120L, 360L, 600L}) {
            const PlanParams plan = PlanParams::finite(t);
            const double product =
                expected_w_over_c(g, plan) * withdrawal_rate(g, plan);
            CHECK(std::abs(product - 1.0) <= 1e-12);
        }
    }
    CHECK(expected_w_over_c(0.0, PlanParams::finite(360)) == 360.0);
}

TEST_CASE("expected withdrawals equal the geometric survival sum") {
    for (double g : {0.021, 0.049, -0.01}) {
        for (long t : {30L, 360L}) {
            double sum = 0.0;
            double surv = 1.0;
            for (long i = 0; i < t; ++i) {
                sum += surv;
                surv *= 1.0 - g;
            }
            CHECK(expected_w_over_c(g, PlanParams::finite(t)) ==
                  doctest::Approx(sum).epsilon(1e-12));
        }
    }
    // the published 30-year depletion rate funds about 22.3 years of
    // first-year spending, the reciprocal of roughly 0.045
    const double ew = expected_w_over_c(0.021, PlanParams::finite(30));
    CHECK(std::abs(ew * 0.045 - 1.0) < 0.01);
}

TEST_CASE("longevity haircut") {
    CHECK(longevity_haircut(0.021, 30) ==
          doctest::Approx(0.5290305525234448).epsilon(1e-14));
    CHECK(std::abs(longevity_haircut(0.021, 30) - 0.53) < 0.01);
    CHECK(longevity_haircut(0.0, 360) == 1.0);
    CHECK(longevity_haircut(1.0, 7) == 0.0);
    CHECK_THROWS_AS(longevity_haircut(0.02, -1), ValidationError);
}

TEST_CASE("annualized withdrawal rate") {
    // flat withdrawals: exactly twelve months of the monthly rate
    CHECK(annualized_withdrawal_rate(0.004, 0.0) == 0.004 * 12.0);
    CHECK(annualized_withdrawal_rate(0.00444, 0.003) ==
          doctest::Approx(0.0542).epsilon(2e-3));
    CHECK(annualized_withdrawal_rate(0.00312, 0.003) ==
          doctest::Approx(0.0381).epsilon(2e-3));
    CHECK(annualized_withdrawal_rate(0.00534, 0.003) ==
          doctest::Approx(0.0651).epsilon(2e-3));
    CHECK_THROWS_AS(annualized_withdrawal_rate(0.004, -1.0), ValidationError);
}
