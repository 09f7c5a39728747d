#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "decum/errors.hpp"
#include "decum/model.hpp"
#include "decum/montecarlo.hpp"

using namespace decum;

namespace {

MomentSummary normal_summary(double mean, double variance) {
    MomentSummary m;
    m.mean = mean;
    m.variance = variance;
    m.skewness = 0.0;
    m.kurtosis = 3.0;
    m.n = 2;
    return m;
}

double geometric_sum(double r, double s, long t) {
    double sum = 0.0, term = 1.0;
    const double ratio = (1.0 + s) / (1.0 + r);
    for (long i = 0; i < t; ++i) {
        sum += term;
        term *= ratio;
    }
    return sum;
}

}  // namespace

TEST_CASE("degenerate distributions reproduce the deterministic sum") {
    // zero return, zero growth: exactly t units of spending
    auto flat = mc_expected_w_over_c(NormalReturns{0.0, 0.0}, PlanParams::finite(120, 0.0),
                                     500, 7);
    CHECK(flat.value == doctest::Approx(120.0).epsilon(1e-12));
    CHECK(flat.std_error == 0.0);

    // constant growth against constant return
    auto fixed = mc_expected_w_over_c(NormalReturns{0.005, 0.0},
                                      PlanParams::finite(60, 0.003), 500, 7);
    CHECK(fixed.value == doctest::Approx(geometric_sum(0.005, 0.003, 60)).epsilon(1e-9));
    // identical paths: only accumulation roundoff is left
    CHECK(fixed.std_error < 1e-12);

    // a one-value bootstrap is the same constant model
    BootstrapReturns one;
    one.values = Eigen::ArrayXd::Constant(1, 0.005);
    auto boot = mc_expected_w_over_c(one, PlanParams::finite(60, 0.003), 500, 7);
    CHECK(boot.value == doctest::Approx(geometric_sum(0.005, 0.003, 60)).epsilon(1e-9));
}

TEST_CASE("two-point model matches its exact two-month expectation") {
    // t = 2: E[W/c] = 1 + (1+s) * E[1/(1+r)] in closed form
    const double exact = 1.0 + 1.003 * 0.5 * (1.0 / 0.99 + 1.0 / 1.01);
    auto est = mc_expected_w_over_c(TwoPointReturns{-0.01, 0.01},
                                    PlanParams::finite(2, 0.003), 100000, 42);
    CHECK(est.std_error > 0.0);
    CHECK(std::abs(est.value - exact) < 4.0 * est.std_error);
}

TEST_CASE("bootstrap over two values behaves like the two-point model") {
    BootstrapReturns two;
    two.values = Eigen::ArrayXd(2);
    two.values << -0.01, 0.01;
    const double exact = 1.0 + 1.003 * 0.5 * (1.0 / 0.99 + 1.0 / 1.01);
    auto est =
        mc_expected_w_over_c(two, PlanParams::finite(2, 0.003), 100000, 11);
    CHECK(std::abs(est.value - exact) < 4.0 * est.std_error);
}

TEST_CASE("normal returns land near the fourth-order closed form") {
    struct Pair {
        double mean, variance;
    };
    for (const Pair p : {Pair{0.0065, 0.0006}, Pair{0.00823, 0.00164}}) {
        const PlanParams plan = PlanParams::finite(360, 0.003);
        const double closed4 =
            expected_w_over_c(gamma4(normal_summary(p.mean, p.variance), 0.003).value,
                              plan);
        auto est = mc_expected_w_over_c(NormalReturns{p.mean, p.variance}, plan, 20000, 42);
        // sanity: within 2% of the refined closed form
        CHECK(std::abs(est.value - closed4) / closed4 < 0.02);
        // and not significantly below it
        CHECK(est.value >= closed4 - 3.0 * est.std_error);
    }
}

TEST_CASE("estimates are identical for any thread count") {
    const PlanParams plan = PlanParams::finite(120, 0.003);
    auto a = mc_expected_w_over_c(NormalReturns{0.005, 0.001}, plan, 4000, 99, 1);
    auto b = mc_expected_w_over_c(NormalReturns{0.005, 0.001}, plan, 4000, 99, 4);
    auto c = mc_expected_w_over_c(NormalReturns{0.005, 0.001}, plan, 4000, 99, 3);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    CHECK(a.resampled_draws == b.resampled_draws);
    CHECK(a.value == c.value);

    auto other = mc_expected_w_over_c(NormalReturns{0.005, 0.001}, plan, 4000, 100, 1);
    CHECK(other.value != a.value);
}

TEST_CASE("ruinous draws are resampled, and a ruinous model is rejected") {
    // mean -0.9, sd 0.05: about 2.3% of draws land at or below -1, far over
    // the 1-in-10000 budget
    CHECK_THROWS_WITH_AS(
        mc_expected_w_over_c(NormalReturns{-0.9, 0.0025}, PlanParams::finite(12, 0.0),
                             2000, 1),
        doctest::Contains("r <= -1"), ValidationError);

    // a fat but admissible tail: resampling engages yet stays under budget
    auto est = mc_expected_w_over_c(NormalReturns{0.005, 0.03},
                                    PlanParams::finite(24, 0.003), 50000, 5);
    CHECK(est.value > 0.0);
    CHECK(static_cast<double>(est.resampled_draws) <
          1e-4 * static_cast<double>(50000 * 23));
}

TEST_CASE("input validation") {
    const PlanParams plan = PlanParams::finite(60, 0.003);
    CHECK_THROWS_AS(mc_expected_w_over_c(NormalReturns{0.005, -1e-6}, plan, 100, 1),
                    ValidationError);
    CHECK_THROWS_AS(mc_expected_w_over_c(TwoPointReturns{-1.0, 0.01}, plan, 100, 1),
                    ValidationError);
    CHECK_THROWS_AS(mc_expected_w_over_c(BootstrapReturns{}, plan, 100, 1),
                    ValidationError);
    BootstrapReturns bad;
    bad.values = Eigen::ArrayXd::Constant(3, -1.0);
    CHECK_THROWS_AS(mc_expected_w_over_c(bad, plan, 100, 1), ValidationError);
    CHECK_THROWS_AS(
        mc_expected_w_over_c(NormalReturns{0.005, 0.001}, PlanParams::perpetual(), 100, 1),
        ValidationError);
    CHECK_THROWS_AS(mc_expected_w_over_c(NormalReturns{0.005, 0.001},
                                         PlanParams::finite(60, 0.003), 1, 1),
                    ValidationError);
    CHECK_THROWS_AS(mc_expected_w_over_c(NormalReturns{0.005, 0.001},
                                         PlanParams::finite(0, 0.003), 100, 1),
                    ValidationError);
}
