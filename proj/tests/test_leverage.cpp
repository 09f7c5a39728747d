#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "decum/errors.hpp"
#include "decum/leverage.hpp"

using namespace decum;

namespace {

MomentSummary summary(double mean, double variance) {
    MomentSummary m;
    m.mean = mean;
    m.variance = variance;
    m.n = 2;
    return m;
}

// Exhaustive scan of the levered depletion rate, the independent check on
// the closed-form optimum.
double grid_argmax(const MomentSummary& m, const LeverageQuote& q, double step) {
    double best_l = 0.0;
    double best_g = -1e300;
    for (double l = 0.0; l <= 20.0 + step / 2; l += step) {
        const double g = levered_gamma(m, 0.003, l, q).value;
        if (g > best_g) {
            best_g = g;
            best_l = l;
        }
    }
    return best_l;
}

double central_derivative(const MomentSummary& m, const LeverageQuote& q, double l) {
    const double h = 1e-6;
    return (levered_gamma(m, 0.003, l + h, q).value -
            levered_gamma(m, 0.003, l - h, q).value) /
           (2.0 * h);
}

}  // namespace

TEST_CASE("levered depletion rate at l = 1 with a free quote is the unlevered rate") {
    const LeverageQuote zero{0.0, 0.0, ""};
    const double Es[] = {0.0, 0.003, 0.0065, 0.00823, 0.082};
    const double Vs[] = {0.0, 1e-5, 0.0006, 0.00164, 0.029};
    for (double E : Es)
        for (double V : Vs) {
            const double levered = levered_gamma(summary(E, V), 0.003, 1.0, zero).value;
            const double plain = gamma2(summary(E, V), 0.003).value;
            CHECK(std::abs(levered - plain) <= 1e-14);
        }
}

TEST_CASE("levered depletion rate matches hand-computed values") {
    CHECK(levered_gamma(summary(0.082, 0.029), 0.029, 1.34, {0.0, 0.0, ""}).value ==
          doctest::Approx(0.024595001621797175).epsilon(1e-14));
    CHECK(std::abs(levered_gamma(summary(0.082, 0.029), 0.029, 1.34, {0.0, 0.0, ""}).value -
                   0.025) < 1e-3);
    // 60/40-scale inputs with a bill-like funding quote
    CHECK(levered_gamma(summary(0.0065, 0.0006), 0.003, 3.05, {0.00277, 6.13e-6, ""}).value ==
          doctest::Approx(0.0054453837695294105).epsilon(1e-12));
}

TEST_CASE("levered depletion rate validation") {
    CHECK_THROWS_AS(levered_gamma(summary(0.005, 0.001), 0.003, -0.1, {0.0, 0.0, ""}),
                    ValidationError);
    // ruinous funding: denominator 1 + lE - (l-1)Eq driven non-positive
    CHECK_THROWS_AS(levered_gamma(summary(0.0, 0.001), 0.003, 20.0, {0.06, 0.0, ""}),
                    ValidationError);
    CHECK_THROWS_AS(levered_gamma(summary(0.005, 0.001), 0.003, 2.0, {0.0, -1e-9, ""}),
                    ValidationError);
}

TEST_CASE("free-funding optimal leverage matches hand-computed values") {
    CHECK(optimal_leverage_free(summary(0.082, 0.029)) ==
          doctest::Approx(1.3401563254102558).epsilon(1e-14));
    CHECK(optimal_leverage_free(summary(0.0065, 0.0006)) ==
          doctest::Approx(5.324527247824976).epsilon(1e-14));
    CHECK(optimal_leverage_free(summary(0.00823, 0.00164)) ==
          doctest::Approx(2.483760631278995).epsilon(1e-14));
    CHECK(optimal_leverage_free(summary(0.00383, 0.000165)) ==
          doctest::Approx(11.358975207539684).epsilon(1e-14));
    CHECK(optimal_leverage_free(summary(0.0, 0.001)) == 0.0);
    CHECK_THROWS_AS(optimal_leverage_free(summary(0.005, 0.0)), ValidationError);
    CHECK_THROWS_AS(optimal_leverage_free(summary(-0.002, 0.001)), ValidationError);
}

TEST_CASE("costly optimal leverage matches hand-computed values") {
    const LeverageQuote bill{0.00277, 6.13e-6, "tbill"};
    CHECK(optimal_leverage_costly(summary(0.0065, 0.0006), bill) ==
          doctest::Approx(3.061102952253606).epsilon(1e-12));
    CHECK(optimal_leverage_costly(summary(0.00823, 0.00164), bill) ==
          doctest::Approx(1.6501746241256277).epsilon(1e-12));
    CHECK(optimal_leverage_costly(summary(0.00383, 0.000165), bill) ==
          doctest::Approx(3.1192028556149696).epsilon(1e-12));
}

TEST_CASE("costly optimum with a zero quote equals the free optimum") {
    const LeverageQuote zero{0.0, 0.0, ""};
    const double Es[] = {0.001, 0.0065, 0.00823, 0.02};
    const double Vs[] = {1e-4, 0.0006, 0.00164, 0.003};
    for (double E : Es)
        for (double V : Vs) {
            const double costly = optimal_leverage_costly(summary(E, V), zero);
            const double free = optimal_leverage_free(summary(E, V));
            CHECK(costly == doctest::Approx(free).epsilon(1e-12));
        }
}

TEST_CASE("costly optimum rejects funding that outpaces the asset") {
    CHECK_THROWS_WITH_AS(
        optimal_leverage_costly(summary(0.002, 0.0006), {0.003, 6e-6, ""}),
        doctest::Contains("funding cost mean"), ValidationError);
    CHECK_THROWS_AS(optimal_leverage_costly(summary(0.005, 0.0), {0.005, 0.0, ""}),
                    ValidationError);
}

TEST_CASE("costly optimum near equal means takes the analytic limit") {
    // Exactly at E = Eq the closed form is 0/0; the limit is Vq / (V + Vq).
    const double at = optimal_leverage_costly(summary(0.005, 4e-4), {0.005, 6e-6, ""});
    CHECK(at == doctest::Approx(6e-6 / 4.06e-4).epsilon(1e-12));
    // approaching the limit from a resolvable gap stays coherent
    const double near =
        optimal_leverage_costly(summary(0.005, 4e-4), {0.005 - 5e-9, 6e-6, ""});
    CHECK(std::abs(near - at) < 1e-4);
}

TEST_CASE("closed-form optimum beats an exhaustive grid scan") {
    const LeverageQuote bill{0.00277, 6.13e-6, "tbill"};
    struct Case {
        MomentSummary m;
        LeverageQuote q;
    };
    const Case cases[] = {
        {summary(0.0065, 0.0006), bill},
        {summary(0.00823, 0.00164), bill},
        {summary(0.00383, 0.000165), bill},
        {summary(0.082, 0.029), {0.0, 0.0, ""}},
        {summary(0.004, 0.0003), {0.002, 1e-5, ""}},
    };
    for (const auto& c : cases) {
        const double closed = optimal_leverage_costly(c.m, c.q);
        const double grid = grid_argmax(c.m, c.q, 1e-3);
        CHECK(std::abs(closed - grid) < 2e-3);
        CHECK(std::abs(central_derivative(c.m, c.q, closed)) < 1e-8);
        // second-order condition: the optimum sits above its neighbors
        const double at = levered_gamma(c.m, 0.003, closed, c.q).value;
        CHECK(at > levered_gamma(c.m, 0.003, closed + 0.01, c.q).value);
        CHECK(at > levered_gamma(c.m, 0.003, closed - 0.01, c.q).value);
    }
}

TEST_CASE("optimum stays coherent as the mean gap collapses") {
    // As E - Eq shrinks toward the analytic-limit switch the closed form
    // subtracts two nearly equal terms; a brute-force maximization keeps it
    // honest through the cancellation-prone region.
    const double E = 0.005, V = 4e-4, Vq = 6e-6;
    for (double d : {1e-3, 1e-5, 1e-7, 1e-9}) {
        const MomentSummary m = summary(E, V);
        const LeverageQuote q{E - d, Vq, ""};
        const double closed = optimal_leverage_costly(m, q);

        // two-stage scan: coarse over [0, 2], then refined around the best
        double best_l = 0.0, best_g = -1e300;
        for (double l = 0.0; l <= 2.0; l += 1e-4) {
            const double g = levered_gamma(m, 0.003, l, q).value;
            if (g > best_g) {
                best_g = g;
                best_l = l;
            }
        }
        double fine_l = best_l;
        for (double l = best_l - 2e-4; l <= best_l + 2e-4; l += 1e-6) {
            if (l < 0.0) continue;
            const double g = levered_gamma(m, 0.003, l, q).value;
            if (g > best_g) {
                best_g = g;
                fine_l = l;
            }
        }
        CHECK(std::abs(closed - fine_l) < 1e-4);
        // the optimum approaches the limit linearly in d, with slope close
        // to 1 / (2 (1+E) (V + Vq))
        const double expected =
            Vq / (V + Vq) + d / (2.0 * (1.0 + E) * (V + Vq));
        CHECK(std::abs(closed - expected) < 1e-3);
    }
}
