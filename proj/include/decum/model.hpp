#pragma once
#include <optional>

#include "decum/moments.hpp"

namespace decum {

// Withdrawal plan: a finite horizon in months, or perpetual, plus the
// monthly growth rate s applied to the withdrawal amount (0.003 is roughly
// a 3.6% annual cost-of-living ramp).
struct PlanParams {
    std::optional<long> horizon_months;  // absent means perpetual
    double growth = 0.003;

    static PlanParams finite(long t, double s = 0.003) { return {t, s}; }
    static PlanParams perpetual(double s = 0.003) { return {std::nullopt, s}; }
};

// Effective per-month depletion rate of the plan.  The sustainable
// withdrawal fraction of current wealth is gamma once horizon effects are
// folded in; order records which approximation produced it.
struct GammaValue {
    double value = 0.0;
    int order = 2;          // 2 or 4
    MomentSummary inputs;   // moments the value was derived from
    double growth = 0.0;    // the s used
};

// Second-order depletion rate (E - (s + V + s*V)) / (1 + E).  Valid for
// 1 + E > 0 and 1 + s > 0.
GammaValue gamma2(const MomentSummary& m, double s);

// Fourth-order refinement.  With sigma~ = sqrt(V) / (1 + E):
//   gamma4 = 1 - (1 + s) / (1 + E) * (1 + sigma~^2 * (1 - sigma~ * skew + sigma~^2 * kurt))
// Requires skewness and kurtosis to be present.
GammaValue gamma4(const MomentSummary& m, double s);

// Initial withdrawal c/W sustaining the plan: gamma / (1 - (1 - gamma)^t)
// for a finite horizon, evaluated in log space for stability, with the
// gamma -> 0 limit 1/t taken explicitly when |gamma * t| < 1e-9.  A
// perpetual plan requires 0 < gamma < 2 and returns gamma itself.
double withdrawal_rate(double gamma, const PlanParams& plan);
inline double withdrawal_rate(const GammaValue& g, const PlanParams& plan) {
    return withdrawal_rate(g.value, plan);
}

// Expected number of initial-withdrawal units a unit of wealth funds,
// the exact reciprocal of withdrawal_rate (equals t when gamma = 0).
double expected_w_over_c(double gamma, const PlanParams& plan);

// First-year spending as a fraction of wealth: the monthly rate times the
// twelve-month growth-adjusted sum of (1 + s)^i.
double annualized_withdrawal_rate(double monthly_rate, double s);

// Fraction of a perpetuity's withdrawal that a t-month plan must give up:
// (1 - gamma)^t.
double longevity_haircut(double gamma, long t);

}  // namespace decum
