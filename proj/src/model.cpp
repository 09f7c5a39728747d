#include "decum/model.hpp"

#include <cmath>
#include <sstream>

#include "decum/errors.hpp"

namespace decum {

namespace {

void check_inputs(const MomentSummary& m, double s) {
    if (!(1.0 + m.mean > 0.0))
        throw ValidationError("mean return must exceed -100%");
    if (m.variance < 0.0)
        throw ValidationError("variance must be non-negative");
    if (!(1.0 + s > 0.0))
        throw ValidationError("withdrawal growth must exceed -100%");
}

}  // namespace

GammaValue gamma2(const MomentSummary& m, double s) {
    check_inputs(m, s);
    const double E = m.mean, V = m.variance;
    GammaValue g;
    g.value = (E - (s + V + s * V)) / (1.0 + E);
    g.order = 2;
    g.inputs = m;
    g.growth = s;
    return g;
}

GammaValue gamma4(const MomentSummary& m, double s) {
    check_inputs(m, s);
    if (!m.skewness || !m.kurtosis)
        throw ValidationError(
            "fourth-order rate needs skewness and kurtosis, absent for this summary");
    const double E = m.mean;
    const double st = std::sqrt(m.variance) / (1.0 + E);
    const double S = *m.skewness, K = *m.kurtosis;
    GammaValue g;
    g.value = 1.0 - (1.0 + s) / (1.0 + E) * (1.0 + st * st * (1.0 - st * S + st * st * K));
    g.order = 4;
    g.inputs = m;
    g.growth = s;
    return g;
}

// Shared core of withdrawal_rate and expected_w_over_c.  Returns the
// depletion denominator D = 1 - (1 - gamma)^t evaluated stably, or the
// gamma ~ 0 signal via the bool.
namespace {

struct Depletion {
    bool near_zero = false;
    double denom = 0.0;
};

Depletion depletion_denom(double gamma, long t) {
    if (t < 1) throw ValidationError("horizon must be at least 1 month");
    if (!(gamma < 1.0))
        throw ValidationError("finite-horizon formulas need gamma < 1, got " +
                              std::to_string(gamma));
    Depletion d;
    if (std::abs(gamma * static_cast<double>(t)) < 1e-9) {
        d.near_zero = true;
        return d;
    }
    // 1 - (1-g)^t as -expm1(t*log1p(-g)): no catastrophic cancellation for
    // small g, exact sign for g < 0.
    d.denom = -std::expm1(static_cast<double>(t) * std::log1p(-gamma));
    return d;
}

void check_perpetual(double gamma) {
    if (!(gamma > 0.0 && gamma < 2.0)) {
        std::ostringstream msg;
        msg << "a perpetual plan needs a depletion rate in (0, 2), got " << gamma;
        throw ValidationError(msg.str());
    }
}

}  // namespace

double withdrawal_rate(double gamma, const PlanParams& plan) {
    if (!plan.horizon_months) {
        check_perpetual(gamma);
        return gamma;
    }
    auto d = depletion_denom(gamma, *plan.horizon_months);
    if (d.near_zero) return 1.0 / static_cast<double>(*plan.horizon_months);
    return gamma / d.denom;
}

double expected_w_over_c(double gamma, const PlanParams& plan) {
    if (!plan.horizon_months) {
        check_perpetual(gamma);
        return 1.0 / gamma;
    }
    auto d = depletion_denom(gamma, *plan.horizon_months);
    if (d.near_zero) return static_cast<double>(*plan.horizon_months);
    return d.denom / gamma;
}

double annualized_withdrawal_rate(double monthly_rate, double s) {
    if (!(1.0 + s > 0.0))
        throw ValidationError("withdrawal growth must exceed -100%");
    double sum = 0.0;
    double g = 1.0;
    for (int i = 0; i < 12; ++i) {
        sum += g;
        g *= 1.0 + s;
    }
    return monthly_rate * sum;
}

double longevity_haircut(double gamma, long t) {
    if (t < 0) throw ValidationError("horizon must be non-negative");
    return std::pow(1.0 - gamma, static_cast<double>(t));
}

}  // namespace decum
