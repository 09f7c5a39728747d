#include "decum/leverage.hpp"

#include <cmath>
#include <sstream>

#include "decum/errors.hpp"

namespace decum {

GammaValue levered_gamma(const MomentSummary& m, double s, double l,
                         const LeverageQuote& quote) {
    if (l < 0.0) throw ValidationError("leverage must be non-negative");
    if (!(1.0 + s > 0.0)) throw ValidationError("withdrawal growth must exceed -100%");
    if (!(1.0 + quote.mean_cost > 0.0))
        throw ValidationError("mean funding cost must exceed -100%");
    if (quote.var_cost < 0.0)
        throw ValidationError("funding cost variance must be non-negative");
    const double E = m.mean, V = m.variance;
    const double Eq = quote.mean_cost, Vq = quote.var_cost;
    const double denom = 1.0 + l * E - (l - 1.0) * Eq;
    if (!(denom > 0.0)) {
        std::ostringstream msg;
        msg << "levered growth 1 + l*E - (l-1)*Eq = " << denom
            << " is not positive at l = " << l << "; the position is outside the model";
        throw ValidationError(msg.str());
    }
    GammaValue g;
    g.value = 1.0 - (1.0 + s) * (1.0 + l * l * V + (l - 1.0) * (l - 1.0) * Vq) / denom;
    g.order = 2;
    g.inputs = m;
    g.growth = s;
    return g;
}

double optimal_leverage_free(const MomentSummary& m) {
    const double E = m.mean, V = m.variance;
    if (!(V > 0.0))
        throw ValidationError("optimal leverage needs positive return variance");
    if (E < 0.0)
        throw ValidationError(
            "negative mean return would call for a short position, outside the model");
    if (E == 0.0) return 0.0;  // limit of (sqrt(1 + E^2/V) - 1) / E as E -> 0
    return (std::sqrt(1.0 + E * E / V) - 1.0) / E;
}

double optimal_leverage_costly(const MomentSummary& m, const LeverageQuote& quote) {
    const double E = m.mean, V = m.variance;
    const double Eq = quote.mean_cost, Vq = quote.var_cost;
    if (!(V + Vq > 0.0))
        throw ValidationError("optimal leverage needs positive combined variance");
    if (Vq < 0.0) throw ValidationError("funding cost variance must be non-negative");
    const double d = E - Eq;
    if (d < -1e-10) {
        std::ostringstream msg;
        msg << "funding cost mean " << Eq << " exceeds return mean " << E
            << "; borrowing can never pay and the optimum is undefined";
        throw ValidationError(msg.str());
    }
    if (std::abs(d) <= 1e-10) {
        // 0/0 limit of the closed form as E -> Eq.
        return Vq / (V + Vq);
    }
    const double a = 1.0 + Eq;
    const double num = a * a * V + (1.0 + E) * (1.0 + E) * Vq + d * d;
    return (std::sqrt(num / (V + Vq)) - a) / d;
}

}  // namespace decum
