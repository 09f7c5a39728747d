#pragma once
#include <string>

#include "decum/model.hpp"
#include "decum/moments.hpp"

namespace decum {

// Moments of the monthly funding cost of borrowed capital.  mean_cost and
// var_cost are in the same per-month units as return moments.  source is an
// optional label of the rate series the quote was estimated from.
struct LeverageQuote {
    double mean_cost = 0.0;
    double var_cost = 0.0;
    std::string source;
};

// Depletion rate of a portfolio levered l times, funding the extra (l - 1)
// exposure at the quoted cost:
//   1 - (1 + s) * (1 + l^2 V + (l-1)^2 Vq) / (1 + l E - (l-1) Eq)
// Requires l >= 0 and a positive denominator (a violation means the funding
// drag alone exceeds gross growth, outside the model's range).
GammaValue levered_gamma(const MomentSummary& m, double s, double l,
                         const LeverageQuote& quote);

// Leverage maximizing the growth-versus-variance tradeoff with free
// funding: (sqrt(1 + E^2 / V) - 1) / E, with the E -> 0 limit 0.  Requires
// V > 0 and E >= 0; a negative mean return would call for a short position,
// which is outside the model's validity and errors instead.
double optimal_leverage_free(const MomentSummary& m);

// Same maximization with costly funding.  Requires E > Eq (otherwise
// borrowing can never pay, and the error message names the offending
// side).  Near E = Eq the closed form is a 0/0 ratio; within 1e-10 the
// analytic limit Vq / (V + Vq) is substituted.
double optimal_leverage_costly(const MomentSummary& m, const LeverageQuote& quote);

}  // namespace decum
