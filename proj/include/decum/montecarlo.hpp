#pragma once
#include <Eigen/Core>
#include <cstdint>
#include <variant>

#include "decum/model.hpp"

namespace decum {

// Return distributions mc_expected_w_over_c can draw from.
struct NormalReturns {
    double mean = 0.0;
    double variance = 0.0;
};
// Equal-probability two-point distribution.
struct TwoPointReturns {
    double lo = 0.0;
    double hi = 0.0;
};
// IID resampling from an observed sample.
struct BootstrapReturns {
    Eigen::ArrayXd values;
};
using ReturnModel = std::variant<NormalReturns, TwoPointReturns, BootstrapReturns>;

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::size_t resampled_draws = 0;  // draws rejected for r <= -1 and retried
};

// Monte Carlo estimate of the expected number of initial withdrawals a unit
// of wealth funds over a finite plan, for IID returns from the given model.
// Each path draws t-1 returns (the month-0 term is 1 by construction) and
// accumulates sum_i (1+s)^i / prod_{j<=i} (1+r_j).
//
// Draws at or below -100% are resampled; if more than 1 in 10^4 of all draws
// needed resampling the distribution is treated as incompatible with the
// model and a ValidationError is thrown.  Seeding is per-path, so results
// are bit-identical for any thread count.  threads = 0 means use all
// hardware threads.
McEstimate mc_expected_w_over_c(const ReturnModel& model, const PlanParams& plan,
                                std::size_t n_paths, std::uint64_t seed = 42,
                                unsigned threads = 0);

}  // namespace decum
