#pragma once
#include <Eigen/Core>
#include <cstddef>
#include <optional>

#include "decum/series.hpp"

namespace decum {

// Population moments of a return sample.  skewness and kurtosis are the
// standardized third and fourth central moments (kurtosis is not excess, a
// normal sample sits near 3).  Both are absent when the sample variance is
// zero, since standardizing would divide by zero.
struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;
    std::optional<double> skewness;
    std::optional<double> kurtosis;
    std::size_t n = 0;
};

// Central moments with 1/n normalization.  Requires at least 2 observations.
MomentSummary compute_moments(const Eigen::ArrayXd& values);
MomentSummary compute_moments(const MonthlyReturnSeries& series);

// Growth-deflated volatility sqrt(V) / (1 + E).  This is the natural size
// of return noise relative to gross growth and drives the higher-order
// corrections in the model.
double reduced_sigma(const MomentSummary& m);

}  // namespace decum
