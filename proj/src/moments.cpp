#include "decum/moments.hpp"

#include <cmath>

#include "decum/errors.hpp"

namespace decum {

MomentSummary compute_moments(const Eigen::ArrayXd& values) {
    const auto n = values.size();
    if (n < 2)
        throw ValidationError("need at least 2 observations to form moments, got " +
                              std::to_string(n));
    MomentSummary out;
    out.n = static_cast<std::size_t>(n);
    out.mean = values.mean();
    Eigen::ArrayXd d = values - out.mean;
    out.variance = d.square().mean();  // population (1/n) normalization throughout
    if (out.variance > 0.0) {
        double sd3 = std::pow(out.variance, 1.5);
        out.skewness = d.pow(3).mean() / sd3;
        out.kurtosis = d.pow(4).mean() / (out.variance * out.variance);
    }
    return out;
}

MomentSummary compute_moments(const MonthlyReturnSeries& series) {
    return compute_moments(series.values);
}

double reduced_sigma(const MomentSummary& m) {
    if (m.variance < 0.0) throw ValidationError("variance must be non-negative");
    if (!(1.0 + m.mean > 0.0))
        throw ValidationError("mean return at or below -100% leaves no growth to deflate by");
    return std::sqrt(m.variance) / (1.0 + m.mean);
}

}  // namespace decum
