#pragma once
#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "decum/month.hpp"

namespace decum {

// Simple per-month returns over a contiguous calendar window.  start is the
// month over which values[0] accrues.
struct MonthlyReturnSeries {
    std::string label;
    MonthIndex start;
    Eigen::ArrayXd values;

    Eigen::Index size() const { return values.size(); }
    MonthIndex month_at(Eigen::Index i) const { return start.plus(i); }
    MonthIndex last() const { return start.plus(values.size() - 1); }
};

// Annualized percentage rates (e.g. a 10-year yield or a funding rate),
// one observation per month, contiguous.
struct RateSeries {
    std::string label;
    MonthIndex start;
    Eigen::ArrayXd annual_rate_percent;

    Eigen::Index size() const { return annual_rate_percent.size(); }
    MonthIndex month_at(Eigen::Index i) const { return start.plus(i); }
    MonthIndex last() const { return start.plus(annual_rate_percent.size() - 1); }
};

// Month-end price levels, contiguous, strictly positive.
struct PriceSeries {
    std::string label;
    MonthIndex start;
    Eigen::ArrayXd prices;

    Eigen::Index size() const { return prices.size(); }
    MonthIndex month_at(Eigen::Index i) const { return start.plus(i); }
    MonthIndex last() const { return start.plus(prices.size() - 1); }
};

// Throws ValidationError unless the series is non-empty and every return is
// strictly greater than -1 (a -100% month would wipe out compounding math).
void validate_returns(const MonthlyReturnSeries& s);

// Largest calendar window covered by every input.  Throws ValidationError if
// the intersection is empty.
struct Window {
    MonthIndex start;
    long length = 0;
    MonthIndex last() const { return start.plus(length - 1); }
};
Window common_window(const std::vector<const MonthlyReturnSeries*>& series);

// Restricts a series to accrual months in [from, to] (either bound may be
// absent, meaning unbounded on that side).  Throws ValidationError when the
// result would be empty.
MonthlyReturnSeries restrict(const MonthlyReturnSeries& s,
                             std::optional<MonthIndex> from,
                             std::optional<MonthIndex> to);

// All inputs cut to their common window, in the original order.
std::vector<MonthlyReturnSeries> align(const std::vector<const MonthlyReturnSeries*>& series);

// Fixed-weight portfolio return over the common window.  Weights must be
// non-negative and sum to 1 within 1e-12.
MonthlyReturnSeries blend(const std::vector<const MonthlyReturnSeries*>& series,
                          const std::vector<double>& weights,
                          const std::string& label = "");

// Levered return l * r - (l - 1) * q over the common window of r and the
// funding series.  cost may be null only when no funding leg is needed; the
// funding rate is then taken as zero.  l = 0 degenerates to earning +q, a
// pure cash position funded by the freed capital.
MonthlyReturnSeries lever(const MonthlyReturnSeries& r, double l,
                          const MonthlyReturnSeries* cost = nullptr);

}  // namespace decum
