#include "decum/series.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "decum/errors.hpp"

namespace decum {

void validate_returns(const MonthlyReturnSeries& s) {
    if (s.values.size() == 0)
        throw ValidationError("return series '" + s.label + "' is empty");
    for (Eigen::Index i = 0; i < s.values.size(); ++i) {
        double r = s.values[i];
        if (!(r > -1.0)) {
            std::ostringstream msg;
            msg << "return series '" << s.label << "' has r = " << r << " at "
                << s.month_at(i).str() << "; returns must exceed -1";
            throw ValidationError(msg.str());
        }
    }
}

Window common_window(const std::vector<const MonthlyReturnSeries*>& series) {
    if (series.empty()) throw ValidationError("no series given");
    long lo = series[0]->start.serial();
    long hi = series[0]->last().serial();
    for (const auto* s : series) {
        if (s->values.size() == 0)
            throw ValidationError("return series '" + s->label + "' is empty");
        lo = std::max(lo, s->start.serial());
        hi = std::min(hi, s->last().serial());
    }
    if (lo > hi) {
        std::ostringstream msg;
        msg << "series calendars do not overlap:";
        for (const auto* s : series)
            msg << " " << s->label << " [" << s->start.str() << ".." << s->last().str() << "]";
        throw ValidationError(msg.str());
    }
    return Window{MonthIndex::from_serial(lo), hi - lo + 1};
}

MonthlyReturnSeries restrict(const MonthlyReturnSeries& s,
                             std::optional<MonthIndex> from,
                             std::optional<MonthIndex> to) {
    long lo = s.start.serial();
    long hi = s.last().serial();
    if (from) lo = std::max(lo, from->serial());
    if (to) hi = std::min(hi, to->serial());
    if (lo > hi)
        throw ValidationError("window leaves no observations of '" + s.label + "'");
    MonthlyReturnSeries out;
    out.label = s.label;
    out.start = MonthIndex::from_serial(lo);
    out.values = s.values.segment(lo - s.start.serial(), hi - lo + 1);
    return out;
}

std::vector<MonthlyReturnSeries> align(const std::vector<const MonthlyReturnSeries*>& series) {
    Window w = common_window(series);
    std::vector<MonthlyReturnSeries> out;
    out.reserve(series.size());
    for (const auto* s : series) out.push_back(restrict(*s, w.start, w.last()));
    return out;
}

MonthlyReturnSeries blend(const std::vector<const MonthlyReturnSeries*>& series,
                          const std::vector<double>& weights,
                          const std::string& label) {
    if (series.size() != weights.size())
        throw ValidationError("blend got " + std::to_string(series.size()) + " series but " +
                              std::to_string(weights.size()) + " weights");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ValidationError("blend weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "blend weights sum to " << sum << ", not 1";
        throw ValidationError(msg.str());
    }
    auto cut = align(series);
    MonthlyReturnSeries out;
    out.start = cut[0].start;
    out.values = Eigen::ArrayXd::Zero(cut[0].values.size());
    std::ostringstream name;
    for (std::size_t k = 0; k < cut.size(); ++k) {
        out.values += weights[k] * cut[k].values;
        if (k) name << "+";
        name << weights[k] << "*" << cut[k].label;
    }
    out.label = label.empty() ? name.str() : label;
    return out;
}

MonthlyReturnSeries lever(const MonthlyReturnSeries& r, double l,
                          const MonthlyReturnSeries* cost) {
    if (l < 0.0) throw ValidationError("leverage must be non-negative");
    MonthlyReturnSeries out;
    if (cost) {
        auto cut = align({&r, cost});
        out.start = cut[0].start;
        out.values = l * cut[0].values - (l - 1.0) * cut[1].values;
    } else {
        out.start = r.start;
        out.values = l * r.values;  // funding leg absent, cost taken as zero
    }
    std::ostringstream name;
    name << l << "x " << r.label;
    if (cost) name << " funded by " << cost->label;
    out.label = name.str();
    return out;
}

}  // namespace decum
