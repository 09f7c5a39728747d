#include "decum/backtest.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "decum/errors.hpp"

namespace decum {

namespace {

struct AssetView {
    const double* values;
    Eigen::Index offset;
};

AssetView view_for(const MonthlyReturnSeries& s, MonthIndex first_needed, long t,
                   const char* role) {
    const long off = first_needed.serial() - s.start.serial();
    if (off < 0 || off + t > s.values.size()) {
        std::ostringstream msg;
        msg << role << " series '" << s.label << "' covers " << s.start.str() << ".."
            << s.last().str() << " but the plan needs " << first_needed.str() << ".."
            << first_needed.plus(t - 1).str();
        throw ValidationError(msg.str());
    }
    return AssetView{s.values.data(), static_cast<Eigen::Index>(off)};
}

void check_weights(const PortfolioSpec& spec, std::size_t n_assets) {
    if (spec.weights.size() != n_assets)
        throw ValidationError("portfolio has " + std::to_string(spec.weights.size()) +
                              " weights for " + std::to_string(n_assets) + " assets");
    double sum = 0.0;
    for (double w : spec.weights) {
        if (w < 0.0) throw ValidationError("portfolio weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "portfolio weights sum to " << std::setprecision(17) << sum << ", not 1";
        throw ValidationError(msg.str());
    }
}

}  // namespace

RetirementTrajectory simulate_retirement(const PortfolioSpec& spec,
                                         const RetirementPlan& plan,
                                         const std::vector<const MonthlyReturnSeries*>& assets,
                                         const MonthlyReturnSeries* cost) {
    if (assets.empty()) throw ValidationError("no assets given");
    check_weights(spec, assets.size());
    const double l = spec.leverage;
    if (l < 0.0) throw ValidationError("leverage must be non-negative");
    const long t = plan.months;
    if (t < 1) throw ValidationError("horizon must be at least 1 month");
    if (!(plan.initial_withdrawal > 0.0 && plan.initial_withdrawal < 1.0))
        throw ValidationError("initial withdrawal must be inside (0, 1)");
    if (!(1.0 + plan.growth > 0.0))
        throw ValidationError("withdrawal growth must exceed -100%");

    // Returns accrue over the t months following the retirement label month.
    const MonthIndex first_needed = plan.start.plus(1);
    std::vector<AssetView> views;
    views.reserve(assets.size());
    for (const auto* a : assets) views.push_back(view_for(*a, first_needed, t, "asset"));

    const bool funded = l != 1.0;
    AssetView cost_view{nullptr, 0};
    if (funded) {
        if (!cost)
            throw ValidationError("leverage other than 1 needs a funding cost series");
        cost_view = view_for(*cost, first_needed, t, "funding cost");
    }

    RetirementTrajectory out;
    out.start = plan.start;
    out.equity_path = Eigen::ArrayXd(t + 1);
    out.equity_path[0] = 1.0;

    const double c = plan.initial_withdrawal;
    const double s = plan.growth;

    double assets_held = l;      // fixed-initial-debt ledger
    double debt = l - 1.0;
    double equity = 1.0;         // constant-leverage ledger

    for (long i = 0; i < t; ++i) {
        const double w = c * std::pow(1.0 + s, static_cast<double>(i));
        double r = 0.0;
        for (std::size_t k = 0; k < views.size(); ++k)
            r += spec.weights[k] * views[k].values[views[k].offset + i];
        const double q = funded ? cost_view.values[cost_view.offset + i] : 0.0;

        double e;
        if (spec.debt_mode == DebtMode::FixedInitialDebt) {
            // Withdraw first, then the month's return lands on what is left;
            // the debt compounds at the funding rate untouched.
            assets_held = (assets_held - w) * (1.0 + r);
            debt = debt * (1.0 + q);
            e = assets_held - debt;
        } else {
            equity = (equity - w) * (1.0 + l * r - (l - 1.0) * q);
            e = equity;
        }
        out.equity_path[i + 1] = e;
        if (e <= 0.0) out.breach_months.push_back(i + 1);
    }
    if (!out.breach_months.empty()) out.first_breach = out.breach_months.front();
    out.terminal = out.equity_path[t];
    return out;
}

BacktestReport run_cohorts(const PortfolioSpec& spec, const RetirementPlan& plan_template,
                           const std::vector<MonthIndex>& starts,
                           const std::vector<const MonthlyReturnSeries*>& assets,
                           const MonthlyReturnSeries* cost, unsigned threads) {
    if (starts.empty()) throw ValidationError("no cohort start months given");

    const std::size_t n = starts.size();
    std::vector<RetirementTrajectory> trajectories(n);

    auto run_range = [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            RetirementPlan plan = plan_template;
            plan.start = starts[i];
            trajectories[i] = simulate_retirement(spec, plan, assets, cost);
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        run_range(0, n);
    } else {
        std::mutex failure_mutex;
        std::exception_ptr failure;
        std::vector<std::thread> pool;
        pool.reserve(threads);
        const std::size_t chunk = (n + threads - 1) / threads;
        for (unsigned k = 0; k < threads; ++k) {
            const std::size_t b = std::min<std::size_t>(k * chunk, n);
            const std::size_t e = std::min<std::size_t>(b + chunk, n);
            pool.emplace_back([&, b, e] {
                try {
                    run_range(b, e);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    BacktestReport report;
    report.cohort_count = n;
    std::vector<double> terminals;
    terminals.reserve(n);
    std::size_t failures = 0;
    double sum = 0.0;
    for (const auto& tr : trajectories) {
        terminals.push_back(tr.terminal);
        sum += tr.terminal;
        if (tr.first_breach) {
            ++failures;
            if (!report.min_first_breach || *tr.first_breach < *report.min_first_breach)
                report.min_first_breach = tr.first_breach;
            if (!report.max_first_breach || *tr.first_breach > *report.max_first_breach)
                report.max_first_breach = tr.first_breach;
        }
    }
    report.failure_rate = static_cast<double>(failures) / static_cast<double>(n);
    report.mean_terminal = sum / static_cast<double>(n);
    std::sort(terminals.begin(), terminals.end());
    report.median_terminal = (n % 2 == 1)
                                 ? terminals[n / 2]
                                 : 0.5 * (terminals[n / 2 - 1] + terminals[n / 2]);
    report.trajectories = std::move(trajectories);
    return report;
}

std::vector<MonthIndex> january_grid(int first_year, int last_year) {
    if (last_year < first_year)
        throw ValidationError("cohort grid years are out of order");
    std::vector<MonthIndex> out;
    out.reserve(static_cast<std::size_t>(last_year - first_year + 1));
    for (int y = first_year; y <= last_year; ++y) out.push_back(MonthIndex{y, 1});
    return out;
}

std::string summarize(const BacktestReport& report) {
    std::ostringstream out;
    const std::size_t failures = static_cast<std::size_t>(
        std::lround(report.failure_rate * static_cast<double>(report.cohort_count)));
    out << "cohorts:            " << report.cohort_count;
    if (!report.trajectories.empty())
        out << " (" << report.trajectories.front().start.str() << " .. "
            << report.trajectories.back().start.str() << ")";
    out << "\n";
    out << "failure rate:       " << std::fixed << std::setprecision(1)
        << 100.0 * report.failure_rate << "% (" << failures << " of "
        << report.cohort_count << ")\n";
    out << "terminal equity/W:  mean " << std::setprecision(3) << report.mean_terminal
        << ", median " << report.median_terminal << "\n";
    if (report.min_first_breach)
        out << "first breach month: min " << *report.min_first_breach << ", max "
            << *report.max_first_breach << " (among failing cohorts)\n";
    else
        out << "first breach month: none\n";
    return out.str();
}

std::string report_json(const BacktestReport& report, bool include_cohorts) {
    nlohmann::json j;
    j["cohort_count"] = report.cohort_count;
    j["failure_rate"] = report.failure_rate;
    j["mean_terminal"] = report.mean_terminal;
    j["median_terminal"] = report.median_terminal;
    if (report.min_first_breach) {
        j["first_breach_min"] = *report.min_first_breach;
        j["first_breach_max"] = *report.max_first_breach;
    } else {
        j["first_breach_min"] = nullptr;
        j["first_breach_max"] = nullptr;
    }
    if (include_cohorts) {
        nlohmann::json cohorts = nlohmann::json::array();
        for (const auto& tr : report.trajectories) {
            nlohmann::json c;
            c["start"] = tr.start.str();
            c["terminal"] = tr.terminal;
            if (tr.first_breach)
                c["first_breach"] = *tr.first_breach;
            else
                c["first_breach"] = nullptr;
            c["breach_count"] = tr.breach_months.size();
            cohorts.push_back(std::move(c));
        }
        j["cohorts"] = std::move(cohorts);
    }
    return j.dump(2);
}

void write_trajectories_csv(const BacktestReport& report, std::ostream& out) {
    out << "cohort_start,month_index,equity_over_w,breached\n";
    out << std::setprecision(17);
    for (const auto& tr : report.trajectories) {
        const std::string start = tr.start.str();
        for (Eigen::Index i = 0; i < tr.equity_path.size(); ++i) {
            const double e = tr.equity_path[i];
            out << start << "," << i << "," << e << "," << (i > 0 && e <= 0.0 ? 1 : 0)
                << "\n";
        }
    }
}

void render_trajectories_svg(const BacktestReport& report, const std::string& title,
                             std::ostream& out) {
    const int cols = 12;
    const int cell_w = 110, cell_h = 70, pad = 8, header = 28;
    const std::size_t n = report.trajectories.size();
    const int rows = static_cast<int>((n + cols - 1) / cols);
    const int width = cols * (cell_w + pad) + pad;
    const int height = header + rows * (cell_h + pad) + pad;

    double ymin = 0.0, ymax = 1.0;
    for (const auto& tr : report.trajectories) {
        ymin = std::min(ymin, tr.equity_path.minCoeff());
        ymax = std::max(ymax, tr.equity_path.maxCoeff());
    }
    const double yspan = ymax - ymin;

    out << std::setprecision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << pad << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">"
        << title << "</text>\n";

    for (std::size_t idx = 0; idx < n; ++idx) {
        const auto& tr = report.trajectories[idx];
        const int cx = static_cast<int>(idx % cols) * (cell_w + pad) + pad;
        const int cy = header + static_cast<int>(idx / cols) * (cell_h + pad);
        const Eigen::Index t = tr.equity_path.size() - 1;

        auto px = [&](Eigen::Index i) {
            return cx + static_cast<double>(i) / static_cast<double>(t) * cell_w;
        };
        auto py = [&](double e) { return cy + (ymax - e) / yspan * cell_h; };

        out << "<rect x=\"" << cx << "\" y=\"" << cy << "\" width=\"" << cell_w
            << "\" height=\"" << cell_h << "\" fill=\"none\" stroke=\"#ddd\"/>\n";
        // zero-equity guide line
        out << "<line x1=\"" << cx << "\" y1=\"" << py(0.0) << "\" x2=\"" << cx + cell_w
            << "\" y2=\"" << py(0.0) << "\" stroke=\"#bbb\" stroke-width=\"0.5\"/>\n";

        const Eigen::Index split = tr.first_breach ? *tr.first_breach : t;
        out << "<polyline fill=\"none\" stroke=\"#1a6091\" stroke-width=\"1\" points=\"";
        for (Eigen::Index i = 0; i <= split; ++i)
            out << px(i) << "," << py(tr.equity_path[i]) << " ";
        out << "\"/>\n";
        if (split < t) {
            out << "<polyline fill=\"none\" stroke=\"#b03a2e\" stroke-width=\"1\" "
                   "stroke-dasharray=\"3,2\" points=\"";
            for (Eigen::Index i = split; i <= t; ++i)
                out << px(i) << "," << py(tr.equity_path[i]) << " ";
            out << "\"/>\n";
        }
        out << "<text x=\"" << cx + 2 << "\" y=\"" << cy + 10
            << "\" font-family=\"sans-serif\" font-size=\"7\" fill=\"#666\">"
            << tr.start.str() << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace decum
