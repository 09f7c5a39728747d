#pragma once
#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "decum/month.hpp"
#include "decum/series.hpp"

namespace decum {

enum class DebtMode {
    // Borrow (l - 1) once at retirement; the debt then compounds at the
    // funding rate while assets run on their own.
    FixedInitialDebt,
    // Re-lever every month so exposure stays l times current equity.
    ConstantLeverage,
};

// What is held: weights over the asset list handed to the simulator, a
// leverage multiple applied to the blend, and how debt is managed.
struct PortfolioSpec {
    std::vector<double> weights;
    double leverage = 1.0;
    DebtMode debt_mode = DebtMode::FixedInitialDebt;
};

// A single retiree cohort: initial monthly withdrawal as a fraction of
// starting wealth, the growth ramp on withdrawals, the horizon, and the
// label month of retirement.  Consumption and returns run over the t months
// following start.
struct RetirementPlan {
    double initial_withdrawal = 0.0;
    double growth = 0.003;
    long months = 360;
    MonthIndex start;
};

// Signed equity path of one cohort, in units of starting wealth.
// equity_path has months + 1 entries with [0] = 1; breach_months lists the
// 1-based months whose end-of-month equity was <= 0.
struct RetirementTrajectory {
    MonthIndex start;
    Eigen::ArrayXd equity_path;
    std::vector<long> breach_months;
    std::optional<long> first_breach;
    double terminal = 0.0;
};

struct BacktestReport {
    std::vector<RetirementTrajectory> trajectories;
    std::size_t cohort_count = 0;
    double failure_rate = 0.0;      // fraction of cohorts that ever breached
    double mean_terminal = 0.0;
    double median_terminal = 0.0;
    std::optional<long> min_first_breach;
    std::optional<long> max_first_breach;
};

// Runs one cohort.  assets are blended by spec.weights (must sum to 1
// within 1e-12 and match the asset count); leverage != 1 requires a funding
// cost series.  Every asset and the cost series must cover the plan's full
// window, otherwise a ValidationError names the shortfall.  Withdrawals
// come out before the month's return accrues.
RetirementTrajectory simulate_retirement(const PortfolioSpec& spec,
                                         const RetirementPlan& plan,
                                         const std::vector<const MonthlyReturnSeries*>& assets,
                                         const MonthlyReturnSeries* cost = nullptr);

// Same simulation across many start months.  Cohorts are independent, so
// they run on a thread pool (threads = 0 means hardware concurrency);
// results are ordered and reduced by cohort index, making the report
// identical for any thread count.
BacktestReport run_cohorts(const PortfolioSpec& spec, const RetirementPlan& plan_template,
                           const std::vector<MonthIndex>& starts,
                           const std::vector<const MonthlyReturnSeries*>& assets,
                           const MonthlyReturnSeries* cost = nullptr,
                           unsigned threads = 0);

// January of every year in [first_year, last_year], the conventional cohort
// grid.
std::vector<MonthIndex> january_grid(int first_year, int last_year);

// Human-readable report block.
std::string summarize(const BacktestReport& report);

// JSON document with the aggregate statistics and one record per cohort
// (start, terminal, first_breach, breach_count).  Keys are documented in
// the README.
std::string report_json(const BacktestReport& report, bool include_cohorts = true);

// Long-format CSV: cohort_start,month_index,equity_over_w,breached with one
// row per cohort-month, month_index 0..t.
void write_trajectories_csv(const BacktestReport& report, std::ostream& out);

// Small-multiples SVG of every cohort's equity path; the path is drawn
// dashed after its first breach.
void render_trajectories_svg(const BacktestReport& report, const std::string& title,
                             std::ostream& out);

}  // namespace decum
