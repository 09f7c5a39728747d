#pragma once
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "decum/backtest.hpp"
#include "decum/ingest.hpp"
#include "decum/moments.hpp"

namespace decum {

// One reference-table cell checked against its expected band.
struct CellCheck {
    std::string group;   // row, series, or panel name
    std::string metric;
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool pass = false;
};

// Computed values keyed by (group, metric), ready to judge.
using CellValues = std::map<std::pair<std::string, std::string>, double>;

// Reads an expected-band CSV (group,metric,lo,hi) and checks each listed
// cell against the computed values.  A cell the computation did not produce
// fails with a NaN value.
std::vector<CellCheck> judge(const std::filesystem::path& expected_csv,
                             const CellValues& values);
bool all_pass(const std::vector<CellCheck>& checks);

// Per-series moment and depletion-rate summary over each series' full
// window, in the bundled dataset's canonical order.
struct SummaryRow {
    std::string name;
    std::size_t n = 0;
    MomentSummary moments;
    double sigma = 0.0;   // reduced volatility
    double g2 = 0.0;
    double g4 = 0.0;
};
std::vector<SummaryRow> compute_table1(const DataBundle& bundle, double s = 0.003);
CellValues table1_values(const std::vector<SummaryRow>& rows);

// Withdrawal-rate summary for the three canonical portfolios (60/40, all
// equities, all bonds): unlevered, levered at the bill-funded optimum, and
// levered at the optimum for the 1934-onward window.
struct PortfolioRow {
    std::string name;
    double gamma = 0.0, cw = 0.0, awr = 0.0;
    double l_tbill = 0.0, gamma_tbill = 0.0, cw_tbill = 0.0, awr_tbill = 0.0;
    double l_1934 = 0.0, gamma_1934 = 0.0, cw_1934 = 0.0, awr_1934 = 0.0;
};
std::vector<PortfolioRow> compute_table2(const DataBundle& bundle, double s = 0.003);
CellValues table2_values(const std::vector<PortfolioRow>& rows);

// The nine historical-cohort panels: three portfolios, each unlevered over
// 1871-1995 and levered (bill-funded) over 1934-1995 at the two published
// leverage/withdrawal settings.
struct PanelResult {
    std::string name;
    double leverage = 1.0;
    double cw = 0.0;
    BacktestReport report;
};
std::vector<PanelResult> compute_figure1(const DataBundle& bundle, unsigned threads = 0);
CellValues figure1_values(const std::vector<PanelResult>& panels);

}  // namespace decum
