#include "decum/reproduce.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "decum/errors.hpp"
#include "decum/leverage.hpp"
#include "decum/model.hpp"

namespace decum {

std::vector<CellCheck> judge(const std::filesystem::path& expected_csv,
                             const CellValues& values) {
    std::ifstream in(expected_csv);
    if (!in) throw IngestError("cannot open " + expected_csv.string());
    std::string line;
    if (!std::getline(in, line))
        throw IngestError(expected_csv.string() + " is empty");

    auto split = [](const std::string& text) {
        std::vector<std::string> fields;
        std::string cur;
        for (char ch : text) {
            if (ch == ',') {
                fields.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur += ch;
            }
        }
        fields.push_back(cur);
        return fields;
    };

    std::vector<CellCheck> checks;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split(line);
        if (fields.size() != 4) {
            std::ostringstream msg;
            msg << expected_csv.string() << ":" << line_no
                << ": want group,metric,lo,hi";
            throw IngestError(msg.str());
        }
        CellCheck c;
        c.group = fields[0];
        c.metric = fields[1];
        char* end = nullptr;
        c.lo = std::strtod(fields[2].c_str(), &end);
        c.hi = std::strtod(fields[3].c_str(), &end);
        auto it = values.find({c.group, c.metric});
        if (it == values.end()) {
            c.value = std::nan("");
            c.pass = false;
        } else {
            c.value = it->second;
            c.pass = c.value >= c.lo && c.value <= c.hi;
        }
        checks.push_back(std::move(c));
    }
    return checks;
}

bool all_pass(const std::vector<CellCheck>& checks) {
    if (checks.empty()) return false;
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::vector<SummaryRow> compute_table1(const DataBundle& bundle, double s) {
    std::vector<std::pair<std::string, const MonthlyReturnSeries*>> order;
    order.emplace_back("shiller_sp", &bundle.sp);
    order.emplace_back("shiller_gs10", &bundle.gs10);
    for (const auto& [ticker, series] : bundle.etfs) order.emplace_back(ticker, &series);

    std::vector<SummaryRow> rows;
    rows.reserve(order.size());
    for (const auto& [name, series] : order) {
        SummaryRow row;
        row.name = name;
        row.moments = compute_moments(*series);
        row.n = row.moments.n;
        row.sigma = reduced_sigma(row.moments);
        row.g2 = gamma2(row.moments, s).value;
        row.g4 = gamma4(row.moments, s).value;
        rows.push_back(std::move(row));
    }
    return rows;
}

CellValues table1_values(const std::vector<SummaryRow>& rows) {
    CellValues v;
    for (const auto& r : rows) {
        v[{r.name, "n"}] = static_cast<double>(r.n);
        v[{r.name, "mean"}] = r.moments.mean;
        v[{r.name, "variance"}] = r.moments.variance;
        v[{r.name, "skewness"}] = r.moments.skewness.value_or(std::nan(""));
        v[{r.name, "kurtosis"}] = r.moments.kurtosis.value_or(std::nan(""));
        v[{r.name, "sigma"}] = r.sigma;
        v[{r.name, "gamma2_pct"}] = 100.0 * r.g2;
        v[{r.name, "gamma4_pct"}] = 100.0 * r.g4;
    }
    return v;
}

namespace {

struct PortfolioDef {
    std::string name;
    std::vector<double> weights;  // over {sp, gs10}
};

const std::vector<PortfolioDef>& canonical_portfolios() {
    static const std::vector<PortfolioDef> defs = {
        {"6040", {0.6, 0.4}},
        {"equities", {1.0, 0.0}},
        {"bonds", {0.0, 1.0}},
    };
    return defs;
}

}  // namespace

std::vector<PortfolioRow> compute_table2(const DataBundle& bundle, double s) {
    const auto q_series = monthly_cost(bundle.tbill, 0.0);
    const auto mq = compute_moments(q_series.values);
    const LeverageQuote quote{mq.mean, mq.variance, q_series.label};

    const PlanParams plan = PlanParams::finite(360, s);
    const MonthIndex from34{1934, 1};

    std::vector<PortfolioRow> rows;
    for (const auto& def : canonical_portfolios()) {
        const auto full = blend({&bundle.sp, &bundle.gs10}, def.weights, def.name);
        const auto late = restrict(full, from34, std::nullopt);
        const auto m = compute_moments(full);
        const auto m34 = compute_moments(late);

        PortfolioRow row;
        row.name = def.name;
        row.gamma = gamma2(m, s).value;
        row.cw = withdrawal_rate(row.gamma, plan);
        row.awr = annualized_withdrawal_rate(row.cw, s);

        row.l_tbill = optimal_leverage_costly(m, quote);
        row.gamma_tbill = levered_gamma(m, s, row.l_tbill, quote).value;
        row.cw_tbill = withdrawal_rate(row.gamma_tbill, plan);
        row.awr_tbill = annualized_withdrawal_rate(row.cw_tbill, s);

        row.l_1934 = optimal_leverage_costly(m34, quote);
        row.gamma_1934 = levered_gamma(m34, s, row.l_1934, quote).value;
        row.cw_1934 = withdrawal_rate(row.gamma_1934, plan);
        row.awr_1934 = annualized_withdrawal_rate(row.cw_1934, s);

        rows.push_back(std::move(row));
    }
    return rows;
}

CellValues table2_values(const std::vector<PortfolioRow>& rows) {
    CellValues v;
    for (const auto& r : rows) {
        v[{r.name, "gamma_pct"}] = 100.0 * r.gamma;
        v[{r.name, "cw_pct"}] = 100.0 * r.cw;
        v[{r.name, "awr_pct"}] = 100.0 * r.awr;
        v[{r.name, "l_tbill"}] = r.l_tbill;
        v[{r.name, "gamma_tbill_pct"}] = 100.0 * r.gamma_tbill;
        v[{r.name, "cw_tbill_pct"}] = 100.0 * r.cw_tbill;
        v[{r.name, "awr_tbill_pct"}] = 100.0 * r.awr_tbill;
        v[{r.name, "l_1934"}] = r.l_1934;
        v[{r.name, "gamma_1934_pct"}] = 100.0 * r.gamma_1934;
        v[{r.name, "cw_1934_pct"}] = 100.0 * r.cw_1934;
        v[{r.name, "awr_1934_pct"}] = 100.0 * r.awr_1934;
    }
    return v;
}

std::vector<PanelResult> compute_figure1(const DataBundle& bundle, unsigned threads) {
    const auto q_series = monthly_cost(bundle.tbill, 0.0);
    const std::vector<const MonthlyReturnSeries*> assets = {&bundle.sp, &bundle.gs10};

    struct PanelDef {
        std::string name;
        std::size_t portfolio;  // index into canonical_portfolios()
        double l;
        double cw;
        bool levered;
    };
    // Unlevered panels use the published unlevered withdrawal settings over
    // the full cohort range; levered panels use the two published
    // leverage/withdrawal pairs over the funded (1934+) range.
    const std::vector<PanelDef> defs = {
        {"u6040", 0, 1.0, 0.00444, false},
        {"uequities", 1, 1.0, 0.00492, false},
        {"ubonds", 2, 1.0, 0.00312, false},
        {"l6040_tbill", 0, 3.05, 0.00627, true},
        {"lequities_tbill", 1, 1.65, 0.00542, true},
        {"lbonds_tbill", 2, 3.14, 0.00356, true},
        {"l6040_1934", 0, 4.38, 0.00987, true},
        {"lequities_1934", 1, 2.40, 0.00820, true},
        {"lbonds_1934", 2, 2.33, 0.00347, true},
    };

    const auto grid_full = january_grid(1871, 1995);
    const auto grid_late = january_grid(1934, 1995);

    std::vector<PanelResult> panels;
    panels.reserve(defs.size());
    for (const auto& def : defs) {
        PortfolioSpec spec;
        spec.weights = canonical_portfolios()[def.portfolio].weights;
        spec.leverage = def.l;
        RetirementPlan plan;
        plan.initial_withdrawal = def.cw;
        plan.growth = 0.003;
        plan.months = 360;
        PanelResult panel;
        panel.name = def.name;
        panel.leverage = def.l;
        panel.cw = def.cw;
        panel.report = run_cohorts(spec, plan, def.levered ? grid_late : grid_full, assets,
                                   def.levered ? &q_series : nullptr, threads);
        panels.push_back(std::move(panel));
    }
    return panels;
}

CellValues figure1_values(const std::vector<PanelResult>& panels) {
    CellValues v;
    for (const auto& p : panels) {
        v[{p.name, "failure_rate"}] = p.report.failure_rate;
        v[{p.name, "mean_terminal"}] = p.report.mean_terminal;
        v[{p.name, "median_terminal"}] = p.report.median_terminal;
        if (p.report.min_first_breach) {
            v[{p.name, "min_first_breach"}] =
                static_cast<double>(*p.report.min_first_breach);
            v[{p.name, "max_first_breach"}] =
                static_cast<double>(*p.report.max_first_breach);
        }
    }
    return v;
}

}  // namespace decum
