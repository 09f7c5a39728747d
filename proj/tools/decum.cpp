// decum: command-line front end for the decumulation library.
//
// Subcommands:
//   moments    sample moments and depletion rates of return series
//   plan       withdrawal plan from a depletion rate or estimated moments
//   leverage   optimal leverage against a funding quote
//   backtest   historical January-cohort retirement simulations
//   reproduce  recompute the published reference statistics and judge them
//
// Exit codes: 0 success, 2 data or ingestion problems, 3 invalid usage or
// parameters, 4 a reproduce target missed at least one reference band.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "decum/backtest.hpp"
#include "decum/errors.hpp"
#include "decum/ingest.hpp"
#include "decum/leverage.hpp"
#include "decum/model.hpp"
#include "decum/moments.hpp"
#include "decum/month.hpp"
#include "decum/reproduce.hpp"
#include "decum/series.hpp"

namespace {

using decum::DataBundle;
using decum::IngestError;
using decum::MomentSummary;
using decum::MonthlyReturnSeries;
using decum::ValidationError;
using nlohmann::ordered_json;

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

bool given(double v) { return !std::isnan(v); }

struct Global {
    std::string data_dir = "data";
    std::string format = "table";
    std::string bond_method = "par";
    unsigned threads = 0;
};

// The bundle is expensive to load and verify, so commands that can answer
// from their flags alone (plan --gamma, moments --file) never touch it.
class BundleCache {
public:
    explicit BundleCache(const Global& global) : global_(global) {}

    const DataBundle& get() {
        if (!bundle_) {
            auto method = global_.bond_method == "duration" ? decum::BondMethod::ConstantDuration
                                                            : decum::BondMethod::ParRepricing;
            bundle_ = decum::load_bundle(global_.data_dir, method);
        }
        return *bundle_;
    }

private:
    const Global& global_;
    std::optional<DataBundle> bundle_;
};

std::vector<std::pair<std::string, const MonthlyReturnSeries*>> bundle_series(const DataBundle& b) {
    std::vector<std::pair<std::string, const MonthlyReturnSeries*>> out;
    out.emplace_back(b.sp.label, &b.sp);
    out.emplace_back(b.gs10.label, &b.gs10);
    for (const auto& [ticker, series] : b.etfs) out.emplace_back(ticker, &series);
    return out;
}

const MonthlyReturnSeries& find_series(const DataBundle& b, const std::string& name) {
    for (const auto& [label, series] : bundle_series(b))
        if (label == name) return *series;
    std::string known;
    for (const auto& [label, series] : bundle_series(b)) {
        if (!known.empty()) known += ", ";
        known += label;
    }
    throw ValidationError("unknown series '" + name + "' (available: " + known + ")");
}

const std::map<std::string, std::vector<double>>& canned_weights() {
    static const std::map<std::string, std::vector<double>> weights = {
        {"6040", {0.6, 0.4}},
        {"5050", {0.5, 0.5}},
        {"equities", {1.0, 0.0}},
        {"bonds", {0.0, 1.0}},
    };
    return weights;
}

MonthlyReturnSeries blend_portfolio(const DataBundle& b, const std::string& name) {
    auto it = canned_weights().find(name);
    if (it == canned_weights().end())
        throw ValidationError("unknown portfolio '" + name +
                              "' (available: 6040, 5050, equities, bonds)");
    return decum::blend({&b.sp, &b.gs10}, it->second, name);
}

// "FROM:TO" with YYYY-MM bounds, either side optional: "1954-07:",
// ":1992-12", "1871-02:1995-01".
struct WindowBounds {
    std::optional<decum::MonthIndex> from;
    std::optional<decum::MonthIndex> to;
};

WindowBounds parse_window(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ValidationError("window must be FROM:TO with YYYY-MM bounds, either side optional; got '" +
                              text + "'");
    WindowBounds w;
    const std::string from = text.substr(0, colon);
    const std::string to = text.substr(colon + 1);
    if (!from.empty()) w.from = decum::parse_month(from);
    if (!to.empty()) w.to = decum::parse_month(to);
    if (w.from && w.to && *w.to < *w.from)
        throw ValidationError("window runs backwards: " + from + " is after " + to);
    return w;
}

MonthlyReturnSeries apply_window(const MonthlyReturnSeries& s, const std::string& window) {
    if (window.empty()) return s;
    auto w = parse_window(window);
    return decum::restrict(s, w.from, w.to);
}

MonthlyReturnSeries load_returns_file(const std::filesystem::path& path) {
    auto table = decum::load_monthly_csv(path, {"date", "monthly_return"});
    const auto& values = table.column("monthly_return");
    if (values.hasNaN())
        throw IngestError(path.string() + ": empty cells in monthly_return");
    MonthlyReturnSeries s{path.stem().string(), table.months.front(), values};
    decum::validate_returns(s);
    return s;
}

std::string fmt(double v, int precision = 6) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write " + path.string());
    return out;
}

// ---------------------------------------------------------------------------
// Key/value output shared by plan and leverage

struct KvDoc {
    std::vector<std::pair<std::string, ordered_json>> items;
    void add(std::string key, ordered_json value) { items.emplace_back(std::move(key), std::move(value)); }
};

std::string scalar_str(const ordered_json& v, int precision) {
    if (v.is_number_float()) return fmt(v.get<double>(), precision);
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

void emit_kv(const KvDoc& doc, const std::string& format) {
    if (format == "json") {
        ordered_json j = ordered_json::object();
        for (const auto& [key, value] : doc.items) j[key] = value;
        std::cout << j.dump(2) << "\n";
        return;
    }
    if (format == "csv") {
        std::cout << "key,value\n";
        for (const auto& [key, value] : doc.items)
            std::cout << key << "," << scalar_str(value, 12) << "\n";
        return;
    }
    std::size_t width = 0;
    for (const auto& [key, value] : doc.items) width = std::max(width, key.size());
    for (const auto& [key, value] : doc.items)
        std::cout << std::left << std::setw(static_cast<int>(width) + 2) << key
                  << scalar_str(value, 6) << "\n";
}

// ---------------------------------------------------------------------------
// moments

struct MomentsOpts {
    std::vector<std::string> series;
    std::vector<std::string> portfolios;
    std::vector<std::string> files;
    std::string window;
    double s = 0.003;
};

struct MomentRow {
    std::string name;
    MomentSummary m;
    double sigma = 0.0;
    double g2 = 0.0;
    double g4 = 0.0;
};

void emit_moments(const std::vector<MomentRow>& rows, const std::string& format) {
    const char* names[] = {"series",   "n",      "mean",          "variance", "skewness",
                           "kurtosis", "sigma_reduced", "gamma2",   "gamma4"};
    if (format == "json") {
        ordered_json arr = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json row = ordered_json::object();
            row["series"] = r.name;
            row["n"] = r.m.n;
            row["mean"] = r.m.mean;
            row["variance"] = r.m.variance;
            row["skewness"] = r.m.skewness ? ordered_json(*r.m.skewness) : ordered_json(nullptr);
            row["kurtosis"] = r.m.kurtosis ? ordered_json(*r.m.kurtosis) : ordered_json(nullptr);
            row["sigma_reduced"] = r.sigma;
            row["gamma2"] = r.g2;
            row["gamma4"] = r.g4;
            arr.push_back(std::move(row));
        }
        std::cout << arr.dump(2) << "\n";
        return;
    }
    if (format == "csv") {
        std::cout << "series,n,mean,variance,skewness,kurtosis,sigma_reduced,gamma2,gamma4\n";
        for (const auto& r : rows) {
            std::cout << r.name << "," << r.m.n << "," << fmt(r.m.mean, 12) << ","
                      << fmt(r.m.variance, 12) << ","
                      << (r.m.skewness ? fmt(*r.m.skewness, 12) : "") << ","
                      << (r.m.kurtosis ? fmt(*r.m.kurtosis, 12) : "") << "," << fmt(r.sigma, 12)
                      << "," << fmt(r.g2, 12) << "," << fmt(r.g4, 12) << "\n";
        }
        return;
    }
    std::size_t name_w = 6;
    for (const auto& r : rows) name_w = std::max(name_w, r.name.size());
    std::cout << std::left << std::setw(static_cast<int>(name_w) + 2) << names[0] << std::right;
    for (int c = 1; c < 9; ++c) std::cout << std::setw(14) << names[c];
    std::cout << "\n";
    for (const auto& r : rows) {
        std::cout << std::left << std::setw(static_cast<int>(name_w) + 2) << r.name << std::right
                  << std::setw(14) << r.m.n << std::setw(14) << fmt(r.m.mean)
                  << std::setw(14) << fmt(r.m.variance) << std::setw(14)
                  << (r.m.skewness ? fmt(*r.m.skewness) : "-") << std::setw(14)
                  << (r.m.kurtosis ? fmt(*r.m.kurtosis) : "-") << std::setw(14) << fmt(r.sigma)
                  << std::setw(14) << fmt(r.g2) << std::setw(14) << fmt(r.g4) << "\n";
    }
}

int run_moments(const Global& global, BundleCache& cache, const MomentsOpts& o) {
    std::vector<std::pair<std::string, MonthlyReturnSeries>> picked;
    if (o.series.empty() && o.portfolios.empty() && o.files.empty()) {
        for (const auto& [label, series] : bundle_series(cache.get()))
            picked.emplace_back(label, *series);
    }
    for (const auto& name : o.series) picked.emplace_back(name, find_series(cache.get(), name));
    for (const auto& name : o.portfolios) picked.emplace_back(name, blend_portfolio(cache.get(), name));
    for (const auto& file : o.files) {
        auto s = load_returns_file(file);
        picked.emplace_back(s.label, std::move(s));
    }

    std::vector<MomentRow> rows;
    rows.reserve(picked.size());
    for (const auto& [label, series] : picked) {
        auto windowed = apply_window(series, o.window);
        auto m = decum::compute_moments(windowed);
        MomentRow row;
        row.name = label;
        row.m = m;
        row.sigma = decum::reduced_sigma(m);
        row.g2 = decum::gamma2(m, o.s).value;
        // With zero variance the fourth-order rate collapses to the
        // second-order one, so the column stays printable.
        row.g4 = m.skewness ? decum::gamma4(m, o.s).value : row.g2;
        rows.push_back(std::move(row));
    }
    emit_moments(rows, global.format);
    return 0;
}

// ---------------------------------------------------------------------------
// plan

struct PlanOpts {
    double gamma = kUnset;
    double mean = kUnset;
    double variance = kUnset;
    double skew = kUnset;
    double kurt = kUnset;
    std::string series;
    std::string portfolio;
    std::string window;
    int order = 0;  // 0 means highest available
    double s = 0.003;
    long t = 360;
    bool perpetual = false;
};

int run_plan(const Global& global, BundleCache& cache, const PlanOpts& o) {
    const int sources = (given(o.gamma) ? 1 : 0) + ((given(o.mean) || given(o.variance)) ? 1 : 0) +
                        (o.series.empty() ? 0 : 1) + (o.portfolio.empty() ? 0 : 1);
    if (sources != 1)
        throw ValidationError(
            "pick exactly one rate source: --gamma, --mean/--variance, --series, or --portfolio");

    const auto plan = o.perpetual ? decum::PlanParams::perpetual(o.s)
                                  : decum::PlanParams::finite(o.t, o.s);

    KvDoc doc;
    double gamma = 0.0;
    std::optional<MomentSummary> m;
    int order_used = 0;

    if (given(o.gamma)) {
        gamma = o.gamma;
        doc.add("gamma", gamma);
    } else {
        if (!o.series.empty()) {
            auto s = apply_window(find_series(cache.get(), o.series), o.window);
            m = decum::compute_moments(s);
            doc.add("source", s.label);
        } else if (!o.portfolio.empty()) {
            auto s = apply_window(blend_portfolio(cache.get(), o.portfolio), o.window);
            m = decum::compute_moments(s);
            doc.add("source", s.label);
        } else {
            if (!given(o.mean) || !given(o.variance))
                throw ValidationError("--mean and --variance go together");
            if (given(o.skew) != given(o.kurt))
                throw ValidationError("--skew and --kurt go together");
            MomentSummary direct;
            direct.mean = o.mean;
            direct.variance = o.variance;
            if (given(o.skew)) {
                direct.skewness = o.skew;
                direct.kurtosis = o.kurt;
            }
            m = direct;
        }

        const bool have4 = m->skewness && m->kurtosis;
        int order = o.order != 0 ? o.order : (have4 ? 4 : 2);
        if (order == 4 && !have4) {
            if (m->variance == 0.0)
                order = 2;  // the refinement is exact there
            else
                throw ValidationError(
                    "fourth-order rate needs skewness and kurtosis; this input has neither");
        }
        order_used = order;

        if (m->n > 0) doc.add("n", m->n);
        doc.add("mean", m->mean);
        doc.add("variance", m->variance);
        if (m->skewness) doc.add("skewness", *m->skewness);
        if (m->kurtosis) doc.add("kurtosis", *m->kurtosis);
        doc.add("order", order_used);

        gamma = (order_used == 4 ? decum::gamma4(*m, o.s) : decum::gamma2(*m, o.s)).value;
        doc.add("gamma", gamma);
    }

    doc.add("s", o.s);
    if (plan.horizon_months)
        doc.add("horizon_months", *plan.horizon_months);
    else
        doc.add("horizon", "perpetual");

    const double cw = decum::withdrawal_rate(gamma, plan);
    doc.add("withdrawal_rate", cw);
    doc.add("annual_withdrawal_rate", decum::annualized_withdrawal_rate(cw, o.s));
    doc.add("expected_w_over_c", decum::expected_w_over_c(gamma, plan));
    if (plan.horizon_months)
        doc.add("longevity_haircut", decum::longevity_haircut(gamma, *plan.horizon_months));

    // Benchmark without the cost-of-living ramp: what the same moments
    // sustain when every withdrawal stays at the initial level.
    if (m) {
        const auto level =
            order_used == 4 ? decum::gamma4(*m, 0.0) : decum::gamma2(*m, 0.0);
        doc.add("gamma_level_spending", level.value);
        doc.add("withdrawal_rate_level_spending", decum::withdrawal_rate(level, plan));
    }

    emit_kv(doc, global.format);
    return 0;
}

// ---------------------------------------------------------------------------
// leverage

struct LeverageOpts {
    std::string portfolio;
    std::string series;
    double mean = kUnset;
    double variance = kUnset;
    std::string cost = "tbill";
    double spread_bp = 0.0;
    std::string window;
    double s = 0.003;
    long t = 360;
};

int run_leverage(const Global& global, BundleCache& cache, const LeverageOpts& o) {
    const int sources = (o.portfolio.empty() ? 0 : 1) + (o.series.empty() ? 0 : 1) +
                        ((given(o.mean) || given(o.variance)) ? 1 : 0);
    if (sources != 1)
        throw ValidationError(
            "pick exactly one return source: --portfolio, --series, or --mean/--variance");

    KvDoc doc;
    MomentSummary m;
    if (!o.portfolio.empty()) {
        auto s = apply_window(blend_portfolio(cache.get(), o.portfolio), o.window);
        m = decum::compute_moments(s);
        doc.add("source", s.label);
    } else if (!o.series.empty()) {
        auto s = apply_window(find_series(cache.get(), o.series), o.window);
        m = decum::compute_moments(s);
        doc.add("source", s.label);
    } else {
        if (!given(o.mean) || !given(o.variance))
            throw ValidationError("--mean and --variance go together");
        m.mean = o.mean;
        m.variance = o.variance;
    }
    if (m.n > 0) doc.add("n", m.n);
    doc.add("mean", m.mean);
    doc.add("variance", m.variance);

    decum::LeverageQuote quote;
    double l = 0.0;
    if (o.cost == "none") {
        quote.source = "none";
        l = decum::optimal_leverage_free(m);
    } else {
        const auto& b = cache.get();
        const auto& rate = o.cost == "tbill" ? b.tbill : b.effr;
        auto q_series = decum::monthly_cost(rate, o.spread_bp);
        auto qm = decum::compute_moments(q_series);
        quote = {qm.mean, qm.variance, q_series.label};
        l = decum::optimal_leverage_costly(m, quote);
    }
    doc.add("cost_source", quote.source);
    doc.add("cost_mean", quote.mean_cost);
    doc.add("cost_variance", quote.var_cost);

    const auto g = decum::levered_gamma(m, o.s, l, quote);
    const auto plan = decum::PlanParams::finite(o.t, o.s);
    const double cw = decum::withdrawal_rate(g, plan);
    doc.add("l_opt", l);
    doc.add("gamma_at_l", g.value);
    doc.add("withdrawal_rate", cw);
    doc.add("annual_withdrawal_rate", decum::annualized_withdrawal_rate(cw, o.s));

    emit_kv(doc, global.format);
    return 0;
}

// ---------------------------------------------------------------------------
// backtest

struct BacktestOpts {
    std::string portfolio = "6040";
    std::vector<double> weights;
    double cw = 0.0;
    double l = 1.0;
    std::string cost;  // empty means: none when l == 1, tbill otherwise
    double spread_bp = 0.0;
    std::string grid;
    std::string debt_mode = "fixed";
    double s = 0.003;
    long t = 360;
    std::string trajectories_path;
    std::string svg_path;
};

std::pair<int, int> parse_year_grid(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ValidationError("grid must be FIRST:LAST years, e.g. 1871:1995; got '" + text + "'");
    try {
        int first = std::stoi(text.substr(0, colon));
        int last = std::stoi(text.substr(colon + 1));
        return {first, last};
    } catch (const std::exception&) {
        throw ValidationError("grid years must be integers; got '" + text + "'");
    }
}

int run_backtest(const Global& global, BundleCache& cache, const BacktestOpts& o) {
    const auto& b = cache.get();

    std::vector<double> weights;
    std::string label;
    if (!o.weights.empty()) {
        weights = o.weights;
        label = "custom";
    } else {
        auto it = canned_weights().find(o.portfolio);
        if (it == canned_weights().end())
            throw ValidationError("unknown portfolio '" + o.portfolio +
                                  "' (available: 6040, 5050, equities, bonds)");
        weights = it->second;
        label = o.portfolio;
    }

    decum::PortfolioSpec spec;
    spec.weights = weights;
    spec.leverage = o.l;
    spec.debt_mode = o.debt_mode == "constant" ? decum::DebtMode::ConstantLeverage
                                               : decum::DebtMode::FixedInitialDebt;

    const std::string cost_name = !o.cost.empty() ? o.cost : (o.l == 1.0 ? "none" : "tbill");
    std::optional<MonthlyReturnSeries> cost;
    if (cost_name != "none")
        cost = decum::monthly_cost(cost_name == "tbill" ? b.tbill : b.effr, o.spread_bp);

    int first_year = o.l == 1.0 ? 1871 : 1934;
    int last_year = 1995;
    if (!o.grid.empty()) std::tie(first_year, last_year) = parse_year_grid(o.grid);
    const auto starts = decum::january_grid(first_year, last_year);

    decum::RetirementPlan plan;
    plan.initial_withdrawal = o.cw;
    plan.growth = o.s;
    plan.months = o.t;
    plan.start = starts.front();

    const auto report = decum::run_cohorts(spec, plan, starts, {&b.sp, &b.gs10},
                                           cost ? &*cost : nullptr, global.threads);

    if (!o.trajectories_path.empty()) {
        auto out = open_output(o.trajectories_path);
        decum::write_trajectories_csv(report, out);
    }
    if (!o.svg_path.empty()) {
        auto out = open_output(o.svg_path);
        const std::string title =
            label + "  l=" + fmt(o.l) + "  c/W=" + fmt(o.cw) + "  " + cost_name;
        decum::render_trajectories_svg(report, title, out);
    }

    if (global.format == "json") {
        std::cout << decum::report_json(report) << "\n";
    } else if (global.format == "csv") {
        std::cout << "cohort_start,terminal,first_breach,breach_count\n";
        for (const auto& t : report.trajectories) {
            std::cout << t.start.str() << "," << fmt(t.terminal, 12) << ",";
            if (t.first_breach) std::cout << *t.first_breach;
            std::cout << "," << t.breach_months.size() << "\n";
        }
    } else {
        std::cout << decum::summarize(report);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// reproduce

struct ReproduceOpts {
    std::string target;
    std::string out_dir = ".";
};

void print_checks(const std::vector<decum::CellCheck>& checks) {
    std::size_t group_w = 5, metric_w = 6;
    for (const auto& c : checks) {
        group_w = std::max(group_w, c.group.size());
        metric_w = std::max(metric_w, c.metric.size());
    }
    std::cout << std::left << std::setw(static_cast<int>(group_w) + 2) << "group"
              << std::setw(static_cast<int>(metric_w) + 2) << "metric" << std::right
              << std::setw(14) << "value" << std::setw(14) << "lo" << std::setw(14) << "hi"
              << "  status\n";
    std::size_t passed = 0;
    for (const auto& c : checks) {
        std::cout << std::left << std::setw(static_cast<int>(group_w) + 2) << c.group
                  << std::setw(static_cast<int>(metric_w) + 2) << c.metric << std::right
                  << std::setw(14) << fmt(c.value) << std::setw(14) << fmt(c.lo) << std::setw(14)
                  << fmt(c.hi) << "  " << (c.pass ? "ok" : "FAIL") << "\n";
        if (c.pass) ++passed;
    }
    std::cout << passed << " of " << checks.size() << " cells inside their bands\n";
}

void write_table1_csv(const std::filesystem::path& path, const std::vector<decum::SummaryRow>& rows) {
    auto out = open_output(path);
    out << "series,n,mean,variance,skewness,kurtosis,sigma_reduced,gamma2,gamma4\n";
    for (const auto& r : rows) {
        out << r.name << "," << r.n << "," << fmt(r.moments.mean, 12) << ","
            << fmt(r.moments.variance, 12) << ","
            << (r.moments.skewness ? fmt(*r.moments.skewness, 12) : "") << ","
            << (r.moments.kurtosis ? fmt(*r.moments.kurtosis, 12) : "") << "," << fmt(r.sigma, 12)
            << "," << fmt(r.g2, 12) << "," << fmt(r.g4, 12) << "\n";
    }
}

void write_table2_csv(const std::filesystem::path& path, const std::vector<decum::PortfolioRow>& rows) {
    auto out = open_output(path);
    out << "portfolio,gamma,cw,awr,l_tbill,gamma_tbill,cw_tbill,awr_tbill,"
           "l_1934,gamma_1934,cw_1934,awr_1934\n";
    for (const auto& r : rows) {
        out << r.name << "," << fmt(r.gamma, 12) << "," << fmt(r.cw, 12) << "," << fmt(r.awr, 12)
            << "," << fmt(r.l_tbill, 12) << "," << fmt(r.gamma_tbill, 12) << ","
            << fmt(r.cw_tbill, 12) << "," << fmt(r.awr_tbill, 12) << "," << fmt(r.l_1934, 12)
            << "," << fmt(r.gamma_1934, 12) << "," << fmt(r.cw_1934, 12) << ","
            << fmt(r.awr_1934, 12) << "\n";
    }
}

void write_figure1_stats(const std::filesystem::path& path,
                         const std::vector<decum::PanelResult>& panels) {
    ordered_json doc;
    doc["panels"] = ordered_json::array();
    for (const auto& p : panels) {
        ordered_json panel = ordered_json::object();
        panel["name"] = p.name;
        panel["leverage"] = p.leverage;
        panel["cw"] = p.cw;
        panel["cohort_count"] = p.report.cohort_count;
        panel["failure_rate"] = p.report.failure_rate;
        panel["mean_terminal"] = p.report.mean_terminal;
        panel["median_terminal"] = p.report.median_terminal;
        panel["first_breach_min"] = p.report.min_first_breach
                                        ? ordered_json(*p.report.min_first_breach)
                                        : ordered_json(nullptr);
        panel["first_breach_max"] = p.report.max_first_breach
                                        ? ordered_json(*p.report.max_first_breach)
                                        : ordered_json(nullptr);
        doc["panels"].push_back(std::move(panel));
    }
    auto out = open_output(path);
    out << doc.dump(2) << "\n";
}

int run_reproduce(const Global& global, BundleCache& cache, const ReproduceOpts& o) {
    const auto& b = cache.get();
    const std::filesystem::path out_dir(o.out_dir);
    std::filesystem::create_directories(out_dir);
    const auto expected = std::filesystem::path(global.data_dir) / "expected" / (o.target + ".csv");

    std::vector<decum::CellCheck> checks;
    if (o.target == "table1") {
        const auto rows = decum::compute_table1(b);
        write_table1_csv(out_dir / "table1.csv", rows);
        checks = decum::judge(expected, decum::table1_values(rows));
    } else if (o.target == "table2") {
        const auto rows = decum::compute_table2(b);
        write_table2_csv(out_dir / "table2.csv", rows);
        checks = decum::judge(expected, decum::table2_values(rows));
    } else {
        const auto panels = decum::compute_figure1(b, global.threads);
        for (const auto& p : panels) {
            auto out = open_output(out_dir / ("figure1_" + p.name + ".csv"));
            decum::write_trajectories_csv(p.report, out);
        }
        write_figure1_stats(out_dir / "figure1_stats.json", panels);
        checks = decum::judge(expected, decum::figure1_values(panels));
    }

    print_checks(checks);
    return decum::all_pass(checks) ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"closed-form retirement decumulation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // lets the global flags appear after the subcommand

    Global global;
    app.add_option("--data-dir", global.data_dir, "bundled dataset directory")
        ->envname("DECUM_DATA_DIR")
        ->capture_default_str();
    app.add_option("--format", global.format, "output format")
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->capture_default_str();
    app.add_option("--bond-method", global.bond_method, "bond return construction")
        ->check(CLI::IsMember({"par", "duration"}))
        ->capture_default_str();
    app.add_option("--threads", global.threads, "worker threads, 0 means all cores")
        ->capture_default_str();
    app.set_config("--config", "", "INI config file; command-line flags win");

    MomentsOpts mo;
    auto* moments = app.add_subcommand("moments", "sample moments and depletion rates");
    moments->add_option("--series", mo.series, "bundle series labels, comma separated")
        ->delimiter(',');
    moments->add_option("--portfolio", mo.portfolios, "canned blends: 6040, 5050, equities, bonds")
        ->delimiter(',');
    moments->add_option("--file", mo.files, "extra CSV of date,monthly_return (repeatable)");
    moments->add_option("--window", mo.window, "restrict to FROM:TO, bounds YYYY-MM, either optional");
    moments->add_option("--s", mo.s, "monthly withdrawal growth")->capture_default_str();

    PlanOpts po;
    auto* plan = app.add_subcommand("plan", "withdrawal plan for a horizon");
    plan->add_option("--gamma", po.gamma, "depletion rate, given directly");
    plan->add_option("--mean", po.mean, "monthly mean return");
    plan->add_option("--variance", po.variance, "monthly return variance");
    plan->add_option("--skew", po.skew, "standardized skewness");
    plan->add_option("--kurt", po.kurt, "standardized kurtosis, 3 is normal");
    plan->add_option("--series", po.series, "bundle series label");
    plan->add_option("--portfolio", po.portfolio, "canned blend name");
    plan->add_option("--window", po.window, "restrict to FROM:TO");
    plan->add_option("--order", po.order, "approximation order, default highest available")
        ->check(CLI::IsMember({2, 4}));
    plan->add_option("--s", po.s, "monthly withdrawal growth")->capture_default_str();
    auto* horizon = plan->add_option("--t", po.t, "horizon in months")->capture_default_str();
    plan->add_flag("--perpetual", po.perpetual, "perpetual plan instead of a finite horizon")
        ->excludes(horizon);

    LeverageOpts lo;
    auto* leverage = app.add_subcommand("leverage", "optimal leverage against a funding quote");
    leverage->add_option("--portfolio", lo.portfolio, "canned blend name");
    leverage->add_option("--series", lo.series, "bundle series label");
    leverage->add_option("--mean", lo.mean, "monthly mean return");
    leverage->add_option("--variance", lo.variance, "monthly return variance");
    leverage->add_option("--cost", lo.cost, "funding quote source")
        ->check(CLI::IsMember({"none", "tbill", "effr"}))
        ->capture_default_str();
    leverage->add_option("--spread-bp", lo.spread_bp, "spread over the quote, basis points")
        ->capture_default_str();
    leverage->add_option("--window", lo.window, "restrict the return series to FROM:TO");
    leverage->add_option("--s", lo.s, "monthly withdrawal growth")->capture_default_str();
    leverage->add_option("--t", lo.t, "horizon in months")->capture_default_str();

    BacktestOpts bo;
    auto* backtest = app.add_subcommand("backtest", "historical January-cohort simulations");
    backtest->add_option("--portfolio", bo.portfolio, "canned blend name")->capture_default_str();
    backtest->add_option("--weights", bo.weights, "custom weights over equities,bonds")
        ->delimiter(',');
    backtest->add_option("--cw", bo.cw, "initial monthly withdrawal per unit wealth")->required();
    backtest->add_option("--l", bo.l, "leverage multiple")->capture_default_str();
    backtest->add_option("--cost", bo.cost, "funding quote: none, tbill, effr")
        ->check(CLI::IsMember({"none", "tbill", "effr"}));
    backtest->add_option("--spread-bp", bo.spread_bp, "spread over the quote, basis points")
        ->capture_default_str();
    backtest->add_option("--grid", bo.grid, "cohort years FIRST:LAST, default 1871:1995 unlevered, 1934:1995 levered");
    backtest->add_option("--debt-mode", bo.debt_mode, "fixed initial debt or constant releverage")
        ->check(CLI::IsMember({"fixed", "constant"}))
        ->capture_default_str();
    backtest->add_option("--s", bo.s, "monthly withdrawal growth")->capture_default_str();
    backtest->add_option("--t", bo.t, "horizon in months")->capture_default_str();
    backtest->add_option("--trajectories", bo.trajectories_path, "write per-month equity paths CSV here");
    backtest->add_option("--svg", bo.svg_path, "render cohort small multiples SVG here");

    ReproduceOpts ro;
    auto* reproduce = app.add_subcommand("reproduce", "recompute published statistics and judge them");
    reproduce->add_option("target", ro.target, "table1, table2, or figure1")
        ->required()
        ->check(CLI::IsMember({"table1", "table2", "figure1"}));
    reproduce->add_option("--out-dir", ro.out_dir, "where computed artifacts are written")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        BundleCache cache(global);
        if (moments->parsed()) return run_moments(global, cache, mo);
        if (plan->parsed()) return run_plan(global, cache, po);
        if (leverage->parsed()) return run_leverage(global, cache, lo);
        if (backtest->parsed()) return run_backtest(global, cache, bo);
        if (reproduce->parsed()) return run_reproduce(global, cache, ro);
    } catch (const IngestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
