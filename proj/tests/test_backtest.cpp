#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <sstream>

#include "decum/backtest.hpp"
#include "decum/errors.hpp"
#include "decum/ingest.hpp"
#include "decum/model.hpp"
#include "decum/moments.hpp"

using namespace decum;

namespace {

MonthlyReturnSeries constant_series(double r, MonthIndex start, long n,
                                    const std::string& label = "flat") {
    MonthlyReturnSeries s;
    s.label = label;
    s.start = start;
    s.values = Eigen::ArrayXd::Constant(n, r);
    return s;
}

const DataBundle& bundle() {
    static DataBundle b = load_bundle(DECUM_DATA_DIR);
    return b;
}

const MonthlyReturnSeries& blend6040() {
    static MonthlyReturnSeries s = blend({&bundle().sp, &bundle().gs10}, {0.6, 0.4});
    return s;
}

const MonthlyReturnSeries& tbill_cost() {
    static MonthlyReturnSeries s = monthly_cost(bundle().tbill);
    return s;
}

RetirementPlan plan_starting(MonthIndex start, double c, double s = 0.003,
                             long months = 360) {
    RetirementPlan p;
    p.initial_withdrawal = c;
    p.growth = s;
    p.months = months;
    p.start = start;
    return p;
}

}  // namespace

TEST_CASE("zero returns pay out an exact annuity") {
    // 1/512 is a dyadic withdrawal, so every ledger value is an exact
    // multiple of 1/512 and the arithmetic has no rounding at all
    auto flat = constant_series(0.0, MonthIndex{1950, 2}, 360);
    PortfolioSpec spec{{1.0}};
    auto plan = plan_starting(MonthIndex{1950, 1}, 1.0 / 512.0, 0.0);
    auto tr = simulate_retirement(spec, plan, {&flat});

    CHECK(tr.equity_path[0] == 1.0);
    CHECK(tr.equity_path[256] == 0.5);
    CHECK(tr.terminal == 1.0 - 360.0 / 512.0);  // 0.296875, bitwise
    CHECK(tr.breach_months.empty());
    CHECK(!tr.first_breach);

    // spending 1/256 drains the unit of wealth in exactly 256 months
    plan.initial_withdrawal = 1.0 / 256.0;
    auto drained = simulate_retirement(spec, plan, {&flat});
    REQUIRE(drained.first_breach.has_value());
    CHECK(*drained.first_breach == 256);
    CHECK(drained.breach_months.size() == 360 - 256 + 1);
    CHECK(drained.breach_months.front() == 256);
    CHECK(drained.terminal == -(104.0 / 256.0));
    CHECK(drained.equity_path[256] == 0.0);
}

TEST_CASE("withdrawal growth compounds into the spending ledger") {
    auto flat = constant_series(0.0, MonthIndex{1950, 2}, 360);
    PortfolioSpec spec{{1.0}};
    const double c = 0.0015, s = 0.003;
    auto plan = plan_starting(MonthIndex{1950, 1}, c, s);
    auto tr = simulate_retirement(spec, plan, {&flat});

    double ramp = 0.0;
    for (int i = 0; i < 360; ++i) ramp += std::pow(1.0 + s, static_cast<double>(i));
    CHECK(tr.terminal == doctest::Approx(1.0 - c * ramp).epsilon(1e-12));
    CHECK(tr.breach_months.empty());
}

TEST_CASE("constant returns deplete exactly at the planned horizon") {
    // with zero variance the depletion rate is exact, so funding the plan at
    // the model's withdrawal rate should land terminal equity on zero
    const double mu = 0.005, s = 0.003;
    MomentSummary m;
    m.mean = mu;
    m.variance = 0.0;
    m.n = 360;
    const auto g = gamma2(m, s);
    const double c = withdrawal_rate(g, PlanParams::finite(360, s));

    auto flat = constant_series(mu, MonthIndex{1950, 2}, 360);
    PortfolioSpec spec{{1.0}};
    auto tr = simulate_retirement(spec, plan_starting(MonthIndex{1950, 1}, c, s), {&flat});
    CHECK(std::abs(tr.terminal) < 1e-9);
    if (tr.first_breach) CHECK(*tr.first_breach == 360);

    // one basis point more spending must breach before the horizon,
    // one less must end clearly positive
    auto rich = simulate_retirement(spec,
                                    plan_starting(MonthIndex{1950, 1}, c + 1e-4, s), {&flat});
    REQUIRE(rich.first_breach.has_value());
    CHECK(*rich.first_breach < 360);
    auto lean = simulate_retirement(spec,
                                    plan_starting(MonthIndex{1950, 1}, c - 1e-4, s), {&flat});
    CHECK(!lean.first_breach);
    CHECK(lean.terminal > 1e-3);
}

TEST_CASE("terminal equity falls as spending rises") {
    PortfolioSpec spec{{1.0}};
    double prev = std::numeric_limits<double>::infinity();
    std::optional<long> prev_breach;
    for (double c : {0.003, 0.004, 0.005, 0.006}) {
        auto tr = simulate_retirement(spec, plan_starting(MonthIndex{1966, 1}, c),
                                      {&blend6040()});
        CHECK(tr.terminal < prev);
        if (prev_breach) {
            REQUIRE(tr.first_breach.has_value());
            CHECK(*tr.first_breach <= *prev_breach);
        }
        prev = tr.terminal;
        if (tr.first_breach) prev_breach = tr.first_breach;
    }
}

TEST_CASE("unit leverage ignores funding and debt mode entirely") {
    auto plan = plan_starting(MonthIndex{1950, 1}, 0.004);
    PortfolioSpec bare{{1.0}};
    auto base = simulate_retirement(bare, plan, {&blend6040()});

    PortfolioSpec funded{{1.0}};
    funded.leverage = 1.0;
    auto with_cost = simulate_retirement(funded, plan, {&blend6040()}, &tbill_cost());

    PortfolioSpec releveraged{{1.0}, 1.0, DebtMode::ConstantLeverage};
    auto other_mode = simulate_retirement(releveraged, plan, {&blend6040()}, &tbill_cost());

    REQUIRE(base.equity_path.size() == with_cost.equity_path.size());
    for (Eigen::Index i = 0; i < base.equity_path.size(); ++i) {
        CHECK(base.equity_path[i] == with_cost.equity_path[i]);
        CHECK(base.equity_path[i] == other_mode.equity_path[i]);
    }
    CHECK(base.terminal == with_cost.terminal);
    CHECK(base.terminal == other_mode.terminal);
}

TEST_CASE("constant-leverage mode equals simulating the levered series") {
    auto plan = plan_starting(MonthIndex{1950, 1}, 0.004);
    PortfolioSpec spec{{1.0}, 2.0, DebtMode::ConstantLeverage};
    auto direct = simulate_retirement(spec, plan, {&blend6040()}, &tbill_cost());

    auto levered = lever(blend6040(), 2.0, &tbill_cost());
    PortfolioSpec bare{{1.0}};
    auto via_series = simulate_retirement(bare, plan, {&levered});

    CHECK(direct.terminal == doctest::Approx(via_series.terminal).epsilon(1e-12));
    for (Eigen::Index i = 0; i < direct.equity_path.size(); ++i)
        CHECK(direct.equity_path[i] ==
              doctest::Approx(via_series.equity_path[i]).epsilon(1e-11));
}

TEST_CASE("debt modes converge as leverage approaches 1") {
    // the two ledgers drift apart in proportion to (l - 1); each tenfold cut
    // in the excess shrinks the terminal gap about tenfold
    auto plan = plan_starting(MonthIndex{1950, 1}, 0.004);
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double excess : {0.01, 0.001, 0.0001}) {
        PortfolioSpec fixed{{1.0}, 1.0 + excess, DebtMode::FixedInitialDebt};
        PortfolioSpec constant{{1.0}, 1.0 + excess, DebtMode::ConstantLeverage};
        const double tf =
            simulate_retirement(fixed, plan, {&blend6040()}, &tbill_cost()).terminal;
        const double tc =
            simulate_retirement(constant, plan, {&blend6040()}, &tbill_cost()).terminal;
        const double gap = std::abs(tf - tc);
        CHECK(gap < 0.2 * prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 5e-4);
}

TEST_CASE("the 1966 cohort is the canonical failure") {
    auto tr = simulate_retirement(PortfolioSpec{{0.6, 0.4}},
                                  plan_starting(MonthIndex{1966, 1}, 0.00444),
                                  {&bundle().sp, &bundle().gs10});
    REQUIRE(tr.first_breach.has_value());
    CHECK(*tr.first_breach == 311);
    CHECK(tr.terminal == doctest::Approx(-0.7936390076752862).epsilon(1e-12));
}

TEST_CASE("cohort grid statistics for the unlevered 60/40 retiree") {
    const auto starts = january_grid(1871, 1995);
    REQUIRE(starts.size() == 125);
    CHECK(starts.front() == MonthIndex{1871, 1});
    CHECK(starts.back() == MonthIndex{1995, 1});

    auto report = run_cohorts(PortfolioSpec{{0.6, 0.4}},
                              plan_starting(MonthIndex{}, 0.00444), starts,
                              {&bundle().sp, &bundle().gs10});
    CHECK(report.cohort_count == 125);
    CHECK(report.failure_rate == 62.0 / 125.0);
    CHECK(report.mean_terminal == doctest::Approx(0.8897068118337783).epsilon(1e-9));
    CHECK(report.median_terminal == doctest::Approx(0.0014151861860785349).epsilon(1e-9));
    REQUIRE(report.min_first_breach.has_value());
    CHECK(*report.min_first_breach == 166);
    CHECK(*report.max_first_breach == 358);
}

TEST_CASE("levered bond cohorts reproduce the known failure cluster") {
    PortfolioSpec spec{{0.0, 1.0}, 3.14, DebtMode::FixedInitialDebt};
    auto report = run_cohorts(spec, plan_starting(MonthIndex{}, 0.00356),
                              january_grid(1934, 1995), {&bundle().sp, &bundle().gs10},
                              &tbill_cost());
    CHECK(report.cohort_count == 62);
    CHECK(report.failure_rate == doctest::Approx(3.0 / 62.0).epsilon(1e-15));
    REQUIRE(report.min_first_breach.has_value());
    CHECK(*report.min_first_breach == 303);
    CHECK(*report.max_first_breach == 359);

    // the failing vintages are 1951, 1954 and 1955
    std::vector<int> failing_years;
    for (const auto& tr : report.trajectories)
        if (tr.first_breach) failing_years.push_back(tr.start.year);
    CHECK(failing_years == std::vector<int>{1951, 1954, 1955});
}

TEST_CASE("cohort runs are identical for any thread count") {
    PortfolioSpec spec{{0.6, 0.4}, 3.05, DebtMode::FixedInitialDebt};
    auto plan = plan_starting(MonthIndex{}, 0.00627);
    const auto starts = january_grid(1934, 1995);
    const std::vector<const MonthlyReturnSeries*> assets{&bundle().sp, &bundle().gs10};

    auto one = run_cohorts(spec, plan, starts, assets, &tbill_cost(), 1);
    auto four = run_cohorts(spec, plan, starts, assets, &tbill_cost(), 4);
    auto three = run_cohorts(spec, plan, starts, assets, &tbill_cost(), 3);

    CHECK(one.failure_rate == four.failure_rate);
    CHECK(one.mean_terminal == four.mean_terminal);
    CHECK(one.median_terminal == four.median_terminal);
    CHECK(one.mean_terminal == three.mean_terminal);
    REQUIRE(one.trajectories.size() == four.trajectories.size());
    for (std::size_t i = 0; i < one.trajectories.size(); ++i)
        CHECK(one.trajectories[i].terminal == four.trajectories[i].terminal);
}

TEST_CASE("trajectory csv round-trips every sample") {
    auto report = run_cohorts(PortfolioSpec{{1.0}},
                              plan_starting(MonthIndex{}, 0.01, 0.003, 24),
                              january_grid(1960, 1961), {&blend6040()});
    std::ostringstream out;
    write_trajectories_csv(report, out);

    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "cohort_start,month_index,equity_over_w,breached");

    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto c1 = line.find(','), c2 = line.find(',', c1 + 1),
                   c3 = line.find(',', c2 + 1);
        REQUIRE(c3 != std::string::npos);
        const std::string start = line.substr(0, c1);
        const long month = std::stol(line.substr(c1 + 1, c2 - c1 - 1));
        const double equity = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
        const int breached = std::stoi(line.substr(c3 + 1));

        const auto& tr = report.trajectories[rows / 25];
        CHECK(start == tr.start.str());
        CHECK(month == static_cast<long>(rows % 25));
        CHECK(equity == tr.equity_path[month]);  // 17 digits round-trip exactly
        CHECK(breached == (month > 0 && equity <= 0.0 ? 1 : 0));
        ++rows;
    }
    CHECK(rows == 2 * 25);
}

TEST_CASE("report json carries the aggregate and per-cohort fields") {
    auto report = run_cohorts(PortfolioSpec{{0.6, 0.4}},
                              plan_starting(MonthIndex{}, 0.00444),
                              january_grid(1960, 1970), {&bundle().sp, &bundle().gs10});
    const auto j = nlohmann::json::parse(report_json(report));
    CHECK(j.at("cohort_count").get<std::size_t>() == report.cohort_count);
    CHECK(j.at("failure_rate").get<double>() == report.failure_rate);
    CHECK(j.at("mean_terminal").get<double>() == report.mean_terminal);
    CHECK(j.at("median_terminal").get<double>() == report.median_terminal);
    REQUIRE(j.at("cohorts").size() == 11);
    const auto& c66 = j.at("cohorts")[6];
    CHECK(c66.at("start").get<std::string>() == "1966-01");
    CHECK(c66.at("first_breach").get<long>() == 311);
    CHECK(j.at("cohorts")[0].at("first_breach").is_null() ==
          !report.trajectories[0].first_breach.has_value());

    const auto bare = nlohmann::json::parse(report_json(report, false));
    CHECK(!bare.contains("cohorts"));
    if (!report.min_first_breach) CHECK(bare.at("first_breach_min").is_null());
}

TEST_CASE("summary text names the headline numbers") {
    auto report = run_cohorts(PortfolioSpec{{0.6, 0.4}},
                              plan_starting(MonthIndex{}, 0.00444),
                              january_grid(1960, 1970), {&bundle().sp, &bundle().gs10});
    const auto text = summarize(report);
    CHECK(text.find("cohorts:            11 (1960-01 .. 1970-01)") != std::string::npos);
    CHECK(text.find("failure rate:") != std::string::npos);
    CHECK(text.find("terminal equity/W:") != std::string::npos);
    CHECK(text.find("first breach month:") != std::string::npos);
}

TEST_CASE("svg small multiples render breached and unbreached paths") {
    auto report = run_cohorts(PortfolioSpec{{0.6, 0.4}},
                              plan_starting(MonthIndex{}, 0.00444),
                              january_grid(1965, 1967), {&bundle().sp, &bundle().gs10});
    std::ostringstream out;
    render_trajectories_svg(report, "60/40 cohorts", out);
    const auto svg = out.str();
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("60/40 cohorts") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);  // 1966 breaches
    CHECK(svg.find("1966-01") != std::string::npos);
    CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
}

TEST_CASE("plans that outrun the data are refused with the coverage window") {
    PortfolioSpec spec{{0.6, 0.4}};
    auto plan = plan_starting(MonthIndex{1996, 1}, 0.00444);
    CHECK_THROWS_WITH_AS(
        simulate_retirement(spec, plan, {&bundle().sp, &bundle().gs10}),
        doctest::Contains("covers"), ValidationError);
    CHECK_THROWS_WITH_AS(
        simulate_retirement(spec, plan, {&bundle().sp, &bundle().gs10}),
        doctest::Contains("shiller_sp"), ValidationError);
}

TEST_CASE("portfolio and plan validation") {
    auto flat = constant_series(0.0, MonthIndex{1950, 2}, 360);
    auto plan = plan_starting(MonthIndex{1950, 1}, 0.004);

    CHECK_THROWS_WITH_AS(
        simulate_retirement(PortfolioSpec{{2.0, 0.4}}, plan, {&flat, &flat}),
        doctest::Contains("sum to"), ValidationError);
    CHECK_THROWS_WITH_AS(
        simulate_retirement(PortfolioSpec{{-0.2, 1.2}}, plan, {&flat, &flat}),
        doctest::Contains("non-negative"), ValidationError);
    CHECK_THROWS_AS(simulate_retirement(PortfolioSpec{{1.0}}, plan, {&flat, &flat}),
                    ValidationError);
    CHECK_THROWS_AS(simulate_retirement(PortfolioSpec{{1.0}}, plan, {}), ValidationError);

    PortfolioSpec levered{{1.0}, 2.0};
    CHECK_THROWS_WITH_AS(simulate_retirement(levered, plan, {&flat}),
                         doctest::Contains("funding cost"), ValidationError);
    PortfolioSpec negative{{1.0}, -0.5};
    CHECK_THROWS_AS(simulate_retirement(negative, plan, {&flat}), ValidationError);

    auto bad = plan;
    bad.initial_withdrawal = 0.0;
    CHECK_THROWS_AS(simulate_retirement(PortfolioSpec{{1.0}}, bad, {&flat}),
                    ValidationError);
    bad.initial_withdrawal = 1.0;
    CHECK_THROWS_AS(simulate_retirement(PortfolioSpec{{1.0}}, bad, {&flat}),
                    ValidationError);
    bad = plan;
    bad.months = 0;
    CHECK_THROWS_AS(simulate_retirement(PortfolioSpec{{1.0}}, bad, {&flat}),
                    ValidationError);

    CHECK_THROWS_AS(january_grid(1995, 1934), ValidationError);
    CHECK_THROWS_AS(run_cohorts(PortfolioSpec{{1.0}}, plan, {}, {&flat}),
                    ValidationError);
}
