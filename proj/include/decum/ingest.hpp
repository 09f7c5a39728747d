#pragma once
#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "decum/month.hpp"
#include "decum/series.hpp"

namespace decum {

// A parsed monthly CSV: one date column followed by named numeric columns.
// Missing cells are NaN.  Rows are sorted and calendar-contiguous.
struct CsvTable {
    std::vector<MonthIndex> months;
    std::vector<std::string> names;        // column names, date excluded
    std::vector<Eigen::ArrayXd> columns;   // parallel to names

    const Eigen::ArrayXd& column(const std::string& name) const;
};

// Loads a CSV whose header must match the schema exactly (schema[0] is the
// date column).  Dates accept both YYYY-MM and the fractional legacy form.
// Every malformed cell is reported with its 1-based line number; duplicate
// or missing months are reported with the month names involved.
CsvTable load_monthly_csv(const std::filesystem::path& path,
                          const std::vector<std::string>& schema);

// Hex SHA-256 of a file's bytes.
std::string sha256_hex(const std::filesystem::path& path);

// Checks every file listed in dir/MANIFEST.sha256 (sha256sum layout:
// "<hex><space><space><name>") against its recorded digest.  Any missing
// file or mismatch throws IngestError naming the file.
void verify_manifest(const std::filesystem::path& dir);

// Total return of holding the index for one month, collecting 1/12 of the
// annual dividend flow: r_t = (P_t + D_t / 12) / P_{t-1} - 1.  price and
// dividend are parallel month-end arrays starting at first_month; the
// result starts one month later.  Nominal by construction.
MonthlyReturnSeries equity_total_returns(const Eigen::ArrayXd& price,
                                         const Eigen::ArrayXd& dividend,
                                         MonthIndex first_month,
                                         const std::string& label);

enum class BondMethod {
    ParRepricing,      // roll a par 10-year bond, reprice the remaining 119 coupons
    ConstantDuration,  // linear duration approximation of the same roll
};

// Monthly total return of rolling a par 10-year bond bought at last month's
// yield and marked at this month's.  ParRepricing discounts the remaining
// 119 monthly coupons of y0/1200 plus principal at y1/1200 exactly;
// ConstantDuration uses r = y0/1200 - duration * (y1 - y0) / 100.
MonthlyReturnSeries bond_returns_from_gs10(const RateSeries& yields,
                                           BondMethod method = BondMethod::ParRepricing,
                                           double duration_years = 8.3);

// Simple returns from a price series.  drop_first discards the first
// computed return, for feeds whose opening observation is a partial month.
MonthlyReturnSeries returns_from_prices(const PriceSeries& prices,
                                        bool drop_first = false);

// Monthly funding cost from an annualized percentage rate:
// q_t = (rate_t + spread_bp / 100) / 1200.
MonthlyReturnSeries monthly_cost(const RateSeries& rate, double spread_bp = 0.0);

// Everything the bundled dataset provides, ingested and validated.
struct DataBundle {
    MonthlyReturnSeries sp;      // broad equity total returns, from 1871
    MonthlyReturnSeries gs10;    // rolled 10-year bond total returns, from 1871
    RateSeries gs10_yield;
    RateSeries tbill;            // 3-month bill rate, from 1934
    RateSeries effr;             // overnight funding rate, from 1954
    Eigen::ArrayXd cpi;          // price level matching gs10_yield's calendar
    std::vector<std::pair<std::string, MonthlyReturnSeries>> etfs;  // fixed ticker order
};

// Loads the bundled dataset from dir, verifying MANIFEST.sha256 first
// unless verify is false.  All derived return series are validated
// (non-empty, every return > -1).
DataBundle load_bundle(const std::filesystem::path& dir,
                       BondMethod method = BondMethod::ParRepricing,
                       bool verify = true);

}  // namespace decum
