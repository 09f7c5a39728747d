#include "decum/ingest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "decum/errors.hpp"

namespace decum {

namespace {

std::string trimmed(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' '))
        s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && s[b] == ' ') ++b;
    return s.substr(b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    for (auto& f : fields) f = trimmed(f);
    return fields;
}

double parse_cell(const std::string& cell, const std::filesystem::path& path,
                  std::size_t line_no, const std::string& column) {
    if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
    const char* begin = cell.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + cell.size()) {
        std::ostringstream msg;
        msg << path.string() << ":" << line_no << ": cannot parse '" << cell
            << "' in column " << column;
        throw IngestError(msg.str());
    }
    return v;
}

}  // namespace

const Eigen::ArrayXd& CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return columns[i];
    std::ostringstream msg;
    msg << "no column '" << name << "'; table has:";
    for (const auto& n : names) msg << " " << n;
    throw IngestError(msg.str());
}

CsvTable load_monthly_csv(const std::filesystem::path& path,
                          const std::vector<std::string>& schema) {
    if (schema.size() < 2)
        throw IngestError("schema needs a date column and at least one value column");
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw IngestError(path.string() + " is empty");
    auto header = split_csv_line(line);
    if (header != schema) {
        std::ostringstream msg;
        msg << path.string() << ":1: header mismatch; expected";
        for (const auto& c : schema) msg << " " << c;
        msg << " but found";
        for (const auto& c : header) msg << " " << c;
        throw IngestError(msg.str());
    }

    struct Row {
        long serial;
        std::size_t line_no;
        std::vector<double> cells;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != schema.size()) {
            std::ostringstream msg;
            msg << path.string() << ":" << line_no << ": expected " << schema.size()
                << " fields, got " << fields.size();
            throw IngestError(msg.str());
        }
        Row row;
        row.line_no = line_no;
        try {
            row.serial = parse_month(fields[0]).serial();
        } catch (const ValidationError& e) {
            std::ostringstream msg;
            msg << path.string() << ":" << line_no << ": " << e.what();
            throw IngestError(msg.str());
        }
        for (std::size_t c = 1; c < fields.size(); ++c)
            row.cells.push_back(parse_cell(fields[c], path, line_no, schema[c]));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IngestError(path.string() + " has no data rows");

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.serial < b.serial; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        long prev = rows[i - 1].serial, cur = rows[i].serial;
        if (cur == prev) {
            std::ostringstream msg;
            msg << path.string() << ": duplicate month "
                << MonthIndex::from_serial(cur).str() << " (lines " << rows[i - 1].line_no
                << " and " << rows[i].line_no << ")";
            throw IngestError(msg.str());
        }
        if (cur != prev + 1) {
            std::ostringstream msg;
            msg << path.string() << ": months not contiguous: "
                << MonthIndex::from_serial(cur).str() << " follows "
                << MonthIndex::from_serial(prev).str() << " (missing "
                << MonthIndex::from_serial(prev + 1).str();
            if (cur - prev > 2)
                msg << " through " << MonthIndex::from_serial(cur - 1).str();
            msg << ")";
            throw IngestError(msg.str());
        }
    }

    CsvTable out;
    out.months.reserve(rows.size());
    out.names.assign(schema.begin() + 1, schema.end());
    out.columns.assign(out.names.size(),
                       Eigen::ArrayXd(static_cast<Eigen::Index>(rows.size())));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.months.push_back(MonthIndex::from_serial(rows[i].serial));
        for (std::size_t c = 0; c < out.names.size(); ++c)
            out.columns[c][static_cast<Eigen::Index>(i)] = rows[i].cells[c];
    }
    return out;
}

std::string sha256_hex(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw IngestError("cannot allocate digest context");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hexdigits = "0123456789abcdef";
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        hex += hexdigits[md[i] >> 4];
        hex += hexdigits[md[i] & 0xF];
    }
    return hex;
}

void verify_manifest(const std::filesystem::path& dir) {
    const auto manifest = dir / "MANIFEST.sha256";
    std::ifstream in(manifest);
    if (!in) throw IngestError("manifest not found at " + manifest.string());
    std::string line;
    std::size_t line_no = 0;
    std::size_t checked = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trimmed(line);
        if (line.empty()) continue;
        auto sep = line.find("  ");
        if (sep == std::string::npos || sep != 64) {
            std::ostringstream msg;
            msg << manifest.string() << ":" << line_no
                << ": malformed line, want '<sha256 hex><two spaces><name>'";
            throw IngestError(msg.str());
        }
        std::string want = line.substr(0, sep);
        std::string name = trimmed(line.substr(sep + 2));
        std::transform(want.begin(), want.end(), want.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        std::string got = sha256_hex(dir / name);
        if (got != want) {
            std::ostringstream msg;
            msg << "digest mismatch for " << name << ": manifest has " << want
                << " but file hashes to " << got;
            throw IngestError(msg.str());
        }
        ++checked;
    }
    if (checked == 0)
        throw IngestError(manifest.string() + " lists no files");
}

MonthlyReturnSeries equity_total_returns(const Eigen::ArrayXd& price,
                                         const Eigen::ArrayXd& dividend,
                                         MonthIndex first_month,
                                         const std::string& label) {
    if (price.size() != dividend.size())
        throw IngestError("price and dividend columns differ in length");
    if (price.size() < 2)
        throw IngestError("need at least 2 price months to form a return");
    MonthlyReturnSeries out;
    out.label = label;
    out.start = first_month.plus(1);
    out.values = Eigen::ArrayXd(price.size() - 1);
    for (Eigen::Index i = 1; i < price.size(); ++i) {
        if (!(price[i - 1] > 0.0) || !(price[i] > 0.0)) {
            std::ostringstream msg;
            msg << label << ": non-positive price at "
                << first_month.plus(price[i] > 0.0 ? i - 1 : i).str();
            throw IngestError(msg.str());
        }
        out.values[i - 1] = (price[i] + dividend[i] / 12.0) / price[i - 1] - 1.0;
    }
    return out;
}

MonthlyReturnSeries bond_returns_from_gs10(const RateSeries& yields, BondMethod method,
                                           double duration_years) {
    const auto& y = yields.annual_rate_percent;
    if (y.size() < 2)
        throw IngestError("need at least 2 yield months to form a return");
    MonthlyReturnSeries out;
    out.label = yields.label + "_returns";
    out.start = yields.start.plus(1);
    out.values = Eigen::ArrayXd(y.size() - 1);
    for (Eigen::Index t = 1; t < y.size(); ++t) {
        const double i0 = y[t - 1] / 1200.0;  // monthly coupon bought at par
        const double i1 = y[t] / 1200.0;      // marking yield a month later
        double r;
        if (method == BondMethod::ConstantDuration) {
            r = i0 - duration_years * (y[t] - y[t - 1]) / 100.0;
        } else {
            if (!(1.0 + i1 > 0.0)) {
                std::ostringstream msg;
                msg << yields.label << ": yield " << y[t] << " at "
                    << yields.month_at(t).str() << " makes discounting impossible";
                throw IngestError(msg.str());
            }
            // Value of the remaining 119 coupons plus principal, discounted
            // at the new yield; the current coupon pays on top.
            double pv;
            if (i1 == 0.0) {
                pv = i0 * 119.0 + 1.0;
            } else {
                const double v = std::pow(1.0 + i1, -119.0);
                pv = i0 * (1.0 - v) / i1 + v;
            }
            if (!(pv > 0.0)) {
                std::ostringstream msg;
                msg << yields.label << ": repricing at " << yields.month_at(t).str()
                    << " produced a non-positive bond value";
                throw IngestError(msg.str());
            }
            r = pv + i0 - 1.0;
        }
        out.values[t - 1] = r;
    }
    return out;
}

MonthlyReturnSeries returns_from_prices(const PriceSeries& prices, bool drop_first) {
    const auto& p = prices.prices;
    const Eigen::Index need = drop_first ? 3 : 2;
    if (p.size() < need)
        throw IngestError(prices.label + ": need at least " + std::to_string(need) +
                          " prices");
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0.0)) {
            std::ostringstream msg;
            msg << prices.label << ": non-positive price at " << prices.month_at(i).str();
            throw IngestError(msg.str());
        }
    }
    const Eigen::Index skip = drop_first ? 1 : 0;
    MonthlyReturnSeries out;
    out.label = prices.label;
    out.start = prices.start.plus(1 + skip);
    out.values = Eigen::ArrayXd(p.size() - 1 - skip);
    for (Eigen::Index i = 1 + skip; i < p.size(); ++i)
        out.values[i - 1 - skip] = p[i] / p[i - 1] - 1.0;
    return out;
}

MonthlyReturnSeries monthly_cost(const RateSeries& rate, double spread_bp) {
    MonthlyReturnSeries out;
    std::ostringstream name;
    name << rate.label;
    if (spread_bp != 0.0) name << "+" << spread_bp << "bp";
    out.label = name.str();
    out.start = rate.start;
    out.values = (rate.annual_rate_percent + spread_bp / 100.0) / 1200.0;
    return out;
}

namespace {

void require_complete(const CsvTable& table, const std::string& column,
                      const std::filesystem::path& path) {
    const auto& col = table.column(column);
    for (Eigen::Index i = 0; i < col.size(); ++i) {
        if (std::isnan(col[i])) {
            std::ostringstream msg;
            msg << path.string() << ": column " << column << " has a missing value at "
                << table.months[static_cast<std::size_t>(i)].str();
            throw IngestError(msg.str());
        }
    }
}

void accept_returns(const MonthlyReturnSeries& s) {
    try {
        validate_returns(s);
    } catch (const ValidationError& e) {
        throw IngestError(e.what());
    }
}

}  // namespace

DataBundle load_bundle(const std::filesystem::path& dir, BondMethod method, bool verify) {
    if (verify) verify_manifest(dir);

    DataBundle bundle;

    const auto shiller_path = dir / "shiller.csv";
    auto shiller = load_monthly_csv(shiller_path,
                                    {"date", "sp_price", "dividend", "gs10_yield", "cpi"});
    for (const auto& c : shiller.names) require_complete(shiller, c, shiller_path);
    const MonthIndex first = shiller.months.front();

    bundle.sp = equity_total_returns(shiller.column("sp_price"), shiller.column("dividend"),
                                     first, "shiller_sp");
    bundle.gs10_yield = RateSeries{"gs10_yield", first, shiller.column("gs10_yield")};
    bundle.gs10 = bond_returns_from_gs10(bundle.gs10_yield, method);
    bundle.gs10.label = "shiller_gs10";
    bundle.cpi = shiller.column("cpi");

    const std::vector<std::string> rate_schema = {"date", "annual_rate_percent"};
    auto tbill_path = dir / "tbill3m.csv";
    auto tbill = load_monthly_csv(tbill_path, rate_schema);
    require_complete(tbill, "annual_rate_percent", tbill_path);
    bundle.tbill =
        RateSeries{"tbill3m", tbill.months.front(), tbill.column("annual_rate_percent")};

    auto effr_path = dir / "effr.csv";
    auto effr = load_monthly_csv(effr_path, rate_schema);
    require_complete(effr, "annual_rate_percent", effr_path);
    bundle.effr =
        RateSeries{"effr", effr.months.front(), effr.column("annual_rate_percent")};

    static const char* tickers[] = {"spy", "agg", "shv", "shy", "iei", "ief", "tlh", "tlt"};
    for (const char* ticker : tickers) {
        auto path = dir / (std::string(ticker) + ".csv");
        auto table = load_monthly_csv(path, {"date", "adjusted_close"});
        require_complete(table, "adjusted_close", path);
        PriceSeries prices{ticker, table.months.front(), table.column("adjusted_close")};
        // The opening observation of these feeds is a partial month, so the
        // first computed return is discarded.
        bundle.etfs.emplace_back(ticker, returns_from_prices(prices, true));
    }

    accept_returns(bundle.sp);
    accept_returns(bundle.gs10);
    for (const auto& [ticker, series] : bundle.etfs) accept_returns(series);

    return bundle;
}

}  // namespace decum
