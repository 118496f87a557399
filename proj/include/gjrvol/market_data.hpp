#pragma once

#include <chrono>
#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace gjrvol::data {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD). Returns false on
/// malformed or non-existent dates.
bool parse_iso_date(std::string_view text, Date& out);
std::string format_iso_date(const Date& date);

struct PricePoint {
    Date date;
    double close;
};

/// Close prices with strictly increasing dates and finite positive values.
struct PriceSeries {
    std::vector<PricePoint> observations;

    [[nodiscard]] std::size_t size() const noexcept { return observations.size(); }
    [[nodiscard]] std::vector<double> closes() const;
};

struct ReturnPoint {
    Date date;
    double value;
};

/// Log returns dated by the later of the two prices they were taken from.
struct ReturnSeries {
    std::vector<ReturnPoint> observations;

    [[nodiscard]] std::size_t size() const noexcept { return observations.size(); }
    [[nodiscard]] std::vector<double> values() const;

    /// Builds an undated series (dates count up from 2000-01-01), handy for
    /// simulated data.
    static ReturnSeries from_values(const std::vector<double>& values);
};

struct CsvFormat {
    std::string date_column = "Date";
    std::string close_column = "Close";
    char delimiter = ',';
};

/// Reads a close-price CSV.
///
/// Rows whose close is empty, non-numeric, non-finite or non-positive are
/// filled with the most recent earlier valid close; rows before the first
/// valid close are dropped. Duplicate dates keep the last row in file order,
/// and the result is sorted by date.
///
/// Throws MalformedRowError on an unparseable date (row = 1-based line
/// number, header included) and Error(EmptyInput) when no valid close exists.
PriceSeries load_close_prices(std::istream& source, const CsvFormat& format = {});
PriceSeries load_close_prices_file(const std::string& path, const CsvFormat& format = {});

/// Writes "Date,Close" rows that load_close_prices reads back unchanged.
void write_close_prices(std::ostream& out, const PriceSeries& prices);

ReturnSeries to_log_returns(const PriceSeries& prices);

struct LjungBoxRow {
    std::size_t lag;
    double statistic;
    double p_value;
};

struct StatsSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double std_dev = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double jarque_bera = 0.0;
    std::vector<LjungBoxRow> ljung_box_lags;          // raw returns
    std::vector<LjungBoxRow> ljung_box_squared_lags;  // squared returns
    bool degenerate = false;                          // zero sample variance
};

inline const std::vector<std::size_t> kDefaultLjungBoxLags{5, 10, 20};

/// Sample moments (standardized by the unbiased standard deviation),
/// Jarque-Bera and Ljung-Box on returns and squared returns.
/// Requires at least 8 observations and every lag in [1, n).
StatsSummary descriptive_stats(const ReturnSeries& returns,
                               const std::vector<std::size_t>& lb_lags = kDefaultLjungBoxLags);
StatsSummary descriptive_stats(const std::vector<double>& returns,
                               const std::vector<std::size_t>& lb_lags = kDefaultLjungBoxLags);

/// Ljung-Box Q over lags 1..lag with a chi-square(lag) p-value.
LjungBoxRow ljung_box(const std::vector<double>& x, std::size_t lag);

}  // namespace gjrvol::data
