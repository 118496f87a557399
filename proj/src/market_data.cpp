#include "gjrvol/market_data.hpp"

#include "gjrvol/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>

namespace gjrvol::data {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Minimal RFC-4180 style splitter: quoted fields may contain the delimiter
// and doubled quotes; embedded newlines are not supported.
std::vector<std::string> split_row(std::string_view line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            fields.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.emplace_back(trim(cur));
    return fields;
}

std::optional<double> parse_close(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    if (!std::isfinite(value) || value <= 0.0) return std::nullopt;
    return value;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw Error(ErrorCode::InvalidInput, "CSV header has no column named '" + name + "'");
}

}  // namespace

bool parse_iso_date(std::string_view text, Date& out) {
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
    auto digits = [&](std::size_t pos, std::size_t len, int& v) {
        const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
        return ec == std::errc{} && ptr == text.data() + pos + len;
    };
    int y = 0, m = 0, d = 0;
    if (!digits(0, 4, y) || !digits(5, 2, m) || !digits(8, 2, d)) return false;
    const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) return false;
    out = date;
    return true;
}

std::string format_iso_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

std::vector<double> PriceSeries::closes() const {
    std::vector<double> out;
    out.reserve(observations.size());
    for (const auto& p : observations) out.push_back(p.close);
    return out;
}

std::vector<double> ReturnSeries::values() const {
    std::vector<double> out;
    out.reserve(observations.size());
    for (const auto& p : observations) out.push_back(p.value);
    return out;
}

ReturnSeries ReturnSeries::from_values(const std::vector<double>& values) {
    ReturnSeries out;
    out.observations.reserve(values.size());
    const std::chrono::sys_days start{Date{std::chrono::year{2000}, std::chrono::January, std::chrono::day{1}}};
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.observations.push_back({Date{start + std::chrono::days{static_cast<long>(i)}}, values[i]});
    }
    return out;
}

PriceSeries load_close_prices(std::istream& source, const CsvFormat& format) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(source, line)) {
        ++line_no;
        std::string_view view = line;
        if (line_no == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
        if (trim(view).empty()) continue;
        header = split_row(view, format.delimiter);
        break;
    }
    if (header.empty()) throw Error(ErrorCode::EmptyInput, "no header row");
    const std::size_t date_col = find_column(header, format.date_column);
    const std::size_t close_col = find_column(header, format.close_column);

    // date -> (close or missing); later rows overwrite earlier ones.
    std::map<std::chrono::sys_days, std::optional<double>> rows;
    while (std::getline(source, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_row(line, format.delimiter);
        Date date;
        if (date_col >= fields.size() || !parse_iso_date(fields[date_col], date)) {
            throw MalformedRowError(line_no, "unparseable date");
        }
        std::optional<double> close;
        if (close_col < fields.size()) close = parse_close(fields[close_col]);
        rows[std::chrono::sys_days{date}] = close;
    }

    PriceSeries out;
    std::optional<double> last;
    for (const auto& [day, close] : rows) {
        if (close) last = close;
        if (!last) continue;
        out.observations.push_back({Date{day}, *last});
    }
    if (out.observations.empty()) throw Error(ErrorCode::EmptyInput, "no valid close price");
    return out;
}

PriceSeries load_close_prices_file(const std::string& path, const CsvFormat& format) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
    return load_close_prices(in, format);
}

void write_close_prices(std::ostream& out, const PriceSeries& prices) {
    out << "Date,Close\n";
    char buf[64];
    for (const auto& p : prices.observations) {
        std::snprintf(buf, sizeof buf, "%.17g", p.close);
        out << format_iso_date(p.date) << ',' << buf << '\n';
    }
}

ReturnSeries to_log_returns(const PriceSeries& prices) {
    if (prices.size() < 2) throw Error(ErrorCode::TooShort, "need at least 2 prices for returns");
    ReturnSeries out;
    out.observations.reserve(prices.size() - 1);
    for (std::size_t t = 1; t < prices.size(); ++t) {
        const auto& prev = prices.observations[t - 1];
        const auto& cur = prices.observations[t];
        // log of the ratio keeps power-of-two rescaling exact
        out.observations.push_back({cur.date, std::log(cur.close / prev.close)});
    }
    return out;
}

LjungBoxRow ljung_box(const std::vector<double>& x, std::size_t lag) {
    const std::size_t n = x.size();
    if (lag == 0 || lag >= n) throw Error(ErrorCode::InvalidInput, "Ljung-Box lag must be in [1, n)");
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    if (denom == 0.0) return {lag, 0.0, 1.0};

    double q = 0.0;
    for (std::size_t k = 1; k <= lag; ++k) {
        double num = 0.0;
        for (std::size_t t = k; t < n; ++t) num += (x[t] - mean) * (x[t - k] - mean);
        const double rho = num / denom;
        q += rho * rho / static_cast<double>(n - k);
    }
    q *= static_cast<double>(n) * static_cast<double>(n + 2);
    const double p = boost::math::gamma_q(0.5 * static_cast<double>(lag), 0.5 * q);
    return {lag, q, std::clamp(p, 0.0, 1.0)};
}

StatsSummary descriptive_stats(const std::vector<double>& r, const std::vector<std::size_t>& lb_lags) {
    const std::size_t n = r.size();
    if (n < 8) throw Error(ErrorCode::TooShort, "descriptive statistics need at least 8 returns");
    for (auto lag : lb_lags) {
        if (lag == 0 || lag >= n) throw Error(ErrorCode::InvalidInput, "Ljung-Box lags must be in [1, n)");
    }

    StatsSummary s;
    s.n = n;
    const double dn = static_cast<double>(n);
    s.mean = std::accumulate(r.begin(), r.end(), 0.0) / dn;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : r) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double var = m2 / (dn - 1.0);
    s.std_dev = std::sqrt(var);
    if (var > 0.0) {
        s.skewness = (m3 / dn) / (var * s.std_dev);
        s.excess_kurtosis = (m4 / dn) / (var * var) - 3.0;
        s.jarque_bera = dn / 6.0 * (s.skewness * s.skewness + 0.25 * s.excess_kurtosis * s.excess_kurtosis);
    } else {
        s.degenerate = true;
    }

    std::vector<double> sq(n);
    std::transform(r.begin(), r.end(), sq.begin(), [](double v) { return v * v; });
    for (auto lag : lb_lags) {
        s.ljung_box_lags.push_back(ljung_box(r, lag));
        s.ljung_box_squared_lags.push_back(ljung_box(sq, lag));
    }
    return s;
}

StatsSummary descriptive_stats(const ReturnSeries& returns, const std::vector<std::size_t>& lb_lags) {
    return descriptive_stats(returns.values(), lb_lags);
}

}  // namespace gjrvol::data
