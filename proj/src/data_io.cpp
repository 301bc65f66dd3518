#include "garmanet/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "garmanet/errors.hpp"

namespace garmanet {

namespace {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (std::isspace(static_cast<unsigned char>(s[b])) != 0)) ++b;
    while (e > b && (std::isspace(static_cast<unsigned char>(s[e - 1])) != 0)) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

} // namespace

std::int64_t parse_iso8601(const std::string& text) {
    std::string t = trim(text);
    if (!t.empty() && (t.back() == 'Z' || t.back() == 'z')) t.pop_back();
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char sep = 0;
    int consumed = 0;
    int n = std::sscanf(t.c_str(), "%d-%d-%d%c%d:%d:%d%n", &y, &mo, &d, &sep, &h, &mi, &s,
                        &consumed);
    if (n != 7 || static_cast<std::size_t>(consumed) != t.size()) {
        consumed = 0;
        n = std::sscanf(t.c_str(), "%d-%d-%d%c%d:%d%n", &y, &mo, &d, &sep, &h, &mi, &consumed);
        if (n != 6 || static_cast<std::size_t>(consumed) != t.size())
            throw data_error("unparseable timestamp: '" + text + "'");
        s = 0;
    }
    if (sep != 'T' && sep != ' ')
        throw data_error("unparseable timestamp: '" + text + "'");
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 ||
        s < 0 || s > 60)
        throw data_error("timestamp out of range: '" + text + "'");
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_iso8601(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02lld:%02lld:%02lld", y, m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

TimeSeries load_series(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open input file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw data_error("empty input file: " + path);
    const auto header = split_csv_line(line);

    std::size_t ts_col = header.size(), val_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == options.timestamp_column) ts_col = i;
        if (header[i] == options.value_column) val_col = i;
    }
    if (ts_col == header.size())
        throw data_error("missing timestamp column '" + options.timestamp_column + "' in " + path);
    if (val_col == header.size())
        throw data_error("missing value column '" + options.value_column + "' in " + path);

    std::vector<std::int64_t> stamps;
    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw data_error(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        stamps.push_back(parse_iso8601(fields[ts_col]));
        try {
            std::size_t pos = 0;
            const double v = std::stod(fields[val_col], &pos);
            if (pos != fields[val_col].size())
                throw std::invalid_argument("trailing characters");
            values.push_back(v);
        } catch (const std::exception&) {
            throw data_error(path + ":" + std::to_string(line_no) + ": unparseable value '" +
                             fields[val_col] + "'");
        }
        if (!std::isfinite(values.back()))
            throw data_error(path + ":" + std::to_string(line_no) + ": non-finite value");
    }
    if (stamps.size() < 2) throw data_error(path + ": need at least 2 rows");

    // Infer the grid step as the smallest positive spacing, then walk the
    // rows and demand strict regularity (single-step gaps are repairable
    // when interpolation was requested).
    std::int64_t step = 0;
    for (std::size_t i = 1; i < stamps.size(); ++i) {
        const std::int64_t d = stamps[i] - stamps[i - 1];
        if (d <= 0)
            throw data_error(path + ": timestamps not strictly increasing at " +
                             format_iso8601(stamps[i]));
        if (step == 0 || d < step) step = d;
    }

    TimeSeries out;
    out.start = stamps[0];
    out.step = step;
    out.values.push_back(values[0]);
    for (std::size_t i = 1; i < stamps.size(); ++i) {
        const std::int64_t d = stamps[i] - stamps[i - 1];
        if (d == step) {
            out.values.push_back(values[i]);
        } else if (d == 2 * step && options.fill == GapFill::interpolate) {
            out.values.push_back(0.5 * (values[i - 1] + values[i]));
            out.values.push_back(values[i]);
        } else if (d % step == 0) {
            throw data_error(path + ": missing " + std::to_string(d / step - 1) +
                             " grid point(s) before " + format_iso8601(stamps[i]) +
                             (options.fill == GapFill::interpolate
                                  ? " (only isolated single-step gaps are interpolated)"
                                  : " (rerun with fill=interpolate for single-step gaps)"));
        } else {
            throw data_error(path + ": irregular spacing before " + format_iso8601(stamps[i]));
        }
    }
    return out;
}

std::vector<double> log_returns(const std::vector<double>& prices) {
    if (prices.size() < 2) throw data_error("log returns need at least 2 prices");
    std::vector<double> r(prices.size() - 1);
    for (std::size_t i = 1; i < prices.size(); ++i) {
        if (prices[i - 1] <= 0.0 || prices[i] <= 0.0)
            throw data_error("log returns need strictly positive prices");
        r[i - 1] = std::log(prices[i] / prices[i - 1]);
    }
    return r;
}

NormParams minmax_params(const std::vector<double>& x) {
    if (x.empty()) throw data_error("cannot normalize an empty series");
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*lo == *hi) throw data_error("cannot normalize a constant series");
    return {*lo, *hi};
}

std::vector<double> minmax_normalize(const std::vector<double>& x, const NormParams& p) {
    const double range = p.y_max - p.y_min;
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = (x[i] - p.y_min) / range;
    return y;
}

std::vector<double> minmax_denormalize(const std::vector<double>& y, const NormParams& p) {
    std::vector<double> x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = denormalize_one(y[i], p);
    return x;
}

double denormalize_one(double y, const NormParams& p) {
    return p.y_min + y * (p.y_max - p.y_min);
}

SplitSeries split_series(const std::vector<double>& x, const SplitSpec& spec) {
    if (spec.train_len == 0 || spec.test_len == 0)
        throw config_error("train and test segments must be non-empty");
    if (spec.init_len + spec.train_len + spec.test_len > x.size())
        throw data_error("split lengths exceed series length " + std::to_string(x.size()));
    SplitSeries out;
    auto it = x.begin();
    out.init.assign(it, it + static_cast<std::ptrdiff_t>(spec.init_len));
    it += static_cast<std::ptrdiff_t>(spec.init_len);
    out.train.assign(it, it + static_cast<std::ptrdiff_t>(spec.train_len));
    it += static_cast<std::ptrdiff_t>(spec.train_len);
    out.test.assign(it, it + static_cast<std::ptrdiff_t>(spec.test_len));
    return out;
}

} // namespace garmanet
