#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace garmanet {

// Regularly sampled series: start of the grid (epoch seconds), grid step,
// and one value per grid point.
struct TimeSeries {
    std::int64_t start = 0;
    std::int64_t step = 0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    std::int64_t timestamp_at(std::size_t i) const {
        return start + static_cast<std::int64_t>(i) * step;
    }
};

struct NormParams {
    double y_min = 0.0;
    double y_max = 0.0;
};

struct SplitSpec {
    std::size_t init_len = 0;
    std::size_t train_len = 0;
    std::size_t test_len = 0;
};

struct SplitSeries {
    std::vector<double> init;
    std::vector<double> train;
    std::vector<double> test;
};

enum class GapFill { none, interpolate };

struct LoadOptions {
    std::string timestamp_column = "timestamp";
    std::string value_column = "price";
    GapFill fill = GapFill::none;
};

// ISO-8601 helpers ("YYYY-MM-DDTHH:MM:SS", 'T' or space separator, seconds
// optional on input, optional trailing 'Z').
std::int64_t parse_iso8601(const std::string& text);
std::string format_iso8601(std::int64_t epoch_seconds);

// Reads a header-first CSV, checks the time grid is strictly regular, and
// optionally fills isolated single-step gaps by linear interpolation.
TimeSeries load_series(const std::string& path, const LoadOptions& options = {});

std::vector<double> log_returns(const std::vector<double>& prices);

NormParams minmax_params(const std::vector<double>& x);
std::vector<double> minmax_normalize(const std::vector<double>& x, const NormParams& p);
std::vector<double> minmax_denormalize(const std::vector<double>& y, const NormParams& p);
double denormalize_one(double y, const NormParams& p);

SplitSeries split_series(const std::vector<double>& x, const SplitSpec& spec);

} // namespace garmanet
