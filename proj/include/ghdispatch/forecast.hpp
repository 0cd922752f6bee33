#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ghdispatch {

/// Seconds since 1970-01-01T00:00:00Z.
using UnixSeconds = std::int64_t;

inline constexpr UnixSeconds kSecondsPerHour = 3600;

UnixSeconds parse_iso8601(std::string_view text);
std::string format_iso8601(UnixSeconds t);

class ForecastError : public std::runtime_error {
public:
    enum class Kind { malformed, non_monotone, gap, unit_mismatch, coverage, missing_signal, resolution };

    ForecastError(Kind kind, const std::string& what, std::size_t row = 0)
        : std::runtime_error(what), kind_(kind), row_(row) {}

    Kind kind() const noexcept { return kind_; }
    /// 1-based line number in the source text, 0 when not row-specific.
    std::size_t row() const noexcept { return row_; }

private:
    Kind kind_;
    std::size_t row_;
};

/// Evenly spaced, gap-free series.
struct ForecastSeries {
    std::string name;
    std::string unit;
    UnixSeconds start = 0;
    UnixSeconds resolution = kSecondsPerHour;
    std::vector<double> values;

    UnixSeconds timestamp(std::size_t i) const {
        return start + static_cast<UnixSeconds>(i) * resolution;
    }
    /// One past the last covered second.
    UnixSeconds end() const { return timestamp(values.size()); }

    bool operator==(const ForecastSeries&) const = default;
};

/// Binds one signal to the columns of a delimiter-separated file.
struct ColumnSchema {
    std::string timestamp_column = "timestamp";
    std::string value_column;
    /// Unit the file's values are expressed in.
    std::string unit;
    char delimiter = ',';
    /// Used only when a file holds a single row.
    UnixSeconds default_resolution = kSecondsPerHour;
};

ForecastSeries parse_forecast_text(std::string_view text, const ColumnSchema& schema);
ForecastSeries read_forecast_file(const std::filesystem::path& path, const ColumnSchema& schema);

/// Writes `timestamp,<name>` rows with shortest round-trip number formatting.
std::string write_forecast_text(const ForecastSeries& series, char delimiter = ',');

/// Averages sub-hourly values into hourly means. Hourly input is returned as is.
ForecastSeries aggregate_to_hourly(const ForecastSeries& series);

/// Converts a value expressed in `from` into `to`; throws on incompatible units.
double unit_factor(const std::string& from, const std::string& to);

/// Hourly, horizon-aligned inputs in canonical units: demands in W, prices in
/// EUR/MWh, emission intensities in kg/MWh.
struct ForecastSet {
    UnixSeconds start = 0;
    UnixSeconds resolution = kSecondsPerHour;
    std::vector<double> heat_demand;
    std::vector<double> el_demand;
    std::vector<double> el_price;
    std::vector<double> gas_price;
    std::vector<double> dh_price;
    std::vector<double> co2_el;
    std::vector<double> co2_dh;
    double co2_gas = 204.0;

    std::size_t size() const { return heat_demand.size(); }

    /// Sub-range [offset, offset + length). Throws on out-of-range requests.
    ForecastSet window(std::size_t offset, std::size_t length) const;

    /// Throws if the series lengths disagree.
    void validate() const;

    bool operator==(const ForecastSet&) const = default;
};

inline const std::vector<std::string>& required_signals() {
    static const std::vector<std::string> names{"heat_demand", "el_demand", "el_price",
                                                "gas_price", "dh_price", "co2_el"};
    return names;
}

std::string canonical_unit(const std::string& signal);

struct ForecastConstants {
    /// Yearly district-heating intensity (kg/MWh); used when no co2_dh series is given.
    std::optional<double> co2_dh;
    double co2_gas = 204.0;
};

/// Crops every signal to [start, start + horizon hours), aggregating sub-hourly
/// series and converting units on the way.
ForecastSet assemble_forecast_set(const std::map<std::string, ForecastSeries>& sources,
                                  const ForecastConstants& constants, std::size_t horizon,
                                  UnixSeconds start);

} // namespace ghdispatch
