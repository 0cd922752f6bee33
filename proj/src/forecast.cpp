#include "ghdispatch/forecast.hpp"
#include "ghdispatch/csv.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ghdispatch {

namespace {

std::optional<int> parse_digits(std::string_view s, std::size_t pos, std::size_t n) {
    if (pos + n > s.size())
        return std::nullopt;
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (s[i] < '0' || s[i] > '9')
            return std::nullopt;
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

[[noreturn]] void bad_timestamp(std::string_view text) {
    throw std::invalid_argument("invalid ISO-8601 timestamp '" + std::string(text) + "'");
}

// Strips an optional "[unit]" suffix from a header cell.
std::pair<std::string, std::string> split_header(std::string_view cell) {
    cell = csv::trim(cell);
    const auto open = cell.find('[');
    if (open == std::string_view::npos || cell.back() != ']')
        return {std::string(cell), ""};
    return {std::string(csv::trim(cell.substr(0, open))),
            std::string(csv::trim(cell.substr(open + 1, cell.size() - open - 2)))};
}

std::string interval_text(UnixSeconds from, UnixSeconds to) {
    return "[" + format_iso8601(from) + ", " + format_iso8601(to) + ")";
}

} // namespace

UnixSeconds parse_iso8601(std::string_view text) {
    using namespace std::chrono;
    text = csv::trim(text);
    // YYYY-MM-DDTHH:MM[:SS][Z|+00:00]
    const auto y = parse_digits(text, 0, 4);
    const auto mo = parse_digits(text, 5, 2);
    const auto d = parse_digits(text, 8, 2);
    const auto hh = parse_digits(text, 11, 2);
    const auto mi = parse_digits(text, 14, 2);
    if (!y || !mo || !d || !hh || !mi || text[4] != '-' || text[7] != '-' ||
        (text[10] != 'T' && text[10] != ' ') || text[13] != ':')
        bad_timestamp(text);
    std::size_t pos = 16;
    int ss = 0;
    if (pos < text.size() && text[pos] == ':') {
        const auto s = parse_digits(text, pos + 1, 2);
        if (!s)
            bad_timestamp(text);
        ss = *s;
        pos += 3;
    }
    auto rest = text.substr(pos);
    if (!(rest.empty() || rest == "Z" || rest == "+00:00" || rest == "+0000"))
        bad_timestamp(text);

    const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)},
                             day{static_cast<unsigned>(*d)}};
    if (!ymd.ok() || *hh > 23 || *mi > 59 || ss > 59)
        bad_timestamp(text);
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return static_cast<UnixSeconds>(days) * 86400 + *hh * 3600 + *mi * 60 + ss;
}

std::string format_iso8601(UnixSeconds t) {
    using namespace std::chrono;
    auto days = t / 86400;
    auto secs = t % 86400;
    if (secs < 0) {
        secs += 86400;
        days -= 1;
    }
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(secs / 3600), static_cast<int>((secs / 60) % 60),
                  static_cast<int>(secs % 60));
    return buf;
}

ForecastSeries parse_forecast_text(std::string_view text, const ColumnSchema& schema) {
    using Kind = ForecastError::Kind;
    const auto all = csv::lines(text);
    std::size_t header_line = 0;
    while (header_line < all.size() && csv::trim(all[header_line]).empty())
        ++header_line;
    if (header_line == all.size())
        throw ForecastError(Kind::malformed, "missing header row", 1);

    const auto header = csv::split(all[header_line], schema.delimiter);
    std::optional<std::size_t> ts_col, val_col;
    std::string header_unit;
    for (std::size_t c = 0; c < header.size(); ++c) {
        auto [name, unit] = split_header(header[c]);
        if (name == schema.timestamp_column)
            ts_col = c;
        else if (name == schema.value_column) {
            val_col = c;
            header_unit = unit;
        }
    }
    if (!ts_col)
        throw ForecastError(Kind::malformed,
                            "header lacks timestamp column '" + schema.timestamp_column + "'",
                            header_line + 1);
    if (!val_col)
        throw ForecastError(Kind::malformed,
                            "header lacks value column '" + schema.value_column + "'",
                            header_line + 1);
    if (!header_unit.empty() && !schema.unit.empty() && header_unit != schema.unit)
        throw ForecastError(Kind::unit_mismatch,
                            "column '" + schema.value_column + "' is in " + header_unit +
                                " but the schema declares " + schema.unit,
                            header_line + 1);

    ForecastSeries series;
    series.name = schema.value_column;
    series.unit = schema.unit.empty() ? header_unit : schema.unit;

    std::vector<UnixSeconds> stamps;
    std::vector<std::size_t> line_of;
    for (std::size_t li = header_line + 1; li < all.size(); ++li) {
        if (csv::trim(all[li]).empty())
            continue;
        const auto fields = csv::split(all[li], schema.delimiter);
        const std::size_t row = li + 1;
        if (fields.size() != header.size())
            throw ForecastError(Kind::malformed,
                                "row " + std::to_string(row) + ": expected " +
                                    std::to_string(header.size()) + " fields, got " +
                                    std::to_string(fields.size()),
                                row);
        UnixSeconds ts = 0;
        try {
            ts = parse_iso8601(fields[*ts_col]);
        } catch (const std::invalid_argument& e) {
            throw ForecastError(Kind::malformed, "row " + std::to_string(row) + ": " + e.what(),
                                row);
        }
        const auto value = csv::parse_number(fields[*val_col]);
        if (!value)
            throw ForecastError(Kind::malformed,
                                "row " + std::to_string(row) + ": invalid number '" +
                                    std::string(csv::trim(fields[*val_col])) + "'",
                                row);
        if (!stamps.empty() && ts <= stamps.back())
            throw ForecastError(Kind::non_monotone,
                                "row " + std::to_string(row) + ": timestamp " +
                                    format_iso8601(ts) + " does not increase",
                                row);
        stamps.push_back(ts);
        line_of.push_back(row);
        series.values.push_back(*value);
    }
    if (stamps.empty())
        throw ForecastError(Kind::malformed, "no data rows", header_line + 1);

    series.start = stamps.front();
    series.resolution = stamps.size() > 1 ? stamps[1] - stamps[0] : schema.default_resolution;
    for (std::size_t i = 2; i < stamps.size(); ++i) {
        if (stamps[i] - stamps[i - 1] != series.resolution)
            throw ForecastError(Kind::gap,
                                "row " + std::to_string(line_of[i]) + ": spacing " +
                                    std::to_string(stamps[i] - stamps[i - 1]) +
                                    " s differs from resolution " +
                                    std::to_string(series.resolution) + " s",
                                line_of[i]);
    }
    return series;
}

ForecastSeries read_forecast_file(const std::filesystem::path& path, const ColumnSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open forecast file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_forecast_text(ss.str(), schema);
    } catch (const ForecastError& e) {
        throw ForecastError(e.kind(), path.string() + ": " + e.what(), e.row());
    }
}

std::string write_forecast_text(const ForecastSeries& series, char delimiter) {
    std::string out = "timestamp";
    out += delimiter;
    out += series.name;
    out += '\n';
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        out += format_iso8601(series.timestamp(i));
        out += delimiter;
        out += csv::format_number(series.values[i]);
        out += '\n';
    }
    return out;
}

ForecastSeries aggregate_to_hourly(const ForecastSeries& series) {
    using Kind = ForecastError::Kind;
    if (series.resolution <= 0 || kSecondsPerHour % series.resolution != 0)
        throw ForecastError(Kind::resolution, series.name + ": resolution " +
                                                  std::to_string(series.resolution) +
                                                  " s does not divide one hour");
    if (series.resolution == kSecondsPerHour)
        return series;

    const auto per_hour = static_cast<std::size_t>(kSecondsPerHour / series.resolution);
    if (series.values.size() % per_hour != 0)
        throw ForecastError(Kind::resolution,
                            series.name + ": partial trailing hour (" +
                                std::to_string(series.values.size() % per_hour) + " of " +
                                std::to_string(per_hour) + " samples)");

    ForecastSeries out;
    out.name = series.name;
    out.unit = series.unit;
    out.start = series.start;
    out.resolution = kSecondsPerHour;
    out.values.reserve(series.values.size() / per_hour);
    for (std::size_t i = 0; i < series.values.size(); i += per_hour) {
        double sum = 0.0;
        for (std::size_t k = 0; k < per_hour; ++k)
            sum += series.values[i + k];
        out.values.push_back(sum / static_cast<double>(per_hour));
    }
    return out;
}

std::string canonical_unit(const std::string& signal) {
    if (signal == "heat_demand" || signal == "el_demand")
        return "W";
    if (signal == "el_price" || signal == "gas_price" || signal == "dh_price")
        return "EUR/MWh";
    if (signal == "co2_el" || signal == "co2_dh")
        return "kg/MWh";
    throw std::invalid_argument("unknown signal '" + signal + "'");
}

double unit_factor(const std::string& from, const std::string& to) {
    static const std::map<std::string, std::pair<std::string, double>> table{
        {"W", {"W", 1.0}},
        {"kW", {"W", 1e3}},
        {"MW", {"W", 1e6}},
        {"EUR/MWh", {"EUR/MWh", 1.0}},
        {"EUR/kWh", {"EUR/MWh", 1e3}},
        {"kg/MWh", {"kg/MWh", 1.0}},
        {"g/kWh", {"kg/MWh", 1.0}},
        {"kg/kWh", {"kg/MWh", 1e3}},
        {"t/MWh", {"kg/MWh", 1e3}},
    };
    const auto f = table.find(from);
    const auto t = table.find(to);
    if (f == table.end() || t == table.end() || f->second.first != t->second.first)
        throw ForecastError(ForecastError::Kind::unit_mismatch,
                            "cannot convert " + (from.empty() ? std::string("<none>") : from) +
                                " to " + to);
    return f->second.second / t->second.second;
}

void ForecastSet::validate() const {
    const auto n = heat_demand.size();
    for (const auto* v : {&el_demand, &el_price, &gas_price, &dh_price, &co2_el, &co2_dh})
        if (v->size() != n)
            throw std::invalid_argument("forecast set series have unequal lengths");
}

ForecastSet ForecastSet::window(std::size_t offset, std::size_t length) const {
    if (offset + length > size())
        throw std::out_of_range("forecast window [" + std::to_string(offset) + ", " +
                                std::to_string(offset + length) + ") exceeds " +
                                std::to_string(size()) + " instants");
    auto cut = [&](const std::vector<double>& v) {
        return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(offset),
                                   v.begin() + static_cast<std::ptrdiff_t>(offset + length));
    };
    ForecastSet out;
    out.start = start + static_cast<UnixSeconds>(offset) * resolution;
    out.resolution = resolution;
    out.heat_demand = cut(heat_demand);
    out.el_demand = cut(el_demand);
    out.el_price = cut(el_price);
    out.gas_price = cut(gas_price);
    out.dh_price = cut(dh_price);
    out.co2_el = cut(co2_el);
    out.co2_dh = cut(co2_dh);
    out.co2_gas = co2_gas;
    return out;
}

ForecastSet assemble_forecast_set(const std::map<std::string, ForecastSeries>& sources,
                                  const ForecastConstants& constants, std::size_t horizon,
                                  UnixSeconds start) {
    using Kind = ForecastError::Kind;
    const UnixSeconds stop = start + static_cast<UnixSeconds>(horizon) * kSecondsPerHour;

    auto aligned = [&](const std::string& signal) -> std::vector<double> {
        const auto it = sources.find(signal);
        if (it == sources.end())
            throw ForecastError(Kind::missing_signal, "required signal '" + signal + "' missing");
        ForecastSeries hourly = aggregate_to_hourly(it->second);
        const double factor = unit_factor(hourly.unit, canonical_unit(signal));

        if ((start - hourly.start) % kSecondsPerHour != 0)
            throw ForecastError(Kind::coverage,
                                signal + ": timeline is not hour-aligned with the horizon start");
        if (hourly.start > start)
            throw ForecastError(Kind::coverage, signal + ": no data for " +
                                                    interval_text(start, std::min(stop, hourly.start)));
        if (hourly.end() < stop)
            throw ForecastError(Kind::coverage, signal + ": no data for " +
                                                    interval_text(std::max(start, hourly.end()), stop));

        const auto first = static_cast<std::size_t>((start - hourly.start) / kSecondsPerHour);
        std::vector<double> out(horizon);
        for (std::size_t i = 0; i < horizon; ++i)
            out[i] = hourly.values[first + i] * factor;
        return out;
    };

    ForecastSet set;
    set.start = start;
    set.resolution = kSecondsPerHour;
    set.heat_demand = aligned("heat_demand");
    set.el_demand = aligned("el_demand");
    set.el_price = aligned("el_price");
    set.gas_price = aligned("gas_price");
    set.dh_price = aligned("dh_price");
    set.co2_el = aligned("co2_el");
    if (sources.contains("co2_dh"))
        set.co2_dh = aligned("co2_dh");
    else if (constants.co2_dh)
        set.co2_dh.assign(horizon, *constants.co2_dh);
    else
        throw ForecastError(Kind::missing_signal,
                            "required signal 'co2_dh' missing (neither series nor yearly value)");
    set.co2_gas = constants.co2_gas;
    return set;
}

} // namespace ghdispatch
