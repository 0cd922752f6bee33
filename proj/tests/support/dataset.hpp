#pragma once

// Writes a ForecastSet to per-signal CSV files plus a run configuration, the
// way an operator would hand inputs to the CLI or the service.

#include "ghdispatch/config.hpp"
#include "ghdispatch/forecast.hpp"

#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

namespace fixtures {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("ghdispatch-" + tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// One CSV per signal in `dir`; returns a config JSON pointing at them.
inline nlohmann::json write_dataset(const fs::path& dir, const ghdispatch::ForecastSet& f) {
    using namespace ghdispatch;
    const std::pair<const char*, const std::vector<double>*> signals[] = {
        {"heat_demand", &f.heat_demand}, {"el_demand", &f.el_demand}, {"el_price", &f.el_price},
        {"gas_price", &f.gas_price},     {"dh_price", &f.dh_price},   {"co2_el", &f.co2_el},
        {"co2_dh", &f.co2_dh}};
    nlohmann::json sig = nlohmann::json::object();
    for (const auto& [name, values] : signals) {
        ForecastSeries s{name, canonical_unit(name), f.start, 3600, *values};
        write_file(dir / (std::string(name) + ".csv"), write_forecast_text(s));
        sig[name] = {{"file", std::string(name) + ".csv"}, {"unit", canonical_unit(name)}};
    }
    return {{"forecasts",
             {{"start", format_iso8601(f.start)},
              {"base_dir", dir.string()},
              {"signals", sig},
              {"co2_gas", f.co2_gas}}},
            {"grid", {{"h", f.size()}}}};
}

} // namespace fixtures
