#pragma once

#include "ghdispatch/decision.hpp"
#include "ghdispatch/dispatch.hpp"
#include "ghdispatch/forecast.hpp"
#include "ghdispatch/moga.hpp"
#include "ghdispatch/sil.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace ghdispatch {

struct SignalSource {
    std::filesystem::path file;
    ColumnSchema schema;
};

struct ForecastSources {
    UnixSeconds start = 0;
    /// Relative signal files resolve against this directory.
    std::filesystem::path base_dir;
    std::map<std::string, SignalSource> signals;
    ForecastConstants constants;
};

/// Complete description of an optimisation run. Serialising and re-reading a
/// config (seed included) reproduces the run exactly.
struct RunConfig {
    ForecastSources forecasts;
    DecisionGrid grid;
    EconomicParams economics;
    UnitRatings ratings;
    moga::MogaConfig moga;
    Strategy strategy = Strategy::utilitarian;
    std::optional<LoopConfig> loop;

    /// Stock settings: 1 h wall clock, 50 % crossover,
    /// 5 % mutation, 168 h schedule.
    static RunConfig defaults();
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const RunConfig& config);

RunConfig load_run_config(const std::filesystem::path& path);

/// Parses, aggregates and aligns every configured signal over `horizon` instants.
ForecastSet load_forecasts(const RunConfig& config, std::size_t horizon);

/// Instants of forecast data an episode needs under this config.
std::size_t episode_span(const LoopConfig& loop);

} // namespace ghdispatch
