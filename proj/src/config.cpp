#include "ghdispatch/config.hpp"

#include <fstream>

namespace ghdispatch {

using nlohmann::json;

namespace {

json moga_to_json(const moga::MogaConfig& m) {
    json j{{"population_size", m.population_size},
           {"crossover_rate", m.crossover_rate},
           {"mutation_rate", m.mutation_rate},
           {"rng_seed", m.rng_seed},
           {"threads", m.threads}};
    j["max_generations"] = m.max_generations ? json(*m.max_generations) : json(nullptr);
    j["max_wall_clock_s"] = m.max_wall_clock ? json(m.max_wall_clock->count()) : json(nullptr);
    return j;
}

moga::MogaConfig moga_from_json(const json& j, moga::MogaConfig m) {
    m.population_size = j.value("population_size", m.population_size);
    m.crossover_rate = j.value("crossover_rate", m.crossover_rate);
    m.mutation_rate = j.value("mutation_rate", m.mutation_rate);
    m.rng_seed = j.value("rng_seed", m.rng_seed);
    m.threads = j.value("threads", m.threads);
    if (j.contains("max_generations"))
        m.max_generations = j["max_generations"].is_null()
                                ? std::nullopt
                                : std::optional<std::size_t>(j["max_generations"].get<std::size_t>());
    if (j.contains("max_wall_clock_s"))
        m.max_wall_clock =
            j["max_wall_clock_s"].is_null()
                ? std::nullopt
                : std::optional<std::chrono::duration<double>>(j["max_wall_clock_s"].get<double>());
    return m;
}

// Accepts EUR/MWh as a bare number or {"value": x, "unit": "EUR/kWh"}.
double price_from_json(const json& j) {
    if (j.is_number())
        return j.get<double>();
    return j.at("value").get<double>() * unit_factor(j.value("unit", "EUR/MWh"), "EUR/MWh");
}

} // namespace

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.moga.max_wall_clock = std::chrono::duration<double>(3600.0);
    return c;
}

RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir) {
    try {
        RunConfig c = RunConfig::defaults();

        const auto& f = j.at("forecasts");
        c.forecasts.start = parse_iso8601(f.at("start").get<std::string>());
        c.forecasts.base_dir = f.contains("base_dir")
                                   ? std::filesystem::path(f["base_dir"].get<std::string>())
                                   : base_dir;
        for (const auto& [name, s] : f.at("signals").items()) {
            SignalSource src;
            src.file = s.at("file").get<std::string>();
            src.schema.value_column = s.value("column", name);
            src.schema.timestamp_column = s.value("timestamp_column", "timestamp");
            src.schema.unit = s.value("unit", "");
            const auto delim = s.value("delimiter", ",");
            if (delim.size() != 1)
                throw ConfigError("signal " + name + ": delimiter must be one character");
            src.schema.delimiter = delim[0];
            c.forecasts.signals.emplace(name, std::move(src));
        }
        if (f.contains("co2_dh") && !f["co2_dh"].is_null())
            c.forecasts.constants.co2_dh = f["co2_dh"].get<double>();
        c.forecasts.constants.co2_gas = f.value("co2_gas", 204.0);

        if (j.contains("grid")) {
            const auto& g = j["grid"];
            c.grid.h = g.value("h", c.grid.h);
            c.grid.dt = g.value("dt", c.grid.dt);
            c.grid.c_r = g.value("c_r", c.grid.c_r);
            c.grid.g_r = g.value("g_r", c.grid.g_r);
            c.grid.d_r = g.value("d_r", c.grid.d_r);
            c.grid.d_max = g.value("d_max", c.grid.d_max);
        }
        if (j.contains("economics")) {
            const auto& e = j["economics"];
            auto& p = c.economics;
            p.grid_capacity = e.value("grid_capacity", p.grid_capacity);
            if (e.contains("el_tariff"))
                p.el_tariff = price_from_json(e["el_tariff"]);
            p.gas_lhv = e.value("gas_lhv", p.gas_lhv);
            p.t_tes_min = e.value("t_tes_min", p.t_tes_min);
            p.t_tes_max = e.value("t_tes_max", p.t_tes_max);
            p.t_init = e.value("t_init", p.t_init);
            p.t_source = e.value("t_source", p.t_source);
        }
        if (j.contains("ratings")) {
            const auto& r = j["ratings"];
            auto& u = c.ratings;
            u.chp_heat_max = r.value("chp_heat_max", u.chp_heat_max);
            u.chp_el_max = r.value("chp_el_max", u.chp_el_max);
            u.chp_gas_max = r.value("chp_gas_max", u.chp_gas_max);
            u.gb_heat_max = r.value("gb_heat_max", u.gb_heat_max);
            u.gb_gas_max = r.value("gb_gas_max", u.gb_gas_max);
            u.hp_heat_max = r.value("hp_heat_max", u.hp_heat_max);
            u.hp_el_max = r.value("hp_el_max", u.hp_el_max);
            u.dh_max = r.value("dh_max", u.dh_max);
            u.tes_capacity = r.value("tes_capacity", u.tes_capacity);
            u.tes_temp_min = r.value("tes_temp_min", u.tes_temp_min);
            u.tes_temp_max = r.value("tes_temp_max", u.tes_temp_max);
        }
        if (j.contains("moga"))
            c.moga = moga_from_json(j["moga"], c.moga);
        if (j.contains("strategy"))
            c.strategy = parse_strategy(j["strategy"].get<std::string>());
        if (j.contains("loop") && !j["loop"].is_null()) {
            const auto& l = j["loop"];
            LoopConfig loop;
            loop.horizon = l.value("horizon", c.grid.h);
            loop.apply_count = l.value("apply_count", loop.apply_count);
            loop.episode_length = l.value("episode_length", loop.episode_length);
            loop.moga = l.contains("moga") ? moga_from_json(l["moga"], c.moga) : c.moga;
            loop.strategy = l.contains("strategy") ? parse_strategy(l["strategy"].get<std::string>())
                                                   : c.strategy;
            loop.mode = parse_loop_mode(l.value("mode", std::string("closed-loop")));
            c.loop = loop;
        }

        c.grid.validate();
        c.economics.validate();
        c.ratings.validate();
        c.moga.validate();
        if (c.loop)
            c.loop->validate();
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid run configuration: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid run configuration: ") + e.what());
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("invalid run configuration: ") + e.what());
    } catch (const ForecastError& e) {
        throw ConfigError(std::string("invalid run configuration: ") + e.what());
    }
}

json to_json(const RunConfig& c) {
    json signals = json::object();
    for (const auto& [name, s] : c.forecasts.signals)
        signals[name] = {{"file", s.file.string()},
                         {"column", s.schema.value_column},
                         {"timestamp_column", s.schema.timestamp_column},
                         {"unit", s.schema.unit},
                         {"delimiter", std::string(1, s.schema.delimiter)}};
    json f{{"start", format_iso8601(c.forecasts.start)},
           {"base_dir", c.forecasts.base_dir.string()},
           {"signals", signals},
           {"co2_gas", c.forecasts.constants.co2_gas}};
    f["co2_dh"] = c.forecasts.constants.co2_dh ? json(*c.forecasts.constants.co2_dh) : json(nullptr);

    json j;
    j["forecasts"] = f;
    j["grid"] = {{"h", c.grid.h}, {"dt", c.grid.dt}, {"c_r", c.grid.c_r},
                 {"g_r", c.grid.g_r}, {"d_r", c.grid.d_r}, {"d_max", c.grid.d_max}};
    const auto& p = c.economics;
    j["economics"] = {{"grid_capacity", p.grid_capacity}, {"el_tariff", p.el_tariff},
                      {"gas_lhv", p.gas_lhv},             {"t_tes_min", p.t_tes_min},
                      {"t_tes_max", p.t_tes_max},         {"t_init", p.t_init},
                      {"t_source", p.t_source}};
    const auto& u = c.ratings;
    j["ratings"] = {{"chp_heat_max", u.chp_heat_max}, {"chp_el_max", u.chp_el_max},
                    {"chp_gas_max", u.chp_gas_max},   {"gb_heat_max", u.gb_heat_max},
                    {"gb_gas_max", u.gb_gas_max},     {"hp_heat_max", u.hp_heat_max},
                    {"hp_el_max", u.hp_el_max},       {"dh_max", u.dh_max},
                    {"tes_capacity", u.tes_capacity}, {"tes_temp_min", u.tes_temp_min},
                    {"tes_temp_max", u.tes_temp_max}};
    j["moga"] = moga_to_json(c.moga);
    j["strategy"] = to_string(c.strategy);
    if (c.loop) {
        j["loop"] = {{"horizon", c.loop->horizon},
                     {"apply_count", c.loop->apply_count},
                     {"episode_length", c.loop->episode_length},
                     {"moga", moga_to_json(c.loop->moga)},
                     {"strategy", to_string(c.loop->strategy)},
                     {"mode", to_string(c.loop->mode)}};
    } else {
        j["loop"] = nullptr;
    }
    return j;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open configuration " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return run_config_from_json(j, std::filesystem::absolute(path).parent_path());
}

ForecastSet load_forecasts(const RunConfig& config, std::size_t horizon) {
    std::map<std::string, ForecastSeries> series;
    for (const auto& [name, src] : config.forecasts.signals) {
        auto path = src.file;
        if (path.is_relative() && !config.forecasts.base_dir.empty())
            path = config.forecasts.base_dir / path;
        auto s = read_forecast_file(path, src.schema);
        s.name = name;
        series.emplace(name, std::move(s));
    }
    return assemble_forecast_set(series, config.forecasts.constants, horizon,
                                 config.forecasts.start);
}

std::size_t episode_span(const LoopConfig& loop) {
    const std::size_t cycles = (loop.episode_length + loop.apply_count - 1) / loop.apply_count;
    return (cycles - 1) * loop.apply_count + loop.horizon;
}

} // namespace ghdispatch
