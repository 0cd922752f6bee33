// Command-line front end: batch optimisation, closed-loop episodes and the
// HTTP service.

#include "ghdispatch/config.hpp"
#include "ghdispatch/decision.hpp"
#include "ghdispatch/optimizer.hpp"
#include "ghdispatch/service.hpp"
#include "ghdispatch/sil.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace ghdispatch;

namespace {

struct StageError : std::runtime_error {
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(what), stage(std::move(stage)) {}
    std::string stage;
};

template <class F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

RunConfig load_config(const fs::path& path, std::optional<std::uint64_t> seed) {
    auto config = stage("parse", [&] { return load_run_config(path); });
    if (seed)
        config.moga.rng_seed = *seed;
    return config;
}

int cmd_optimize(const fs::path& config_path, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed) {
    const auto config = load_config(config_path, seed);
    PlanningProblem problem;
    problem.forecasts = stage("assemble", [&] { return load_forecasts(config, config.grid.h); });
    problem.grid = config.grid;
    problem.params = config.economics;
    problem.ratings = config.ratings;

    const auto plan = stage("optimize", [&] { return optimize(problem, config.moga); });

    stage("export", [&] {
        fs::create_directories(out_dir);
        write_text(out_dir / "front.csv", front_csv(plan.archive));
        write_text(out_dir / "generations.csv", moga::generations_csv(plan.generations));
        write_text(out_dir / "config.json", to_json(config).dump(2) + "\n");
        try {
            write_text(out_dir / "comparison.csv",
                       comparison_csv(compare_strategies(candidates_from(plan.archive))));
        } catch (const NoFeasibleSchedule& e) {
            write_text(out_dir / "comparison.csv", "strategy,co2_kg,cost_eur,co2_index,cost_index\n");
            std::cerr << "warning: " << e.what() << "\n";
        }
        return 0;
    });

    std::size_t valid = 0;
    for (const auto& m : plan.archive.members())
        valid += m.valid;
    std::cout << "generations: " << (plan.generations.empty() ? 0 : plan.generations.back().generation)
              << "  archive: " << plan.archive.size() << "  valid: " << valid << "\n";
    return 0;
}

int cmd_episode(const fs::path& config_path, const fs::path& out_dir,
                std::optional<std::uint64_t> seed) {
    auto config = load_config(config_path, seed);
    if (!config.loop)
        throw StageError("parse", "configuration has no \"loop\" section");
    if (seed)
        config.loop->moga.rng_seed = *seed;
    const auto& loop = *config.loop;
    if (loop.mode != LoopMode::closed_loop)
        throw StageError("parse", "the CLI runs closed-loop episodes only; use the service for "
                                  "human-in-the-loop operation");

    const auto forecasts =
        stage("assemble", [&] { return load_forecasts(config, episode_span(loop)); });
    const auto log = stage("optimize", [&] {
        return run_episode(loop, forecasts, config.grid, config.economics, config.ratings);
    });
    stage("export", [&] {
        fs::create_directories(out_dir);
        write_text(out_dir / "episode.csv", log.csv());
        write_text(out_dir / "config.json", to_json(config).dump(2) + "\n");
        return 0;
    });
    std::size_t fallbacks = 0;
    for (const auto& c : log.cycles)
        fallbacks += c.fallback;
    std::cout << "cycles: " << log.cycles.size() << "  cost: " << log.total_cost()
              << " EUR  co2: " << log.total_co2() << " kg  fallbacks: " << fallbacks << "\n";
    return 0;
}

int cmd_serve(const std::string& bind, const std::optional<fs::path>& data_dir) {
    const auto [host, port] = service::parse_bind(bind);
    service::Service svc(data_dir);
    httplib::Server server;
    service::register_routes(server, svc);
    std::cout << "listening on " << host << ":" << port << std::endl;
    if (!server.listen(host, port)) {
        std::cerr << "error [serve]: cannot bind " << bind << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Greenhouse energy dispatch testbed"};
    app.require_subcommand(1);

    fs::path config_path, out_dir;
    std::optional<std::uint64_t> seed;

    auto* optimize_cmd = app.add_subcommand("optimize", "Evolve a Pareto front of dispatch schedules");
    optimize_cmd->add_option("config", config_path, "Run configuration (JSON)")->required();
    optimize_cmd->add_option("--out", out_dir, "Output directory")->required();
    optimize_cmd->add_option("--seed", seed, "Override the RNG seed");

    auto* episode_cmd = app.add_subcommand("episode", "Run a closed-loop receding-horizon episode");
    episode_cmd->add_option("config", config_path, "Run configuration (JSON)")->required();
    episode_cmd->add_option("--out", out_dir, "Output directory")->required();
    episode_cmd->add_option("--seed", seed, "Override the RNG seed");

    std::string bind = "127.0.0.1:8080";
    std::optional<fs::path> data_dir;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP/JSON operator API");
    serve_cmd->add_option("--bind", bind, "host:port to listen on");
    serve_cmd->add_option("--data", data_dir, "Directory for persisted run records");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*optimize_cmd)
            return cmd_optimize(config_path, out_dir, seed);
        if (*episode_cmd)
            return cmd_episode(config_path, out_dir, seed);
        return cmd_serve(bind, data_dir);
    } catch (const StageError& e) {
        std::cerr << "error [" << e.stage << "]: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
