#include "ghdispatch/config.hpp"
#include "support/dataset.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <sys/wait.h>

using namespace ghdispatch;
using nlohmann::json;
namespace fs = std::filesystem;
using fixtures::write_file;

namespace {

json small_config(const fs::path& dir, std::size_t h = 12) {
    auto f = fixtures::daily_forecasts(h);
    auto j = fixtures::write_dataset(dir, f);
    j["economics"] = {{"gas_lhv", fixtures::kSyntheticGasLhv}};
    j["moga"] = {{"population_size", 20}, {"max_generations", 15}, {"rng_seed", 5},
                 {"max_wall_clock_s", nullptr}};
    return j;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(GHDISPATCH_CLI_PATH) + " " + args + " >" + log.string() +
                            " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST_CASE("RunConfig JSON round trip") {
    fixtures::TempDir dir("cfg");
    auto j = small_config(dir.path());
    j["economics"]["el_tariff"] = {{"value", 0.2}, {"unit", "EUR/kWh"}};
    j["strategy"] = "elitist-cost";
    j["loop"] = {{"horizon", 6}, {"apply_count", 2}, {"episode_length", 4}};
    const auto c = run_config_from_json(j);
    CHECK(c.economics.el_tariff == doctest::Approx(200.0));
    CHECK(c.strategy == Strategy::elitist_cost);
    REQUIRE(c.loop);
    CHECK(c.loop->horizon == 6);
    CHECK(c.loop->moga.population_size == 20);
    CHECK(c.moga.max_generations == 15u);
    CHECK_FALSE(c.moga.max_wall_clock);

    const auto back = run_config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(episode_span(*c.loop) == 4 + 6 - 2);

    const auto f = load_forecasts(c, 12);
    CHECK(f.size() == 12);
    CHECK(f.heat_demand == fixtures::daily_forecasts(12).heat_demand);
}

TEST_CASE("RunConfig errors") {
    fixtures::TempDir dir("cfgerr");
    auto j = small_config(dir.path());
    SUBCASE("missing forecasts section") {
        j.erase("forecasts");
        CHECK_THROWS_AS(run_config_from_json(j), ConfigError);
    }
    SUBCASE("bad strategy") {
        j["strategy"] = "dictator";
        CHECK_THROWS_AS(run_config_from_json(j), ConfigError);
    }
    SUBCASE("defaults") {
        const auto d = RunConfig::defaults();
        CHECK(d.moga.population_size == 100);
        CHECK(d.moga.crossover_rate == 0.5);
        CHECK(d.moga.mutation_rate == 0.05);
        CHECK(d.moga.max_wall_clock->count() == 3600.0);
        CHECK(d.grid.h == 168);
    }
}

TEST_CASE("CLI optimize") {
    fixtures::TempDir dir("cli");
    write_file(dir.path() / "run.json", small_config(dir.path()).dump(2));
    const auto log = dir.path() / "log.txt";

    REQUIRE(run_cli("optimize " + (dir.path() / "run.json").string() + " --out " +
                        (dir.path() / "a").string(),
                    log) == 0);
    for (const char* name : {"front.csv", "generations.csv", "comparison.csv", "config.json"})
        CHECK(fs::exists(dir.path() / "a" / name));
    const auto front = fixtures::read_file(dir.path() / "a" / "front.csv");
    CHECK(front.rfind("id,cost,co2,v_el,v_tes,v_end,valid,genome\n", 0) == 0);
    const auto gens = fixtures::read_file(dir.path() / "a" / "generations.csv");
    CHECK(std::count(gens.begin(), gens.end(), '\n') == 17); // header + generations 0..15

    SUBCASE("byte-identical on rerun and from the written config") {
        REQUIRE(run_cli("optimize " + (dir.path() / "run.json").string() + " --out " +
                            (dir.path() / "b").string(),
                        log) == 0);
        CHECK(fixtures::read_file(dir.path() / "b" / "front.csv") == front);
        REQUIRE(run_cli("optimize " + (dir.path() / "a" / "config.json").string() + " --out " +
                            (dir.path() / "c").string(),
                        log) == 0);
        CHECK(fixtures::read_file(dir.path() / "c" / "front.csv") == front);
    }
    SUBCASE("seed override changes the run") {
        REQUIRE(run_cli("optimize " + (dir.path() / "run.json").string() + " --seed 77 --out " +
                            (dir.path() / "d").string(),
                        log) == 0);
        CHECK(fixtures::read_file(dir.path() / "d" / "front.csv") != front);
    }
}

TEST_CASE("CLI reports failing stage and file") {
    fixtures::TempDir dir("clierr");
    auto j = small_config(dir.path());
    fs::remove(dir.path() / "gas_price.csv");
    write_file(dir.path() / "run.json", j.dump());
    const auto log = dir.path() / "log.txt";
    CHECK(run_cli("optimize " + (dir.path() / "run.json").string() + " --out " +
                      (dir.path() / "o").string(),
                  log) == 2);
    const auto text = fixtures::read_file(log);
    CHECK(text.find("error [assemble]") != std::string::npos);
    CHECK(text.find("gas_price.csv") != std::string::npos);

    CHECK(run_cli("optimize " + (dir.path() / "nope.json").string() + " --out x", log) == 2);
    CHECK(fixtures::read_file(log).find("error [parse]") != std::string::npos);
}

TEST_CASE("CLI episode") {
    fixtures::TempDir dir("cliep");
    auto j = small_config(dir.path(), 10);
    j["loop"] = {{"horizon", 6}, {"apply_count", 2}, {"episode_length", 4}};
    write_file(dir.path() / "run.json", j.dump());
    const auto log = dir.path() / "log.txt";
    REQUIRE(run_cli("episode " + (dir.path() / "run.json").string() + " --out " +
                        (dir.path() / "e").string(),
                    log) == 0);
    const auto text = fixtures::read_file(dir.path() / "e" / "episode.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}
