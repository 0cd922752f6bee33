#include "ghdispatch/service.hpp"
#include "ghdispatch/csv.hpp"

#include <httplib.h>

#include <atomic>
#include <condition_variable>
#include <fstream>

namespace ghdispatch::service {

using nlohmann::json;

std::string to_string(RunStatus s) {
    switch (s) {
    case RunStatus::pending: return "pending";
    case RunStatus::running: return "running";
    case RunStatus::terminated: return "terminated";
    case RunStatus::failed: return "failed";
    }
    return "unknown";
}

struct FrontPoint {
    std::uint64_t id = 0;
    ObjectiveVector objectives;
    bool valid = false;
};

struct Run {
    std::string id;
    std::optional<RunConfig> config; // absent for imported fronts
    std::shared_ptr<const PlanningProblem> problem;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> emulator_binding; // (generation, epoch)

    mutable std::mutex mutex;
    mutable std::condition_variable changed;
    RunStatus status = RunStatus::pending;
    std::vector<moga::GenerationStats> generations;
    std::vector<FrontPoint> snapshot;
    std::optional<moga::ParetoArchive> archive;
    std::string front_csv;
    std::string error;
    std::atomic<bool> stop{false};
};

namespace {

ServiceError not_found(const std::string& what) { return {404, "not_found", what}; }
ServiceError conflict(const std::string& reason, const std::string& what) {
    return {409, reason, what};
}

std::vector<FrontPoint> points_of(const moga::ParetoArchive& archive) {
    std::vector<FrontPoint> out;
    out.reserve(archive.size());
    for (const auto& m : archive.members())
        out.push_back({m.serial, ObjectiveVector::from_span(m.objectives.data()), m.valid});
    return out;
}

json objectives_json(const ObjectiveVector& o) {
    return {{"cost", o.cost}, {"co2", o.co2}, {"v_el", o.v_el}, {"v_tes", o.v_tes},
            {"v_end", o.v_end}};
}

json stats_json(const moga::GenerationStats& s) {
    return {{"generation", s.generation},   {"evaluations", s.evaluations},
            {"archive_size", s.archive_size}, {"min_cost", s.min_cost},
            {"min_co2", s.min_co2},         {"valid_count", s.valid_count}};
}

json schedule_json(const Schedule& s) {
    return {{"chp", s.c}, {"gb", s.g}, {"hp", s.hp}, {"dh", s.d}};
}

json records_json(const std::vector<InstantRecord>& records) {
    json out = json::array();
    for (const auto& r : records)
        out.push_back({{"t_tes", r.tes.t_tes},
                       {"q_tes", r.tes.q_tes},
                       {"p_h_chp", r.outputs.p_h_chp},
                       {"p_e_chp", r.outputs.p_e_chp},
                       {"p_h_gb", r.outputs.p_h_gb},
                       {"p_h_hp", r.outputs.p_h_hp},
                       {"p_e_hp", r.outputs.p_e_hp},
                       {"p_dh", r.outputs.p_dh},
                       {"cost", r.cost()},
                       {"co2", r.co2()}});
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

class RunListener : public moga::Listener {
public:
    explicit RunListener(Run& run) : run_(run) {}

    void on_generation(const moga::GenerationStats& s, const moga::ParetoArchive& a) override {
        auto points = points_of(a);
        std::lock_guard lock(run_.mutex);
        run_.generations.push_back(s);
        run_.snapshot = std::move(points);
        run_.changed.notify_all();
    }
    bool stop_requested() const override { return run_.stop.load(); }

private:
    Run& run_;
};

} // namespace

Service::Service(std::optional<std::filesystem::path> data_dir) : data_dir_(std::move(data_dir)) {
    if (data_dir_)
        std::filesystem::create_directories(*data_dir_ / "runs");
}

Service::~Service() {
    {
        std::lock_guard lock(runs_mutex_);
        for (auto& [id, run] : runs_)
            run->stop = true;
    }
    workers_.clear(); // joins
}

std::string Service::next_id() { return "run-" + std::to_string(++run_counter_); }

std::shared_ptr<Run> Service::get(const std::string& id) const {
    std::lock_guard lock(runs_mutex_);
    const auto it = runs_.find(id);
    if (it == runs_.end())
        throw not_found("unknown run '" + id + "'");
    return it->second;
}

std::string Service::create_run(const RunConfig& config, bool plan_from_emulator) {
    auto run = std::make_shared<Run>();
    run->config = config;

    PlanningProblem problem;
    if (plan_from_emulator) {
        std::lock_guard lock(emulator_mutex_);
        if (!emulator_)
            throw conflict("no_emulator", "the emulator has not been initialised");
        const std::size_t horizon = config.loop ? config.loop->horizon : config.grid.h;
        const std::size_t left = emulator_->forecasts().size() - emulator_->instant();
        if (horizon > left)
            throw conflict("forecasts_exhausted",
                           "planning horizon " + std::to_string(horizon) + " exceeds the " +
                               std::to_string(left) + " instants the emulator has left");
        problem = emulator_->planning_problem(horizon);
        run->emulator_binding = std::pair(emulator_generation_, emulator_->epoch());
    } else {
        try {
            problem.forecasts = load_forecasts(config, config.grid.h);
        } catch (const std::exception& e) {
            throw ServiceError(400, "forecast_error", e.what());
        }
        problem.grid = config.grid;
        problem.params = config.economics;
        problem.ratings = config.ratings;
    }
    try {
        problem.validate();
    } catch (const std::exception& e) {
        throw ServiceError(400, "invalid_config", e.what());
    }
    run->problem = std::make_shared<const PlanningProblem>(std::move(problem));

    {
        std::lock_guard lock(runs_mutex_);
        run->id = next_id();
        runs_.emplace(run->id, run);
    }
    if (data_dir_) {
        const auto dir = *data_dir_ / "runs" / run->id;
        std::filesystem::create_directories(dir);
        write_file(dir / "config.json", to_json(config).dump(2) + "\n");
    }
    std::lock_guard lock(runs_mutex_);
    workers_.emplace_back([this, run] { work(run); });
    return run->id;
}

void Service::work(std::shared_ptr<Run> run) {
    {
        std::lock_guard lock(run->mutex);
        run->status = RunStatus::running;
        run->changed.notify_all();
    }
    try {
        RunListener listener(*run);
        moga::Listener* listeners[] = {&listener};
        auto archive = moga::run(make_problem(run->problem), run->config->moga, listeners);
        auto csv_text = ghdispatch::front_csv(archive);
        auto points = points_of(archive);
        std::lock_guard lock(run->mutex);
        run->archive = std::move(archive);
        run->front_csv = std::move(csv_text);
        run->snapshot = std::move(points);
        run->status = RunStatus::terminated;
    } catch (const std::exception& e) {
        std::lock_guard lock(run->mutex);
        run->error = e.what();
        run->status = RunStatus::failed;
    }
    persist(*run);
    run->changed.notify_all();
}

void Service::persist(const Run& run) const {
    if (!data_dir_)
        return;
    const auto dir = *data_dir_ / "runs" / run.id;
    std::filesystem::create_directories(dir);
    std::lock_guard lock(run.mutex);
    json status{{"id", run.id}, {"status", to_string(run.status)}, {"error", run.error}};
    write_file(dir / "status.json", status.dump(2) + "\n");
    if (run.status != RunStatus::terminated)
        return;
    write_file(dir / "front.csv", run.front_csv);
    write_file(dir / "generations.csv", moga::generations_csv(run.generations));
    try {
        write_file(dir / "comparison.csv",
                   ghdispatch::comparison_csv(compare_strategies(candidates_from(*run.archive))));
    } catch (const NoFeasibleSchedule&) {
        write_file(dir / "comparison.csv", "strategy,co2_kg,cost_eur,co2_index,cost_index\n");
    }
}

std::string Service::import_front(const std::vector<ObjectiveVector>& points) {
    auto run = std::make_shared<Run>();
    moga::ParetoArchive archive;
    std::uint64_t serial = 0;
    for (const auto& p : points) {
        const auto v = p.as_array();
        archive.insert(moga::Member{{}, {v.begin(), v.end()}, p.valid(), serial++});
    }
    run->snapshot = points_of(archive);
    run->front_csv = ghdispatch::front_csv(archive);
    run->archive = std::move(archive);
    run->status = RunStatus::terminated;
    {
        std::lock_guard lock(runs_mutex_);
        run->id = next_id();
        runs_.emplace(run->id, run);
    }
    persist(*run);
    return run->id;
}

RunStatus Service::status(const std::string& id) const {
    auto run = get(id);
    std::lock_guard lock(run->mutex);
    return run->status;
}

RunStatus Service::wait(const std::string& id) const {
    auto run = get(id);
    std::unique_lock lock(run->mutex);
    run->changed.wait(lock, [&] {
        return run->status == RunStatus::terminated || run->status == RunStatus::failed;
    });
    return run->status;
}

void Service::cancel(const std::string& id) { get(id)->stop = true; }

json Service::run_json(const std::string& id) const {
    auto run = get(id);
    std::lock_guard lock(run->mutex);
    json j{{"id", run->id},
           {"status", to_string(run->status)},
           {"generations", run->generations.size()},
           {"archive_size", run->snapshot.size()}};
    if (!run->generations.empty())
        j["latest"] = stats_json(run->generations.back());
    if (!run->error.empty())
        j["error"] = run->error;
    if (run->emulator_binding)
        j["emulator_epoch"] = run->emulator_binding->second;
    return j;
}

json Service::front_json(const std::string& id) const {
    auto run = get(id);
    std::lock_guard lock(run->mutex);
    json points = json::array();
    for (const auto& p : run->snapshot) {
        json o = objectives_json(p.objectives);
        o["id"] = p.id;
        o["valid"] = p.valid;
        points.push_back(std::move(o));
    }
    return {{"id", run->id}, {"status", to_string(run->status)}, {"points", points}};
}

std::string Service::front_csv(const std::string& id) const {
    auto run = get(id);
    std::lock_guard lock(run->mutex);
    if (run->status != RunStatus::terminated)
        throw conflict("run_not_terminated", "run " + id + " has not terminated");
    return run->front_csv;
}

std::string Service::generations_csv(const std::string& id) const {
    auto run = get(id);
    std::lock_guard lock(run->mutex);
    return moga::generations_csv(run->generations);
}

json Service::events_json(const std::string& id, std::size_t since) const {
    auto run = get(id);
    std::lock_guard lock(run->mutex);
    json events = json::array();
    for (std::size_t i = since; i < run->generations.size(); ++i)
        events.push_back(stats_json(run->generations[i]));
    return {{"status", to_string(run->status)},
            {"events", events},
            {"next", run->generations.size()}};
}

json Service::decision_json(const std::string& id, Strategy strategy) const {
    auto run = get(id);
    std::lock_guard lock(run->mutex);
    if (run->status != RunStatus::terminated)
        throw conflict("run_not_terminated", "run " + id + " has not terminated");
    Candidate pick;
    try {
        pick = decide(candidates_from(*run->archive), strategy);
    } catch (const NoFeasibleSchedule& e) {
        throw conflict("no_feasible_schedule", e.what());
    }
    json j{{"run", id},
           {"strategy", to_string(strategy)},
           {"solution_id", pick.id},
           {"objectives", objectives_json(pick.objectives)},
           {"valid", pick.objectives.valid()},
           {"schedule", nullptr},
           {"trajectory", nullptr}};
    if (run->problem) {
        const auto sol = realize(*run->problem, *run->archive->find(pick.id));
        j["schedule"] = schedule_json(sol.schedule);
        j["trajectory"] = records_json(sol.trajectory.instants);
    }
    return j;
}

json Service::comparison_json(const std::string& id) const {
    auto run = get(id);
    std::lock_guard lock(run->mutex);
    if (run->status != RunStatus::terminated)
        throw conflict("run_not_terminated", "run " + id + " has not terminated");
    StrategyComparison cmp;
    try {
        cmp = compare_strategies(candidates_from(*run->archive));
    } catch (const NoFeasibleSchedule& e) {
        throw conflict("no_feasible_schedule", e.what());
    }
    json rows = json::array();
    for (const auto& r : cmp.rows)
        rows.push_back({{"strategy", to_string(r.strategy)},
                        {"solution_id", r.id},
                        {"co2_kg", r.co2},
                        {"cost_eur", r.cost},
                        {"co2_index", r.co2_index},
                        {"cost_index", r.cost_index}});
    return {{"rows", rows},
            {"cost_saving", cmp.cost_saving},
            {"cost_saving_pct", cmp.cost_saving_pct},
            {"co2_increase", cmp.co2_increase},
            {"co2_increase_pct", cmp.co2_increase_pct}};
}

std::string Service::comparison_csv(const std::string& id) const {
    auto run = get(id);
    std::lock_guard lock(run->mutex);
    if (run->status != RunStatus::terminated)
        throw conflict("run_not_terminated", "run " + id + " has not terminated");
    try {
        return ghdispatch::comparison_csv(compare_strategies(candidates_from(*run->archive)));
    } catch (const NoFeasibleSchedule& e) {
        throw conflict("no_feasible_schedule", e.what());
    }
}

json Service::reset_emulator(const RunConfig& config) {
    const std::size_t span = config.loop ? episode_span(*config.loop) : config.grid.h;
    ForecastSet forecasts;
    try {
        forecasts = load_forecasts(config, span);
    } catch (const std::exception& e) {
        throw ServiceError(400, "forecast_error", e.what());
    }
    {
        std::lock_guard lock(emulator_mutex_);
        emulator_.emplace(std::move(forecasts), config.grid, config.economics, config.ratings);
        emulator_config_ = config;
        ++emulator_generation_;
    }
    return emulator_json();
}

json Service::emulator_json() const {
    std::lock_guard lock(emulator_mutex_);
    if (!emulator_)
        throw conflict("no_emulator", "the emulator has not been initialised");
    const auto& e = *emulator_;
    return {{"instant", e.instant()},
            {"epoch", e.epoch()},
            {"timestamp", format_iso8601(e.now())},
            {"t_tes", e.state().t_tes},
            {"q_tes", e.state().q_tes},
            {"remaining", e.forecasts().size() - e.instant()},
            {"mode", emulator_config_->loop ? to_string(emulator_config_->loop->mode)
                                            : std::string("human-in-the-loop")},
            {"awaiting_decision", e.instant() < e.forecasts().size()},
            {"history", records_json(e.history())}};
}

json Service::actuate(const std::string& run_id, std::uint64_t solution_id,
                      std::optional<std::size_t> count) {
    auto run = get(run_id);
    Schedule prefix;
    std::uint64_t epoch = 0;
    {
        std::lock_guard lock(run->mutex);
        if (!run->emulator_binding)
            throw conflict("not_planned_from_emulator",
                           "run " + run_id + " was not planned against the emulator");
        if (run->status != RunStatus::terminated)
            throw conflict("run_not_terminated", "run " + run_id + " has not terminated");
        const auto* member = run->archive->find(solution_id);
        if (!member)
            throw not_found("run " + run_id + " has no solution " + std::to_string(solution_id));
        if (!member->valid)
            throw ServiceError(422, "invalid_solution",
                               "solution " + std::to_string(solution_id) +
                                   " violates constraints and cannot be actuated");
        const auto schedule = decode_genome(member->genome.genes, run->problem->grid);
        std::size_t n = count.value_or(run->config && run->config->loop
                                           ? run->config->loop->apply_count
                                           : 1);
        if (n == 0 || n > schedule.size())
            throw ServiceError(400, "bad_count", "actuation count must lie in [1, horizon]");
        prefix = schedule.slice(0, n);
        epoch = run->emulator_binding->second;
    }

    json realized;
    {
        std::lock_guard lock(emulator_mutex_);
        if (!emulator_)
            throw conflict("no_emulator", "the emulator has not been initialised");
        const auto generation = run->emulator_binding->first;
        if (generation != emulator_generation_)
            throw conflict("stale_epoch", "the emulator was reset after this run was planned");
        try {
            auto result = emulator_->actuate(prefix, epoch);
            realized = records_json(result.records);
        } catch (const StaleEpoch& e) {
            throw conflict("stale_epoch", e.what());
        } catch (const std::exception& e) {
            throw ServiceError(400, "actuation_rejected", e.what());
        }
    }
    auto state = emulator_json();
    state["realized"] = std::move(realized);
    return state;
}

std::pair<std::string, int> parse_bind(const std::string& bind) {
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos)
        return {"0.0.0.0", std::stoi(bind)};
    return {bind.substr(0, colon), std::stoi(bind.substr(colon + 1))};
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <class F>
httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const ServiceError& e) {
            send_json(res, {{"error", e.what()}, {"reason", e.reason()}}, e.status());
        } catch (const json::exception& e) {
            send_json(res, {{"error", e.what()}, {"reason", "bad_request"}}, 400);
        } catch (const ConfigError& e) {
            send_json(res, {{"error", e.what()}, {"reason", "invalid_config"}}, 400);
        } catch (const std::invalid_argument& e) {
            send_json(res, {{"error", e.what()}, {"reason", "bad_request"}}, 400);
        } catch (const std::exception& e) {
            send_json(res, {{"error", e.what()}, {"reason", "internal"}}, 500);
        }
    };
}

// Accepts either a bare RunConfig or {"config": ..., "seed": N}.
RunConfig config_from_body(const json& body) {
    const json& cfg = body.contains("config") ? body["config"] : body;
    auto config = run_config_from_json(cfg, std::filesystem::current_path());
    if (body.contains("seed"))
        config.moga.rng_seed = body["seed"].get<std::uint64_t>();
    return config;
}

} // namespace

void register_routes(httplib::Server& server, Service& service) {
    server.Post("/runs", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto body = json::parse(req.body);
        const auto id = service.create_run(config_from_body(body),
                                           body.value("plan_from_emulator", false));
        send_json(res, service.run_json(id), 201);
    }));
    server.Post("/runs/import", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto body = json::parse(req.body);
        std::vector<ObjectiveVector> points;
        for (const auto& p : body.at("points"))
            points.push_back({p.at("cost").get<double>(), p.at("co2").get<double>(),
                              p.value("v_el", 0.0), p.value("v_tes", 0.0), p.value("v_end", 0.0)});
        send_json(res, service.run_json(service.import_front(points)), 201);
    }));
    server.Get(R"(/runs/([\w-]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
        send_json(res, service.run_json(req.matches[1]));
    }));
    server.Get(R"(/runs/([\w-]+)/front)",
               guarded([&](const httplib::Request& req, httplib::Response& res) {
                   send_json(res, service.front_json(req.matches[1]));
               }));
    server.Get(R"(/runs/([\w-]+)/front\.csv)",
               guarded([&](const httplib::Request& req, httplib::Response& res) {
                   res.set_content(service.front_csv(req.matches[1]), "text/csv");
               }));
    server.Get(R"(/runs/([\w-]+)/generations\.csv)",
               guarded([&](const httplib::Request& req, httplib::Response& res) {
                   res.set_content(service.generations_csv(req.matches[1]), "text/csv");
               }));
    server.Get(R"(/runs/([\w-]+)/events)",
               guarded([&](const httplib::Request& req, httplib::Response& res) {
                   const std::size_t since =
                       req.has_param("since") ? std::stoul(req.get_param_value("since")) : 0;
                   send_json(res, service.events_json(req.matches[1], since));
               }));
    server.Post(R"(/runs/([\w-]+)/decision)",
                guarded([&](const httplib::Request& req, httplib::Response& res) {
                    const auto body = req.body.empty() ? json::object() : json::parse(req.body);
                    const auto strategy = parse_strategy(body.value("strategy", "utilitarian"));
                    send_json(res, service.decision_json(req.matches[1], strategy));
                }));
    server.Get(R"(/runs/([\w-]+)/comparison)",
               guarded([&](const httplib::Request& req, httplib::Response& res) {
                   send_json(res, service.comparison_json(req.matches[1]));
               }));
    server.Get(R"(/runs/([\w-]+)/comparison\.csv)",
               guarded([&](const httplib::Request& req, httplib::Response& res) {
                   res.set_content(service.comparison_csv(req.matches[1]), "text/csv");
               }));
    server.Post(R"(/runs/([\w-]+)/cancel)",
                guarded([&](const httplib::Request& req, httplib::Response& res) {
                    service.cancel(req.matches[1]);
                    send_json(res, service.run_json(req.matches[1]));
                }));
    server.Post("/emulator", guarded([&](const httplib::Request& req, httplib::Response& res) {
        send_json(res, service.reset_emulator(config_from_body(json::parse(req.body))));
    }));
    server.Get("/emulator", guarded([&](const httplib::Request&, httplib::Response& res) {
        send_json(res, service.emulator_json());
    }));
    server.Post("/emulator/actuate",
                guarded([&](const httplib::Request& req, httplib::Response& res) {
                    const auto body = json::parse(req.body);
                    std::optional<std::size_t> count;
                    if (body.contains("count"))
                        count = body["count"].get<std::size_t>();
                    send_json(res, service.actuate(body.at("run_id").get<std::string>(),
                                                   body.at("solution_id").get<std::uint64_t>(),
                                                   count));
                }));
}

} // namespace ghdispatch::service
