#pragma once

#include "ghdispatch/config.hpp"
#include "ghdispatch/decision.hpp"
#include "ghdispatch/optimizer.hpp"
#include "ghdispatch/sil.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace ghdispatch::service {

/// Service errors carry the HTTP status they map to and a machine-readable reason.
class ServiceError : public std::runtime_error {
public:
    ServiceError(int status, std::string reason, const std::string& what)
        : std::runtime_error(what), status_(status), reason_(std::move(reason)) {}
    int status() const noexcept { return status_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    int status_;
    std::string reason_;
};

enum class RunStatus { pending, running, terminated, failed };
std::string to_string(RunStatus s);

struct Run;

/// Run registry plus the single emulator. Every public method is thread-safe.
class Service {
public:
    explicit Service(std::optional<std::filesystem::path> data_dir = std::nullopt);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Starts an optimisation on a background worker and returns its id.
    /// With plan_from_emulator the run optimises from the emulator's live state
    /// and may later be actuated while the emulator epoch is unchanged.
    std::string create_run(const RunConfig& config, bool plan_from_emulator = false);

    /// Registers an externally computed front as a terminated run.
    std::string import_front(const std::vector<ObjectiveVector>& points);

    RunStatus status(const std::string& id) const;
    /// Blocks until the run reaches a terminal status.
    RunStatus wait(const std::string& id) const;
    void cancel(const std::string& id);

    nlohmann::json run_json(const std::string& id) const;
    nlohmann::json front_json(const std::string& id) const;
    std::string front_csv(const std::string& id) const;
    std::string generations_csv(const std::string& id) const;
    nlohmann::json events_json(const std::string& id, std::size_t since) const;
    nlohmann::json decision_json(const std::string& id, Strategy strategy) const;
    nlohmann::json comparison_json(const std::string& id) const;
    std::string comparison_csv(const std::string& id) const;

    nlohmann::json reset_emulator(const RunConfig& config);
    nlohmann::json emulator_json() const;
    nlohmann::json actuate(const std::string& run_id, std::uint64_t solution_id,
                           std::optional<std::size_t> count = std::nullopt);

private:
    std::shared_ptr<Run> get(const std::string& id) const;
    std::string next_id();
    void persist(const Run& run) const;
    void work(std::shared_ptr<Run> run);

    std::optional<std::filesystem::path> data_dir_;

    mutable std::mutex runs_mutex_;
    std::map<std::string, std::shared_ptr<Run>> runs_;
    std::size_t run_counter_ = 0;
    std::vector<std::jthread> workers_;

    mutable std::mutex emulator_mutex_;
    std::optional<Emulator> emulator_;
    std::optional<RunConfig> emulator_config_;
    std::uint64_t emulator_generation_ = 0;
};

/// Installs the JSON API routes on an httplib server.
void register_routes(httplib::Server& server, Service& service);

/// Splits "host:port"; a bare port binds 0.0.0.0.
std::pair<std::string, int> parse_bind(const std::string& bind);

} // namespace ghdispatch::service
