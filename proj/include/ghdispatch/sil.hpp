#pragma once

#include "ghdispatch/decision.hpp"
#include "ghdispatch/dispatch.hpp"
#include "ghdispatch/moga.hpp"
#include "ghdispatch/optimizer.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghdispatch {

enum class LoopMode { closed_loop, human_in_the_loop };

LoopMode parse_loop_mode(const std::string& name);
std::string to_string(LoopMode mode);

struct LoopConfig {
    std::size_t horizon = 168;
    std::size_t apply_count = 1;
    /// Total instants actuated over the episode.
    std::size_t episode_length = 24;
    /// Optimiser settings per cycle; cycle k uses rng_seed + k.
    moga::MogaConfig moga;
    Strategy strategy = Strategy::utilitarian;
    LoopMode mode = LoopMode::closed_loop;

    void validate() const;
};

struct ActuationResult {
    TesState state;
    std::vector<InstantRecord> records;
};

/// Applies on-grid setpoints to the plant starting from `state`. `forecasts`
/// must start at the first actuated instant. Invalid setpoints throw before
/// anything is computed.
ActuationResult actuate(const TesState& state, const Schedule& setpoints,
                        const ForecastSet& forecasts, const DecisionGrid& grid,
                        const EconomicParams& params, const UnitRatings& ratings);

class StaleEpoch : public std::runtime_error {
public:
    StaleEpoch(std::uint64_t expected, std::uint64_t actual)
        : std::runtime_error("emulator advanced (epoch " + std::to_string(actual) +
                             ", plan made at epoch " + std::to_string(expected) + "); re-plan"),
          expected_(expected), actual_(actual) {}
    std::uint64_t expected() const noexcept { return expected_; }
    std::uint64_t actual() const noexcept { return actual_; }

private:
    std::uint64_t expected_;
    std::uint64_t actual_;
};

/// Stage-1 plant emulator: a serialized state machine over simulated time.
/// The epoch increments on every actuation.
class Emulator {
public:
    Emulator(ForecastSet forecasts, DecisionGrid grid, EconomicParams params, UnitRatings ratings);

    const TesState& state() const { return state_; }
    std::size_t instant() const { return instant_; }
    std::uint64_t epoch() const { return epoch_; }
    const std::vector<InstantRecord>& history() const { return history_; }
    const ForecastSet& forecasts() const { return forecasts_; }
    UnixSeconds now() const;

    /// Problem over [instant, instant + horizon) anchored at the live storage
    /// state, with the end-temperature target re-anchored to it.
    PlanningProblem planning_problem(std::size_t horizon) const;

    ActuationResult actuate(const Schedule& setpoints,
                            std::optional<std::uint64_t> expected_epoch = std::nullopt);

private:
    ForecastSet forecasts_;
    DecisionGrid grid_;
    EconomicParams params_;
    UnitRatings ratings_;
    TesState state_;
    std::size_t instant_ = 0;
    std::uint64_t epoch_ = 0;
    std::vector<InstantRecord> history_;
};

struct CycleRecord {
    std::size_t cycle = 0;
    std::size_t instant = 0;
    UnixSeconds timestamp = 0;
    double planning_t_init = 0.0;
    TesState initial;
    bool fallback = false;
    std::string note;
    std::optional<std::uint64_t> solution_id;
    ObjectiveVector chosen;
    Schedule actuated;
    std::vector<InstantRecord> predicted; // chosen plan's actuated prefix
    std::vector<InstantRecord> realized;
    TesState final_state;
};

struct EpisodeLog {
    std::vector<CycleRecord> cycles;

    double total_cost() const;
    double total_co2() const;
    /// One row per actuated instant.
    std::string csv() const;
};

/// What the loop asks an operator in human-in-the-loop mode.
struct DecisionRequest {
    std::size_t cycle = 0;
    const PlanningProblem* problem = nullptr;
    const moga::ParetoArchive* archive = nullptr;
};

/// Returns the chosen member serial, or nullopt to fall back.
using DecisionHook = std::function<std::optional<std::uint64_t>(const DecisionRequest&)>;

/// Receding-horizon loop: plan, decide, actuate apply_count instants, repeat.
EpisodeLog run_episode(const LoopConfig& config, const ForecastSet& forecasts,
                       const DecisionGrid& grid, const EconomicParams& params,
                       const UnitRatings& ratings, const DecisionHook& hook = {});

} // namespace ghdispatch
