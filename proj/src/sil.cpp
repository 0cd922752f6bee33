#include "ghdispatch/sil.hpp"
#include "ghdispatch/csv.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace ghdispatch {

LoopMode parse_loop_mode(const std::string& name) {
    if (name == "closed-loop")
        return LoopMode::closed_loop;
    if (name == "human-in-the-loop")
        return LoopMode::human_in_the_loop;
    throw std::invalid_argument("unknown loop mode '" + name + "'");
}

std::string to_string(LoopMode mode) {
    return mode == LoopMode::closed_loop ? "closed-loop" : "human-in-the-loop";
}

void LoopConfig::validate() const {
    if (horizon == 0)
        throw std::invalid_argument("loop horizon must be positive");
    if (apply_count < 1 || apply_count > horizon)
        throw std::invalid_argument("apply_count must lie in [1, horizon]");
    if (episode_length == 0)
        throw std::invalid_argument("episode_length must be positive");
    moga.validate();
}

ActuationResult actuate(const TesState& state, const Schedule& setpoints,
                        const ForecastSet& forecasts, const DecisionGrid& grid,
                        const EconomicParams& params, const UnitRatings& ratings) {
    validate_schedule(setpoints, grid);
    if (setpoints.size() > forecasts.size())
        throw std::invalid_argument("actuation runs past the end of the forecasts");
    auto traj = simulate(setpoints, forecasts, params, ratings, state, grid.dt);
    ActuationResult out;
    out.state = traj.instants.empty() ? state : traj.instants.back().tes;
    out.records = std::move(traj.instants);
    return out;
}

Emulator::Emulator(ForecastSet forecasts, DecisionGrid grid, EconomicParams params,
                   UnitRatings ratings)
    : forecasts_(std::move(forecasts)), grid_(grid), params_(params), ratings_(ratings),
      state_(tes_state_at(params.t_init, ratings)) {
    forecasts_.validate();
    grid_.validate();
    params_.validate();
    ratings_.validate();
}

UnixSeconds Emulator::now() const {
    return forecasts_.start + static_cast<UnixSeconds>(instant_) * forecasts_.resolution;
}

PlanningProblem Emulator::planning_problem(std::size_t horizon) const {
    PlanningProblem p;
    p.grid = grid_;
    p.grid.h = horizon;
    p.forecasts = forecasts_.window(instant_, horizon);
    p.params = params_;
    p.params.t_init = state_.t_tes;
    p.ratings = ratings_;
    p.initial = state_;
    return p;
}

ActuationResult Emulator::actuate(const Schedule& setpoints,
                                  std::optional<std::uint64_t> expected_epoch) {
    if (expected_epoch && *expected_epoch != epoch_)
        throw StaleEpoch(*expected_epoch, epoch_);
    if (instant_ + setpoints.size() > forecasts_.size())
        throw std::invalid_argument("actuation runs past the end of the forecasts");
    const auto window = forecasts_.window(instant_, setpoints.size());
    auto result = ghdispatch::actuate(state_, setpoints, window, grid_, params_, ratings_);
    state_ = result.state;
    instant_ += setpoints.size();
    ++epoch_;
    history_.insert(history_.end(), result.records.begin(), result.records.end());
    return result;
}

double EpisodeLog::total_cost() const {
    double total = 0.0;
    for (const auto& c : cycles)
        for (const auto& r : c.realized)
            total += r.cost();
    return total;
}

double EpisodeLog::total_co2() const {
    double total = 0.0;
    for (const auto& c : cycles)
        for (const auto& r : c.realized)
            total += r.co2();
    return total;
}

std::string EpisodeLog::csv() const {
    std::string out = "cycle,instant,timestamp,fallback,solution_id,plan_cost,plan_co2,plan_v_el,"
                      "plan_v_tes,plan_v_end,chp,gb,hp,dh,t_tes,q_tes,cost,co2\n";
    for (const auto& c : cycles) {
        for (std::size_t k = 0; k < c.realized.size(); ++k) {
            const auto& r = c.realized[k];
            out += csv::row({std::to_string(c.cycle), std::to_string(c.instant + k),
                             format_iso8601(c.timestamp + static_cast<UnixSeconds>(k) * 3600),
                             c.fallback ? "1" : "0",
                             c.solution_id ? std::to_string(*c.solution_id) : "",
                             csv::format_number(c.chosen.cost), csv::format_number(c.chosen.co2),
                             csv::format_number(c.chosen.v_el), csv::format_number(c.chosen.v_tes),
                             csv::format_number(c.chosen.v_end), csv::format_number(c.actuated.c[k]),
                             csv::format_number(c.actuated.g[k]), std::to_string(c.actuated.hp[k]),
                             csv::format_number(c.actuated.d[k]), csv::format_number(r.tes.t_tes),
                             csv::format_number(r.tes.q_tes), csv::format_number(r.cost()),
                             csv::format_number(r.co2())});
        }
    }
    return out;
}

namespace {

// Member closest to feasibility: smallest total violation, then cost.
const moga::Member* least_violation(const moga::ParetoArchive& archive) {
    const moga::Member* best = nullptr;
    auto key = [](const moga::Member& m) {
        return std::tuple(m.objectives[2] + m.objectives[3] + m.objectives[4], m.objectives[0]);
    };
    for (const auto& m : archive.members())
        if (!best || key(m) < key(*best))
            best = &m;
    return best;
}

} // namespace

EpisodeLog run_episode(const LoopConfig& config, const ForecastSet& forecasts,
                       const DecisionGrid& grid, const EconomicParams& params,
                       const UnitRatings& ratings, const DecisionHook& hook) {
    config.validate();
    if (config.mode == LoopMode::human_in_the_loop && !hook)
        throw std::invalid_argument("human-in-the-loop mode needs a decision hook");

    const std::size_t cycles =
        (config.episode_length + config.apply_count - 1) / config.apply_count;
    const std::size_t last_start = (cycles - 1) * config.apply_count;
    if (last_start + config.horizon > forecasts.size())
        throw std::invalid_argument("forecasts cover " + std::to_string(forecasts.size()) +
                                    " instants; the episode needs " +
                                    std::to_string(last_start + config.horizon));

    Emulator emulator(forecasts, grid, params, ratings);
    EpisodeLog log;
    std::optional<Schedule> previous;
    std::size_t previous_used = 0;

    for (std::size_t k = 0; k < cycles; ++k) {
        const std::size_t count =
            std::min(config.apply_count, config.episode_length - emulator.instant());
        const auto problem = emulator.planning_problem(config.horizon);

        moga::MogaConfig mc = config.moga;
        mc.rng_seed = config.moga.rng_seed + k;
        const auto plan = optimize(problem, mc);

        CycleRecord rec;
        rec.cycle = k;
        rec.instant = emulator.instant();
        rec.timestamp = emulator.now();
        rec.planning_t_init = problem.params.t_init;
        rec.initial = emulator.state();

        const moga::Member* chosen = nullptr;
        if (config.mode == LoopMode::closed_loop) {
            try {
                const auto pick = decide(candidates_from(plan.archive), config.strategy);
                chosen = plan.archive.find(pick.id);
            } catch (const NoFeasibleSchedule& e) {
                rec.note = e.what();
            }
        } else {
            const auto id = hook(DecisionRequest{k, &problem, &plan.archive});
            if (id) {
                chosen = plan.archive.find(*id);
                if (!chosen)
                    throw std::invalid_argument("decision names unknown solution " +
                                                std::to_string(*id));
            } else {
                rec.note = "operator declined to choose";
            }
        }

        Schedule plan_schedule;
        if (chosen) {
            plan_schedule = decode_genome(chosen->genome.genes, problem.grid);
            rec.solution_id = chosen->serial;
            rec.chosen = ObjectiveVector::from_span(chosen->objectives.data());
        } else {
            rec.fallback = true;
            if (previous && previous->size() >= previous_used + count) {
                plan_schedule = previous->slice(previous_used, previous->size() - previous_used);
                rec.note += "; carried forward previous schedule";
            } else {
                const auto* m = least_violation(plan.archive);
                plan_schedule = decode_genome(m->genome.genes, problem.grid);
                rec.solution_id = m->serial;
                rec.note += "; no previous schedule left, using least-violation member";
            }
            // Objectives of the fallback plan over its remaining length.
            auto sub = problem;
            sub.grid.h = plan_schedule.size();
            sub.forecasts = problem.forecasts.window(0, plan_schedule.size());
            rec.chosen = evaluate(plan_schedule, sub.forecasts, sub.params, sub.ratings,
                                  sub.initial, sub.grid.dt)
                             .objectives;
        }

        auto predicted = simulate(plan_schedule, problem.forecasts.window(0, plan_schedule.size()),
                                  problem.params, problem.ratings, problem.initial, grid.dt);
        rec.predicted.assign(predicted.instants.begin(),
                             predicted.instants.begin() + static_cast<std::ptrdiff_t>(count));
        rec.actuated = plan_schedule.slice(0, count);

        auto result = emulator.actuate(rec.actuated, emulator.epoch());
        rec.realized = std::move(result.records);
        rec.final_state = result.state;

        previous = plan_schedule;
        previous_used = count;
        log.cycles.push_back(std::move(rec));
    }
    return log;
}

} // namespace ghdispatch
