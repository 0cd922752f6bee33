#pragma once

#include "ghdispatch/dispatch.hpp"
#include "ghdispatch/moga.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ghdispatch {

/// Everything needed to evaluate a dispatch genome.
struct PlanningProblem {
    DecisionGrid grid;
    ForecastSet forecasts; // at least grid.h instants
    EconomicParams params;
    UnitRatings ratings;
    std::optional<TesState> initial; // defaults to params.t_init

    void validate() const;
};

/// Adapts the dispatch evaluation to the generic engine. Objectives are
/// (cost, co2, v_el, v_tes, v_end).
moga::Problem make_problem(std::shared_ptr<const PlanningProblem> problem);

struct PlanResult {
    moga::ParetoArchive archive;
    std::vector<moga::GenerationStats> generations;
};

PlanResult optimize(const PlanningProblem& problem, const moga::MogaConfig& config,
                    std::span<moga::Listener* const> extra_listeners = {});

/// Re-simulates an archive member into its full schedule and trajectory.
EvaluatedSolution realize(const PlanningProblem& problem, const moga::Member& member);

/// `id,cost,co2,v_el,v_tes,v_end,valid,genome`, one row per archive member in
/// insertion order; genes are space-separated.
std::string front_csv(const moga::ParetoArchive& archive);

} // namespace ghdispatch
