#pragma once

#include "ghdispatch/dispatch.hpp"
#include "ghdispatch/moga.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ghdispatch {

enum class Strategy { elitist_co2, utilitarian, elitist_cost };

Strategy parse_strategy(std::string_view name);
std::string to_string(Strategy s);

/// Thrown when no archive member satisfies every constraint.
class NoFeasibleSchedule : public std::runtime_error {
public:
    NoFeasibleSchedule() : std::runtime_error("no feasible schedule: the archive holds no valid solution") {}
};

/// Decision-maker view of an archive member. Sequence order is insertion order.
struct Candidate {
    std::uint64_t id = 0;
    ObjectiveVector objectives;
};

std::vector<Candidate> candidates_from(const moga::ParetoArchive& archive);

std::vector<Candidate> filter_valid(std::span<const Candidate> archive);

/// Min-max normalised (cost, co2) per solution; a flat objective maps to 0.
std::vector<std::pair<double, double>> normalize(std::span<const Candidate> solutions);

/// Picks one valid solution. Ties go to lower CO2, then lower cost, then the
/// earlier member.
Candidate decide(std::span<const Candidate> archive, Strategy strategy);

struct StrategyRow {
    Strategy strategy;
    std::uint64_t id = 0;
    double co2 = 0.0;
    double cost = 0.0;
    double co2_index = 100.0;  // percent of the elitist-CO2 row
    double cost_index = 100.0; // percent of the elitist-CO2 row
};

struct StrategyComparison {
    std::vector<StrategyRow> rows; // elitist-co2, utilitarian, elitist-cost
    double cost_saving = 0.0;      // EUR, elitist-co2 minus elitist-cost
    double cost_saving_pct = 0.0;
    double co2_increase = 0.0;     // kg, elitist-cost minus elitist-co2
    double co2_increase_pct = 0.0;
};

StrategyComparison compare_strategies(std::span<const Candidate> archive);

/// `strategy,co2_kg,cost_eur,co2_index,cost_index`
std::string comparison_csv(const StrategyComparison& comparison);

double round_to(double value, int decimals);

} // namespace ghdispatch
