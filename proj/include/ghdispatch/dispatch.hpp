#pragma once

#include "ghdispatch/forecast.hpp"
#include "ghdispatch/plant.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace ghdispatch {

/// Discretisation of the decision space. Load-factor resolutions must divide
/// 1 and the district-heating resolution must divide its ceiling.
struct DecisionGrid {
    std::size_t h = 168;
    double dt = 3600.0;
    double c_r = 1.0;
    double g_r = 1.0 / 20.0;
    double d_r = 1.0e4;
    double d_max = 6.0e6;

    /// Number of non-zero steps for each decision (level count minus one).
    int chp_steps() const;
    int gb_steps() const;
    int dh_steps() const;

    void validate() const;
};

/// Per-instant setpoints for CHP, gas boiler, heat pump and district heating.
struct Schedule {
    std::vector<double> c;
    std::vector<double> g;
    std::vector<int> hp;
    std::vector<double> d;

    std::size_t size() const { return c.size(); }

    PlantInputs inputs_at(std::size_t i, double t_source) const {
        return PlantInputs{c[i], g[i], hp[i], t_source, d[i]};
    }

    /// Instants [offset, offset + count).
    Schedule slice(std::size_t offset, std::size_t count) const;

    static Schedule zeros(std::size_t h);

    bool operator==(const Schedule&) const = default;
};

/// Throws DomainError if any setpoint leaves the grid (range or resolution).
void validate_schedule(const Schedule& s, const DecisionGrid& grid);

/// Integer genome layout [C_0..C_h-1, G_0.., H_0.., D_0..], one gene per
/// decision; every genome decodes to an on-grid schedule.
std::vector<int> genome_domains(const DecisionGrid& grid);
Schedule decode_genome(const std::vector<int>& genes, const DecisionGrid& grid);
std::vector<int> encode_schedule(const Schedule& s, const DecisionGrid& grid);

struct EconomicParams {
    double grid_capacity = 12.0e6;  // W
    double el_tariff = 185.0;       // EUR/MWh on consumed electricity
    double gas_lhv = 0.0131;        // MWh/kg
    double t_tes_min = 43.96;       // degC
    double t_tes_max = 79.84;       // degC
    double t_init = 50.0;           // degC
    double t_source = 20.0;         // degC

    void validate() const;
};

struct InstantRecord {
    PlantOutputs outputs;
    TesState tes; // state at the end of the instant
    double cost_gas = 0.0;
    double cost_el = 0.0;
    double cost_dh = 0.0;
    double income_el = 0.0;
    double co2_gas = 0.0;
    double co2_el = 0.0;
    double co2_dh = 0.0;

    double cost() const { return cost_gas + cost_el + cost_dh - income_el; }
    double co2() const { return co2_gas + co2_el + co2_dh; }

    bool operator==(const InstantRecord&) const = default;
};

struct Trajectory {
    TesState initial;
    std::vector<InstantRecord> instants;

    std::size_t size() const { return instants.size(); }
};

struct ObjectiveVector {
    double cost = 0.0;  // EUR
    double co2 = 0.0;   // kg
    double v_el = 0.0;  // instants over grid capacity
    double v_tes = 0.0; // instants outside the storage band
    double v_end = 0.0; // degC below the initial storage temperature at the end

    static constexpr std::size_t arity = 5;

    std::array<double, arity> as_array() const { return {cost, co2, v_el, v_tes, v_end}; }
    static ObjectiveVector from_span(const double* v) { return {v[0], v[1], v[2], v[3], v[4]}; }

    bool valid() const { return v_el == 0.0 && v_tes == 0.0 && v_end == 0.0; }

    bool operator==(const ObjectiveVector&) const = default;
};

struct ConstraintDistances {
    double v_el = 0.0;
    double v_tes = 0.0;
    double v_end = 0.0;
};

struct EvaluatedSolution {
    Schedule schedule;
    Trajectory trajectory;
    ObjectiveVector objectives;
    bool valid = false;
};

/// Runs the schedule through the plant. The storage starts at `initial`, or at
/// params.t_init when absent. Throws std::invalid_argument on horizon mismatch.
Trajectory simulate(const Schedule& schedule, const ForecastSet& forecasts,
                    const EconomicParams& params, const UnitRatings& ratings,
                    std::optional<TesState> initial = std::nullopt, double dt = 3600.0);

double eval_cost(const Trajectory& trajectory);
double eval_co2(const Trajectory& trajectory, const ForecastSet& forecasts);
ConstraintDistances eval_constraints(const Trajectory& trajectory, const ForecastSet& forecasts,
                                     const EconomicParams& params);

EvaluatedSolution evaluate(const Schedule& schedule, const ForecastSet& forecasts,
                           const EconomicParams& params, const UnitRatings& ratings,
                           std::optional<TesState> initial = std::nullopt, double dt = 3600.0);

} // namespace ghdispatch
