#include "ghdispatch/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ghdispatch {

namespace {

constexpr double kGridTolerance = 1e-9;

int integral_ratio(const char* field, double numerator, double denominator) {
    if (!(denominator > 0.0) || !(numerator > 0.0))
        throw DomainError(field, "resolution and ceiling must be positive");
    const double ratio = numerator / denominator;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > kGridTolerance * std::max(1.0, ratio))
        throw DomainError(field, "resolution must divide its range into a whole number of steps");
    return static_cast<int>(rounded);
}

// Index of value on a grid with `steps` steps of width `step`, or nullopt.
std::optional<int> grid_index(double value, double step, int steps) {
    const double k = value / step;
    const double rounded = std::round(k);
    if (rounded < 0.0 || rounded > steps ||
        std::abs(k - rounded) > kGridTolerance * std::max(1.0, std::abs(k)))
        return std::nullopt;
    return static_cast<int>(rounded);
}

constexpr double kWhPerMWh = 1.0e6;

} // namespace

int DecisionGrid::chp_steps() const { return integral_ratio("c_r", 1.0, c_r); }
int DecisionGrid::gb_steps() const { return integral_ratio("g_r", 1.0, g_r); }
int DecisionGrid::dh_steps() const { return integral_ratio("d_r", d_max, d_r); }

void DecisionGrid::validate() const {
    if (h == 0)
        throw DomainError("h", "horizon must contain at least one instant");
    if (!(dt > 0.0))
        throw DomainError("dt", "instant duration must be positive");
    chp_steps();
    gb_steps();
    dh_steps();
}

Schedule Schedule::slice(std::size_t offset, std::size_t count) const {
    if (offset + count > size())
        throw std::out_of_range("schedule slice beyond horizon");
    const auto b = static_cast<std::ptrdiff_t>(offset);
    const auto e = static_cast<std::ptrdiff_t>(offset + count);
    return Schedule{{c.begin() + b, c.begin() + e},
                    {g.begin() + b, g.begin() + e},
                    {hp.begin() + b, hp.begin() + e},
                    {d.begin() + b, d.begin() + e}};
}

Schedule Schedule::zeros(std::size_t h) {
    return Schedule{std::vector<double>(h, 0.0), std::vector<double>(h, 0.0),
                    std::vector<int>(h, 0), std::vector<double>(h, 0.0)};
}

void validate_schedule(const Schedule& s, const DecisionGrid& grid) {
    const auto n = s.c.size();
    if (s.g.size() != n || s.hp.size() != n || s.d.size() != n)
        throw DomainError("schedule", "setpoint lists have unequal lengths");
    const double c_step = 1.0 / grid.chp_steps();
    const double g_step = 1.0 / grid.gb_steps();
    for (std::size_t i = 0; i < n; ++i) {
        const auto at = "[" + std::to_string(i) + "]";
        if (!grid_index(s.c[i], c_step, grid.chp_steps()))
            throw DomainError("c" + at, "CHP load factor off grid: " + std::to_string(s.c[i]));
        if (!grid_index(s.g[i], g_step, grid.gb_steps()))
            throw DomainError("g" + at, "GB load factor off grid: " + std::to_string(s.g[i]));
        if (s.hp[i] != 0 && s.hp[i] != 1)
            throw DomainError("hp" + at, "heat pump state must be 0 or 1");
        if (!grid_index(s.d[i], grid.d_r, grid.dh_steps()))
            throw DomainError("d" + at, "DH request off grid: " + std::to_string(s.d[i]));
    }
}

std::vector<int> genome_domains(const DecisionGrid& grid) {
    grid.validate();
    std::vector<int> domains;
    domains.reserve(4 * grid.h);
    domains.insert(domains.end(), grid.h, grid.chp_steps() + 1);
    domains.insert(domains.end(), grid.h, grid.gb_steps() + 1);
    domains.insert(domains.end(), grid.h, 2);
    domains.insert(domains.end(), grid.h, grid.dh_steps() + 1);
    return domains;
}

Schedule decode_genome(const std::vector<int>& genes, const DecisionGrid& grid) {
    const auto h = grid.h;
    if (genes.size() != 4 * h)
        throw std::invalid_argument("genome length " + std::to_string(genes.size()) +
                                    " does not match 4*h = " + std::to_string(4 * h));
    const double chp = grid.chp_steps();
    const double gb = grid.gb_steps();
    Schedule s = Schedule::zeros(h);
    for (std::size_t i = 0; i < h; ++i) {
        s.c[i] = genes[i] / chp;
        s.g[i] = genes[h + i] / gb;
        s.hp[i] = genes[2 * h + i];
        s.d[i] = genes[3 * h + i] * grid.d_r;
    }
    return s;
}

std::vector<int> encode_schedule(const Schedule& s, const DecisionGrid& grid) {
    validate_schedule(s, grid);
    const auto h = s.size();
    std::vector<int> genes(4 * h);
    for (std::size_t i = 0; i < h; ++i) {
        genes[i] = *grid_index(s.c[i], 1.0 / grid.chp_steps(), grid.chp_steps());
        genes[h + i] = *grid_index(s.g[i], 1.0 / grid.gb_steps(), grid.gb_steps());
        genes[2 * h + i] = s.hp[i];
        genes[3 * h + i] = *grid_index(s.d[i], grid.d_r, grid.dh_steps());
    }
    return genes;
}

void EconomicParams::validate() const {
    if (!(grid_capacity > 0.0))
        throw DomainError("grid_capacity", "must be positive");
    if (!(gas_lhv > 0.0))
        throw DomainError("gas_lhv", "must be positive");
    if (!(t_tes_min < t_tes_max))
        throw DomainError("t_tes_min", "must be below t_tes_max");
}

Trajectory simulate(const Schedule& schedule, const ForecastSet& forecasts,
                    const EconomicParams& params, const UnitRatings& ratings,
                    std::optional<TesState> initial, double dt) {
    const auto h = schedule.size();
    if (forecasts.size() < h)
        throw std::invalid_argument("horizon mismatch: schedule has " + std::to_string(h) +
                                    " instants, forecasts cover " +
                                    std::to_string(forecasts.size()));
    if (schedule.g.size() != h || schedule.hp.size() != h || schedule.d.size() != h)
        throw std::invalid_argument("schedule setpoint lists have unequal lengths");

    Trajectory traj;
    traj.initial = initial ? *initial : tes_state_at(params.t_init, ratings);
    traj.instants.resize(h);

    const double hours = dt / 3600.0;
    TesState state = traj.initial;
    for (std::size_t i = 0; i < h; ++i) {
        InstantRecord& rec = traj.instants[i];
        rec.outputs = evaluate_units(schedule.inputs_at(i, params.t_source), ratings);
        const PlantOutputs& o = rec.outputs;

        state = tes_step(state, o.heat_supply(), forecasts.heat_demand[i], dt, ratings);
        rec.tes = state;

        const double e_gas = (o.m_chp + o.m_gb) * dt * params.gas_lhv; // MWh
        const double e_hp = o.p_e_hp * hours / kWhPerMWh;
        const double e_dh = o.p_dh * hours / kWhPerMWh;
        const double e_chp = o.p_e_chp * hours / kWhPerMWh;

        rec.cost_gas = forecasts.gas_price[i] * e_gas;
        rec.cost_el = (forecasts.el_price[i] + params.el_tariff) * e_hp;
        rec.cost_dh = forecasts.dh_price[i] * e_dh;
        rec.income_el = forecasts.el_price[i] * e_chp;

        rec.co2_gas = forecasts.co2_gas * e_gas;
        rec.co2_el = forecasts.co2_el[i] * e_hp;
        rec.co2_dh = forecasts.co2_dh[i] * e_dh;
    }
    return traj;
}

double eval_cost(const Trajectory& trajectory) {
    double total = 0.0;
    for (const auto& rec : trajectory.instants)
        total += rec.cost();
    return total;
}

double eval_co2(const Trajectory& trajectory, const ForecastSet& forecasts) {
    if (forecasts.size() < trajectory.size())
        throw std::invalid_argument("horizon mismatch in eval_co2");
    double total = 0.0;
    for (const auto& rec : trajectory.instants)
        total += rec.co2();
    return total;
}

ConstraintDistances eval_constraints(const Trajectory& trajectory, const ForecastSet& forecasts,
                                     const EconomicParams& params) {
    ConstraintDistances v;
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        const auto& rec = trajectory.instants[i];
        if (forecasts.el_demand[i] + rec.outputs.p_e_hp > params.grid_capacity)
            v.v_el += 1.0;
        if (rec.tes.t_tes < params.t_tes_min || rec.tes.t_tes > params.t_tes_max)
            v.v_tes += 1.0;
    }
    const double t_end = trajectory.instants.empty() ? trajectory.initial.t_tes
                                                     : trajectory.instants.back().tes.t_tes;
    v.v_end = std::max(0.0, params.t_init - t_end);
    return v;
}

EvaluatedSolution evaluate(const Schedule& schedule, const ForecastSet& forecasts,
                           const EconomicParams& params, const UnitRatings& ratings,
                           std::optional<TesState> initial, double dt) {
    EvaluatedSolution sol;
    sol.schedule = schedule;
    sol.trajectory = simulate(schedule, forecasts, params, ratings, initial, dt);
    const auto v = eval_constraints(sol.trajectory, forecasts, params);
    sol.objectives = ObjectiveVector{eval_cost(sol.trajectory), eval_co2(sol.trajectory, forecasts),
                                     v.v_el, v.v_tes, v.v_end};
    sol.valid = sol.objectives.valid();
    return sol;
}

} // namespace ghdispatch
