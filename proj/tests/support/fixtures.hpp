#pragma once

// Synthetic inputs and independent oracles shared by the unit and
// acceptance suites. Nothing here calls the code paths it is used to check.

#include "ghdispatch/dispatch.hpp"
#include "ghdispatch/forecast.hpp"
#include "ghdispatch/moga.hpp"
#include "ghdispatch/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

namespace fixtures {

using namespace ghdispatch;

struct ConstantSignals {
    double heat_demand = 0.0;
    double el_demand = 0.0;
    double el_price = 0.0;
    double gas_price = 0.0;
    double dh_price = 0.0;
    double co2_el = 0.0;
    double co2_dh = 0.0;
    double co2_gas = 204.0;
};

inline ForecastSet constant_forecasts(std::size_t h, const ConstantSignals& s,
                                      UnixSeconds start = 1672531200 /* 2023-01-01 */) {
    ForecastSet f;
    f.start = start;
    f.heat_demand.assign(h, s.heat_demand);
    f.el_demand.assign(h, s.el_demand);
    f.el_price.assign(h, s.el_price);
    f.gas_price.assign(h, s.gas_price);
    f.dh_price.assign(h, s.dh_price);
    f.co2_el.assign(h, s.co2_el);
    f.co2_dh.assign(h, s.co2_dh);
    f.co2_gas = s.co2_gas;
    return f;
}

/// Deterministic day-shaped forecasts: prices and intensities vary by hour so
/// cost and CO2 conflict.
inline ForecastSet daily_forecasts(std::size_t h, double mean_heat = 3.0e6) {
    ForecastSet f;
    f.start = 1672531200;
    for (std::size_t i = 0; i < h; ++i) {
        const double phase = 2.0 * 3.14159265358979 * static_cast<double>(i % 24) / 24.0;
        f.heat_demand.push_back(mean_heat * (1.0 + 0.3 * std::cos(phase)));
        f.el_demand.push_back(8.0e5 + 2.0e5 * std::sin(phase));
        f.el_price.push_back(80.0 + 40.0 * std::sin(phase));
        f.gas_price.push_back(45.0);
        f.dh_price.push_back(55.0);
        f.co2_el.push_back(140.0 - 60.0 * std::sin(phase + 1.0));
        f.co2_dh.push_back(90.0);
    }
    f.co2_gas = 204.0;
    return f;
}

/// Gas conversion that puts the oversized gas-flow ratings in a plausible
/// cost range for synthetic instances.
inline constexpr double kSyntheticGasLhv = 1.2e-5;

/// h = 2 with a coarse grid: 36 options per instant, 1296 schedules.
inline PlanningProblem tiny_problem() {
    PlanningProblem p;
    p.grid.h = 2;
    p.grid.c_r = 1.0;
    p.grid.g_r = 0.5;
    p.grid.d_r = 3.0e6;
    p.grid.d_max = 6.0e6;
    ForecastSet f;
    f.start = 1672531200;
    f.heat_demand = {5.0e6, 3.0e6};
    f.el_demand = {1.0e6, 1.2e6};
    f.el_price = {40.0, 120.0};
    f.gas_price = {35.0, 35.0};
    f.dh_price = {60.0, 60.0};
    f.co2_el = {200.0, 60.0};
    f.co2_dh = {95.0, 95.0};
    f.co2_gas = 204.0;
    p.forecasts = f;
    p.params.gas_lhv = kSyntheticGasLhv;
    return p;
}

/// Every genome of a finite domain, in mixed-radix order.
inline std::vector<moga::Genome> enumerate_genomes(const std::vector<int>& domains) {
    std::vector<moga::Genome> out;
    std::vector<int> g(domains.size(), 0);
    while (true) {
        out.push_back(moga::Genome{g});
        std::size_t k = 0;
        while (k < g.size() && ++g[k] == domains[k])
            g[k++] = 0;
        if (k == g.size())
            break;
    }
    return out;
}

inline bool oracle_dominates(const std::vector<double>& a, const std::vector<double>& b) {
    bool no_worse = true, better = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        no_worse = no_worse && a[k] <= b[k];
        better = better || a[k] < b[k];
    }
    return no_worse && better;
}

/// Objective vectors not dominated by any other point (naive O(n^2)).
inline std::set<std::vector<double>> pareto_set(const std::vector<std::vector<double>>& points) {
    std::set<std::vector<double>> front;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j)
            dominated = j != i && oracle_dominates(points[j], points[i]);
        if (!dominated)
            front.insert(points[i]);
    }
    return front;
}

/// Direct check of the grid-capacity, storage-band and end-temperature
/// constraints on a trajectory.
inline bool constraints_hold(const Trajectory& t, const ForecastSet& f, const EconomicParams& p) {
    for (std::size_t i = 0; i < t.instants.size(); ++i) {
        const auto& r = t.instants[i];
        if (!(f.el_demand[i] + r.outputs.p_e_hp <= p.grid_capacity))
            return false;
        if (!(p.t_tes_min <= r.tes.t_tes && r.tes.t_tes <= p.t_tes_max))
            return false;
    }
    const double end = t.instants.empty() ? t.initial.t_tes : t.instants.back().tes.t_tes;
    return p.t_init <= end;
}

inline Schedule random_schedule(const DecisionGrid& grid, moga::Rng& rng) {
    const auto domains = genome_domains(grid);
    std::vector<int> genes(domains.size());
    for (std::size_t k = 0; k < genes.size(); ++k)
        genes[k] = static_cast<int>(rng.index(static_cast<std::uint64_t>(domains[k])));
    return decode_genome(genes, grid);
}

/// (cost EUR, co2 kg) of a known three-point valid front over 168 h.
inline std::vector<std::pair<double, double>> reference_front_points() {
    return {{68134.61, 126396.19}, {67464.70, 136423.81}, {67376.72, 142505.34}};
}

inline bool close_rel(double a, double b, double rel, double scale = 0.0) {
    const double ref = std::max({std::abs(a), std::abs(b), scale, 1e-300});
    return std::abs(a - b) <= rel * ref;
}

} // namespace fixtures
