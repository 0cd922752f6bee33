#include "ghdispatch/decision.hpp"
#include "ghdispatch/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>

namespace ghdispatch {

Strategy parse_strategy(std::string_view name) {
    if (name == "elitist-co2" || name == "min-co2")
        return Strategy::elitist_co2;
    if (name == "elitist-cost" || name == "min-cost")
        return Strategy::elitist_cost;
    if (name == "utilitarian" || name == "compromise")
        return Strategy::utilitarian;
    throw std::invalid_argument("unknown decision strategy '" + std::string(name) + "'");
}

std::string to_string(Strategy s) {
    switch (s) {
    case Strategy::elitist_co2: return "elitist-co2";
    case Strategy::utilitarian: return "utilitarian";
    case Strategy::elitist_cost: return "elitist-cost";
    }
    return "unknown";
}

std::vector<Candidate> candidates_from(const moga::ParetoArchive& archive) {
    std::vector<Candidate> out;
    out.reserve(archive.size());
    for (const auto& m : archive.members())
        out.push_back({m.serial, ObjectiveVector::from_span(m.objectives.data())});
    return out;
}

std::vector<Candidate> filter_valid(std::span<const Candidate> archive) {
    std::vector<Candidate> out;
    for (const auto& c : archive)
        if (c.objectives.valid())
            out.push_back(c);
    return out;
}

std::vector<std::pair<double, double>> normalize(std::span<const Candidate> solutions) {
    if (solutions.empty())
        throw std::invalid_argument("normalize: empty solution set");
    auto [cmin, cmax] = std::minmax_element(solutions.begin(), solutions.end(),
        [](const Candidate& a, const Candidate& b) { return a.objectives.cost < b.objectives.cost; });
    auto [emin, emax] = std::minmax_element(solutions.begin(), solutions.end(),
        [](const Candidate& a, const Candidate& b) { return a.objectives.co2 < b.objectives.co2; });
    const double c_lo = cmin->objectives.cost, c_span = cmax->objectives.cost - c_lo;
    const double e_lo = emin->objectives.co2, e_span = emax->objectives.co2 - e_lo;

    std::vector<std::pair<double, double>> out;
    out.reserve(solutions.size());
    for (const auto& s : solutions)
        out.emplace_back(c_span > 0.0 ? (s.objectives.cost - c_lo) / c_span : 0.0,
                         e_span > 0.0 ? (s.objectives.co2 - e_lo) / e_span : 0.0);
    return out;
}

Candidate decide(std::span<const Candidate> archive, Strategy strategy) {
    const auto valid = filter_valid(archive);
    if (valid.empty())
        throw NoFeasibleSchedule();

    std::vector<double> score(valid.size());
    if (strategy == Strategy::utilitarian) {
        const auto norm = normalize(valid);
        for (std::size_t i = 0; i < valid.size(); ++i)
            score[i] = norm[i].first + norm[i].second;
    } else {
        for (std::size_t i = 0; i < valid.size(); ++i)
            score[i] = strategy == Strategy::elitist_cost ? valid[i].objectives.cost
                                                          : valid[i].objectives.co2;
    }

    std::size_t best = 0;
    auto key = [&](std::size_t i) {
        return std::tuple(score[i], valid[i].objectives.co2, valid[i].objectives.cost);
    };
    for (std::size_t i = 1; i < valid.size(); ++i)
        if (key(i) < key(best))
            best = i;
    return valid[best];
}

double round_to(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

StrategyComparison compare_strategies(std::span<const Candidate> archive) {
    StrategyComparison out;
    for (Strategy s : {Strategy::elitist_co2, Strategy::utilitarian, Strategy::elitist_cost}) {
        const auto c = decide(archive, s);
        out.rows.push_back({s, c.id, c.objectives.co2, c.objectives.cost, 100.0, 100.0});
    }
    const auto& base = out.rows.front();
    for (auto& r : out.rows) {
        r.co2_index = base.co2 != 0.0 ? round_to(100.0 * r.co2 / base.co2, 2) : 100.0;
        r.cost_index = base.cost != 0.0 ? round_to(100.0 * r.cost / base.cost, 2) : 100.0;
    }
    const auto& cheapest = out.rows.back();
    out.cost_saving = round_to(base.cost - cheapest.cost, 2);
    out.co2_increase = round_to(cheapest.co2 - base.co2, 2);
    out.cost_saving_pct =
        base.cost != 0.0 ? round_to(100.0 * (base.cost - cheapest.cost) / base.cost, 2) : 0.0;
    out.co2_increase_pct =
        base.co2 != 0.0 ? round_to(100.0 * (cheapest.co2 - base.co2) / base.co2, 2) : 0.0;
    return out;
}

std::string comparison_csv(const StrategyComparison& comparison) {
    std::string out = "strategy,co2_kg,cost_eur,co2_index,cost_index\n";
    char co2_idx[32], cost_idx[32];
    for (const auto& r : comparison.rows) {
        std::snprintf(co2_idx, sizeof co2_idx, "%.2f", r.co2_index);
        std::snprintf(cost_idx, sizeof cost_idx, "%.2f", r.cost_index);
        out += csv::row({to_string(r.strategy), csv::format_number(r.co2),
                         csv::format_number(r.cost), co2_idx, cost_idx});
    }
    return out;
}

} // namespace ghdispatch
