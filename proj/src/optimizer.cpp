#include "ghdispatch/optimizer.hpp"
#include "ghdispatch/csv.hpp"

#include <stdexcept>

namespace ghdispatch {

void PlanningProblem::validate() const {
    grid.validate();
    params.validate();
    ratings.validate();
    forecasts.validate();
    if (forecasts.size() < grid.h)
        throw std::invalid_argument("forecasts cover " + std::to_string(forecasts.size()) +
                                    " instants, horizon needs " + std::to_string(grid.h));
    if (grid.d_max > ratings.dh_max)
        throw DomainError("d_max", "exceeds the district heating rating");
}

moga::Problem make_problem(std::shared_ptr<const PlanningProblem> problem) {
    problem->validate();
    moga::Problem out;
    out.domains = genome_domains(problem->grid);
    out.evaluate = [problem](const moga::Genome& g) {
        const auto& p = *problem;
        const auto schedule = decode_genome(g.genes, p.grid);
        const auto sol = evaluate(schedule, p.forecasts, p.params, p.ratings, p.initial, p.grid.dt);
        const auto v = sol.objectives.as_array();
        return moga::Evaluation{{v.begin(), v.end()}, sol.valid};
    };
    return out;
}

PlanResult optimize(const PlanningProblem& problem, const moga::MogaConfig& config,
                    std::span<moga::Listener* const> extra_listeners) {
    auto shared = std::make_shared<const PlanningProblem>(problem);
    moga::StatsRecorder recorder;
    std::vector<moga::Listener*> listeners{&recorder};
    listeners.insert(listeners.end(), extra_listeners.begin(), extra_listeners.end());
    PlanResult result;
    result.archive = moga::run(make_problem(shared), config, listeners);
    result.generations = recorder.rows();
    return result;
}

EvaluatedSolution realize(const PlanningProblem& problem, const moga::Member& member) {
    const auto schedule = decode_genome(member.genome.genes, problem.grid);
    return evaluate(schedule, problem.forecasts, problem.params, problem.ratings, problem.initial,
                    problem.grid.dt);
}

std::string front_csv(const moga::ParetoArchive& archive) {
    std::string out = "id,cost,co2,v_el,v_tes,v_end,valid,genome\n";
    for (const auto& m : archive.members()) {
        std::vector<std::string> fields{std::to_string(m.serial)};
        for (double v : m.objectives)
            fields.push_back(csv::format_number(v));
        fields.push_back(m.valid ? "1" : "0");
        std::string genes;
        for (std::size_t k = 0; k < m.genome.genes.size(); ++k) {
            if (k)
                genes += ' ';
            genes += std::to_string(m.genome.genes[k]);
        }
        fields.push_back(std::move(genes));
        out += csv::row(fields);
    }
    return out;
}

} // namespace ghdispatch
