#include "ghdispatch/moga.hpp"
#include "ghdispatch/csv.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

namespace ghdispatch::moga {

std::uint64_t Rng::index(std::uint64_t n) {
    if (n == 0)
        throw std::invalid_argument("Rng::index on empty range");
    // Rejection sampling on the largest multiple of n.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

bool within_domains(const Genome& g, std::span<const int> domains) {
    if (g.size() != domains.size())
        return false;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.genes[k] < 0 || g.genes[k] >= domains[k])
            return false;
    return true;
}

bool dominates(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dominates: objective arity mismatch");
    bool strictly = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k])
            return false;
        if (a[k] < b[k])
            strictly = true;
    }
    return strictly;
}

ParetoArchive::InsertResult ParetoArchive::insert(Member candidate) {
    for (const auto& m : members_) {
        if (dominates(m.objectives, candidate.objectives))
            return {};
        if (m.objectives == candidate.objectives && m.genome == candidate.genome)
            return {};
    }
    const auto removed = std::erase_if(members_, [&](const Member& m) {
        return dominates(candidate.objectives, m.objectives);
    });
    members_.push_back(std::move(candidate));
    return {true, static_cast<std::size_t>(removed)};
}

const Member* ParetoArchive::find(std::uint64_t serial) const {
    for (const auto& m : members_)
        if (m.serial == serial)
            return &m;
    return nullptr;
}

bool ParetoArchive::is_consistent() const {
    for (std::size_t i = 0; i < members_.size(); ++i)
        for (std::size_t j = 0; j < members_.size(); ++j)
            if (i != j && dominates(members_[i].objectives, members_[j].objectives))
                return false;
    return true;
}

void MogaConfig::validate() const {
    if (population_size == 0)
        throw std::invalid_argument("population_size must be positive");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
        throw std::invalid_argument("crossover_rate must lie in [0, 1]");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
        throw std::invalid_argument("mutation_rate must lie in [0, 1]");
    if (!max_generations && !max_wall_clock)
        throw std::invalid_argument("at least one termination criterion is required");
    if (max_wall_clock && !(max_wall_clock->count() >= 0.0))
        throw std::invalid_argument("max_wall_clock must be non-negative");
}

std::pair<Genome, Genome> select_parents(const ParetoArchive& archive, Rng& rng) {
    if (archive.empty())
        throw std::logic_error("select_parents: archive is empty");
    const auto& m = archive.members();
    const auto a = rng.index(m.size());
    const auto b = rng.index(m.size());
    return {m[a].genome, m[b].genome};
}

std::pair<Genome, Genome> crossover_at(const Genome& p1, const Genome& p2, std::size_t cut) {
    if (p1.size() != p2.size())
        throw std::invalid_argument("crossover: parents differ in length");
    if (cut > p1.size())
        throw std::out_of_range("crossover: cut beyond genome");
    Genome c1 = p1;
    Genome c2 = p2;
    for (std::size_t k = cut; k < p1.size(); ++k)
        std::swap(c1.genes[k], c2.genes[k]);
    return {std::move(c1), std::move(c2)};
}

std::pair<Genome, Genome> single_point_crossover(const Genome& p1, const Genome& p2, double rate,
                                                 Rng& rng) {
    if (p1.size() != p2.size())
        throw std::invalid_argument("crossover: parents differ in length");
    if (p1.size() < 2 || !rng.chance(rate))
        return {p1, p2};
    const auto cut = 1 + rng.index(p1.size() - 1);
    return crossover_at(p1, p2, cut);
}

Genome random_reset_mutation(Genome g, std::span<const int> domains, double rate, Rng& rng) {
    if (g.size() != domains.size())
        throw std::invalid_argument("mutation: genome and domain lengths differ");
    for (std::size_t k = 0; k < g.size(); ++k)
        if (rng.chance(rate))
            g.genes[k] = static_cast<int>(rng.index(static_cast<std::uint64_t>(domains[k])));
    return g;
}

GenerationStats summarize(std::size_t generation, std::size_t evaluations,
                          const ParetoArchive& archive) {
    GenerationStats s;
    s.generation = generation;
    s.evaluations = evaluations;
    s.archive_size = archive.size();
    s.min_cost = std::numeric_limits<double>::infinity();
    s.min_co2 = std::numeric_limits<double>::infinity();
    for (const auto& m : archive.members()) {
        if (!m.objectives.empty())
            s.min_cost = std::min(s.min_cost, m.objectives[0]);
        if (m.objectives.size() > 1)
            s.min_co2 = std::min(s.min_co2, m.objectives[1]);
        if (m.valid)
            ++s.valid_count;
    }
    return s;
}

std::string generations_csv(const std::vector<GenerationStats>& rows) {
    std::string out = "generation,evaluations,archive_size,min_cost,min_co2,valid_count\n";
    for (const auto& r : rows)
        out += csv::row({std::to_string(r.generation), std::to_string(r.evaluations),
                         std::to_string(r.archive_size), csv::format_number(r.min_cost),
                         csv::format_number(r.min_co2), std::to_string(r.valid_count)});
    return out;
}

std::string StatsRecorder::csv() const { return generations_csv(rows_); }

namespace {

std::vector<Evaluation> evaluate_batch(const Problem& problem, const std::vector<Genome>& batch,
                                       unsigned threads, std::size_t generation) {
    std::vector<Evaluation> results(batch.size());
    std::vector<std::exception_ptr> errors(batch.size());
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < batch.size(); i += stride) {
            try {
                results[i] = problem.evaluate(batch[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), batch.size());
    if (workers <= 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work, w, workers);
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (!errors[i])
            continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw std::runtime_error("evaluation failed (generation " + std::to_string(generation) +
                                     ", individual " + std::to_string(i) + "): " + e.what());
        }
    }
    return results;
}

} // namespace

ParetoArchive run(const Problem& problem, const MogaConfig& config,
                  std::span<Listener* const> listeners) {
    config.validate();
    if (!problem.evaluate)
        throw std::invalid_argument("problem has no evaluation function");
    for (int d : problem.domains)
        if (d < 1)
            throw std::invalid_argument("every gene domain needs at least one value");

    using Clock = std::chrono::steady_clock;
    const auto started = Clock::now();
    const std::span<const int> domains = problem.domains;

    Rng rng(config.rng_seed);
    ParetoArchive archive;
    std::size_t evaluations = 0;
    std::uint64_t serial = 0;

    auto absorb = [&](std::vector<Genome>& batch, std::size_t generation) {
        auto results = evaluate_batch(problem, batch, config.threads, generation);
        evaluations += batch.size();
        for (std::size_t i = 0; i < batch.size(); ++i)
            archive.insert(Member{std::move(batch[i]), std::move(results[i].objectives),
                                  results[i].valid, serial++});
        const auto stats = summarize(generation, evaluations, archive);
        for (auto* l : listeners)
            l->on_generation(stats, archive);
        return stats;
    };

    std::vector<Genome> batch(config.population_size);
    for (auto& g : batch) {
        g.genes.resize(domains.size());
        for (std::size_t k = 0; k < domains.size(); ++k)
            g.genes[k] = static_cast<int>(rng.index(static_cast<std::uint64_t>(domains[k])));
    }
    auto stats = absorb(batch, 0);

    auto out_of_time = [&] {
        return config.max_wall_clock && Clock::now() - started >= *config.max_wall_clock;
    };

    for (std::size_t generation = 1;; ++generation) {
        if (config.max_generations && generation > *config.max_generations)
            break;
        if (out_of_time())
            break;
        if (std::any_of(listeners.begin(), listeners.end(),
                        [](const Listener* l) { return l->stop_requested(); }))
            break;
        batch.clear();
        while (batch.size() < config.population_size) {
            auto [p1, p2] = select_parents(archive, rng);
            auto [c1, c2] = single_point_crossover(p1, p2, config.crossover_rate, rng);
            batch.push_back(random_reset_mutation(std::move(c1), domains, config.mutation_rate, rng));
            if (batch.size() < config.population_size)
                batch.push_back(
                    random_reset_mutation(std::move(c2), domains, config.mutation_rate, rng));
        }
        stats = absorb(batch, generation);
    }

    for (auto* l : listeners)
        l->on_termination(stats, archive);
    return archive;
}

} // namespace ghdispatch::moga
