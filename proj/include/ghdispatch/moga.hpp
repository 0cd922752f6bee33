#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ghdispatch::moga {

/// Seeded generator with platform-independent draws (the standard
/// distributions are implementation-defined, so they are avoided here).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t index(std::uint64_t n);
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    bool chance(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

/// Integer genes; gene k ranges over [0, domains[k]).
struct Genome {
    std::vector<int> genes;

    std::size_t size() const { return genes.size(); }
    bool operator==(const Genome&) const = default;
};

bool within_domains(const Genome& g, std::span<const int> domains);

struct Evaluation {
    std::vector<double> objectives; // all minimised
    bool valid = true;
};

struct Problem {
    std::vector<int> domains;
    std::function<Evaluation(const Genome&)> evaluate;
};

struct Member {
    Genome genome;
    std::vector<double> objectives;
    bool valid = false;
    /// Evaluation sequence number; unique within one run.
    std::uint64_t serial = 0;
};

/// a dominates b: no worse in every objective and strictly better in one.
bool dominates(std::span<const double> a, std::span<const double> b);

/// Unbounded non-dominated set over all objectives. Members keep insertion order.
class ParetoArchive {
public:
    struct InsertResult {
        bool added = false;
        std::size_t removed = 0;
    };

    InsertResult insert(Member candidate);

    const std::vector<Member>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

    const Member* find(std::uint64_t serial) const;

    /// Exhaustive pairwise check of the non-domination invariant.
    bool is_consistent() const;

private:
    std::vector<Member> members_;
};

struct MogaConfig {
    std::size_t population_size = 100;
    double crossover_rate = 0.5;
    double mutation_rate = 0.05;
    std::optional<std::size_t> max_generations;
    std::optional<std::chrono::duration<double>> max_wall_clock;
    std::uint64_t rng_seed = 1;
    /// Offspring evaluation workers; results never depend on this.
    unsigned threads = 1;

    void validate() const;
};

std::pair<Genome, Genome> select_parents(const ParetoArchive& archive, Rng& rng);

/// Swaps the tails of both parents from gene `cut` onwards.
std::pair<Genome, Genome> crossover_at(const Genome& p1, const Genome& p2, std::size_t cut);

/// With probability `rate`, crosses at a uniform cut in [1, len-1]; otherwise
/// returns copies.
std::pair<Genome, Genome> single_point_crossover(const Genome& p1, const Genome& p2, double rate,
                                                 Rng& rng);

/// Each gene is redrawn uniformly from its whole domain with probability `rate`.
Genome random_reset_mutation(Genome g, std::span<const int> domains, double rate, Rng& rng);

struct GenerationStats {
    std::size_t generation = 0;
    std::size_t evaluations = 0;
    std::size_t archive_size = 0;
    double min_cost = 0.0; // minimum of objective 0
    double min_co2 = 0.0;  // minimum of objective 1
    std::size_t valid_count = 0;
};

GenerationStats summarize(std::size_t generation, std::size_t evaluations,
                          const ParetoArchive& archive);

class Listener {
public:
    virtual ~Listener() = default;
    virtual void on_generation(const GenerationStats&, const ParetoArchive&) {}
    virtual void on_termination(const GenerationStats&, const ParetoArchive&) {}
    /// Polled between generations; returning true ends the run early.
    virtual bool stop_requested() const { return false; }
};

/// Collects per-generation statistics for CSV export.
class StatsRecorder : public Listener {
public:
    void on_generation(const GenerationStats& s, const ParetoArchive&) override {
        rows_.push_back(s);
    }
    const std::vector<GenerationStats>& rows() const { return rows_; }
    std::string csv() const;

private:
    std::vector<GenerationStats> rows_;
};

std::string generations_csv(const std::vector<GenerationStats>& rows);

/// Archive-based MOGA. Generation 0 is uniform random; every later generation
/// breeds population_size offspring from archive parents. All offspring are
/// archive-inserted in index order, so a fixed seed reproduces the archive.
ParetoArchive run(const Problem& problem, const MogaConfig& config,
                  std::span<Listener* const> listeners = {});

} // namespace ghdispatch::moga
