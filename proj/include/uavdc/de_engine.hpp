#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "uavdc/rng.hpp"

namespace uavdc {

/// Random-key vector, every key in [0, 1].
using Genome = std::vector<double>;
using Population = std::vector<Genome>;

/// Mutation base: a single member (classic DE/rand/1) or the random convex
/// combination of the three sampled members.
enum class DonorMode { BaseR3, WeightedDonor };

std::string to_string(DonorMode mode);
DonorMode parse_donor_mode(std::string_view text);

struct DeConfig {
    int population_size = 60;
    int max_generations = 300;
    double mutation_factor = 0.7;   // (0, 1.2]
    double crossover_factor = 0.9;  // [0, 1]
    double blend_noise_sigma = 0.0;
    DonorMode donor_mode = DonorMode::BaseR3;
    std::uint64_t seed = 0;
    int snapshot_interval = 0;      // keep the best genome every N generations; 0 keeps none
    int threads = 1;                // fitness evaluations in flight

    /// Throws ConfigError.
    void validate() const;
};

struct GenerationRecord {
    int generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
};

struct EvolutionTrace {
    std::vector<GenerationRecord> generations;  // generation 0 is the initial population
    std::vector<std::pair<int, Genome>> snapshots;
    Genome best;
    double best_fitness = 0.0;
};

/// Must be safe to call concurrently. Non-finite results count as +inf.
using FitnessFn = std::function<double(std::span<const double>)>;

Population init_population(const DeConfig& config, std::size_t dim, Rng& rng);
Population init_population(const DeConfig& config, std::size_t dim);

/// Indices and donor weights for one mutation, r1 != r2 != r3 != target.
struct MutationDraw {
    std::size_t r1 = 0;
    std::size_t r2 = 0;
    std::size_t r3 = 0;
    std::array<double, 3> lambda{1.0, 1.0, 1.0};
};

MutationDraw draw_mutation(std::size_t population_size, std::size_t target, DonorMode mode, Rng& rng);

/// base + F (x_r1 - x_r2), clamped to [0, 1].
Genome mutate(const Population& population, const MutationDraw& draw, const DeConfig& config);
Genome mutate(const Population& population, std::size_t target, const DeConfig& config, Rng& rng);

/// Per-gene random numbers consumed by one crossover.
struct CrossoverDraw {
    std::vector<double> mask;   // gene j crosses when mask[j] <= F_c
    std::size_t forced_index = 0;
    std::vector<double> alpha;  // blend weight on the mutant gene
    std::vector<double> noise;  // additive error term
};

CrossoverDraw draw_crossover(std::size_t dim, const DeConfig& config, Rng& rng);

/// Binomial crossover whose crossing genes are the blend
/// alpha * mutant + (1 - alpha) * parent + noise, clamped to [0, 1].
Genome crossover(const Genome& parent, const Genome& mutant, const CrossoverDraw& draw, const DeConfig& config);
Genome crossover(const Genome& parent, const Genome& mutant, const DeConfig& config, Rng& rng);

/// Greedy one-to-one survival under minimisation; ties keep the parent.
bool trial_survives(double parent_fitness, double trial_fitness);
const Genome& select(const Genome& parent, const Genome& trial, const FitnessFn& fitness);

struct OptimizeResult {
    Genome best;
    double best_fitness = 0.0;
    EvolutionTrace trace;
};

/// Synchronous DE: all random draws for a generation come from one stream
/// before the trials are evaluated, so the result does not depend on
/// `threads`. `seeds` replace the first members of the initial population.
OptimizeResult optimize(const FitnessFn& fitness, const DeConfig& config, std::size_t dim,
                        const Population& seeds = {});

}  // namespace uavdc
