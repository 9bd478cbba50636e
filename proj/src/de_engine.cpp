#include "uavdc/de_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "uavdc/errors.hpp"

namespace uavdc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double sanitize(double f) { return std::isfinite(f) ? f : kInf; }

std::vector<double> evaluate(const FitnessFn& fitness, const Population& genomes, int generation, int threads) {
    std::vector<double> out(genomes.size(), kInf);
    detail::parallel_for(genomes.size(), threads, [&](std::size_t i) {
        try {
            out[i] = sanitize(fitness(genomes[i]));
        } catch (const std::exception& e) {
            throw OptimizationError(generation, i, e.what());
        } catch (...) {
            throw OptimizationError(generation, i, "unknown exception");
        }
    });
    return out;
}

GenerationRecord summarize(int generation, const std::vector<double>& fit) {
    GenerationRecord rec;
    rec.generation = generation;
    rec.best_fitness = *std::min_element(fit.begin(), fit.end());
    double sum = 0.0;
    std::size_t finite = 0;
    for (const double f : fit)
        if (std::isfinite(f)) {
            sum += f;
            ++finite;
        }
    rec.mean_fitness = finite ? sum / static_cast<double>(finite) : kInf;
    return rec;
}

std::size_t argmin(const std::vector<double>& fit) {
    return static_cast<std::size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin());
}

}  // namespace

std::string to_string(DonorMode mode) { return mode == DonorMode::WeightedDonor ? "weighted-donor" : "base-r3"; }

DonorMode parse_donor_mode(std::string_view text) {
    if (text == "base-r3") return DonorMode::BaseR3;
    if (text == "weighted-donor") return DonorMode::WeightedDonor;
    throw ConfigError("donor_mode must be `base-r3` or `weighted-donor`, got `" + std::string(text) + "`");
}

void DeConfig::validate() const {
    if (population_size < 4) throw ConfigError("population_size must be at least 4 (mutation needs three other members)");
    if (max_generations < 0) throw ConfigError("max_generations must be non-negative");
    if (!(mutation_factor > 0.0 && mutation_factor <= 1.2)) throw ConfigError("mutation_factor must lie in (0, 1.2]");
    if (!(crossover_factor >= 0.0 && crossover_factor <= 1.0)) throw ConfigError("crossover_factor must lie in [0, 1]");
    if (!(blend_noise_sigma >= 0.0) || !std::isfinite(blend_noise_sigma))
        throw ConfigError("blend_noise_sigma must be non-negative");
    if (snapshot_interval < 0) throw ConfigError("snapshot_interval must be non-negative");
}

Population init_population(const DeConfig& config, std::size_t dim, Rng& rng) {
    config.validate();
    if (dim < 1) throw ConfigError("genome dimension must be at least 1");
    Population pop(static_cast<std::size_t>(config.population_size), Genome(dim));
    for (Genome& g : pop)
        for (double& key : g) key = rng.uniform();
    return pop;
}

Population init_population(const DeConfig& config, std::size_t dim) {
    Rng rng(config.seed);
    return init_population(config, dim, rng);
}

MutationDraw draw_mutation(std::size_t population_size, std::size_t target, DonorMode mode, Rng& rng) {
    if (population_size < 4) throw ConfigError("mutation needs a population of at least 4");
    MutationDraw d;
    do d.r1 = rng.index(population_size);
    while (d.r1 == target);
    do d.r2 = rng.index(population_size);
    while (d.r2 == target || d.r2 == d.r1);
    do d.r3 = rng.index(population_size);
    while (d.r3 == target || d.r3 == d.r1 || d.r3 == d.r2);
    if (mode == DonorMode::WeightedDonor)
        for (double& l : d.lambda) l = 1.0 - rng.uniform();  // (0, 1], keeps the weight sum positive
    return d;
}

Genome mutate(const Population& population, const MutationDraw& draw, const DeConfig& config) {
    const Genome& a = population.at(draw.r1);
    const Genome& b = population.at(draw.r2);
    const Genome& c = population.at(draw.r3);
    const double lsum = draw.lambda[0] + draw.lambda[1] + draw.lambda[2];
    Genome out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        double base = c[j];
        if (config.donor_mode == DonorMode::WeightedDonor)
            base = (draw.lambda[0] * a[j] + draw.lambda[1] * b[j] + draw.lambda[2] * c[j]) / lsum;
        out[j] = clamp01(base + config.mutation_factor * (a[j] - b[j]));
    }
    return out;
}

Genome mutate(const Population& population, std::size_t target, const DeConfig& config, Rng& rng) {
    return mutate(population, draw_mutation(population.size(), target, config.donor_mode, rng), config);
}

CrossoverDraw draw_crossover(std::size_t dim, const DeConfig& config, Rng& rng) {
    CrossoverDraw d;
    d.mask.resize(dim);
    d.alpha.resize(dim);
    d.noise.assign(dim, 0.0);
    for (double& u : d.mask) u = rng.uniform();
    d.forced_index = rng.index(dim);
    for (double& a : d.alpha) a = rng.uniform();
    if (config.blend_noise_sigma > 0.0)
        for (double& e : d.noise) e = rng.normal(0.0, config.blend_noise_sigma);
    return d;
}

Genome crossover(const Genome& parent, const Genome& mutant, const CrossoverDraw& draw, const DeConfig& config) {
    if (parent.size() != mutant.size()) throw ValidationError("mutant", "length differs from the parent genome");
    if (draw.mask.size() != parent.size() || draw.alpha.size() != parent.size() || draw.noise.size() != parent.size())
        throw ValidationError("crossover draw", "length differs from the parent genome");
    Genome trial = parent;
    for (std::size_t j = 0; j < parent.size(); ++j) {
        if (draw.mask[j] <= config.crossover_factor || j == draw.forced_index) {
            const double alpha = draw.alpha[j];
            trial[j] = clamp01(alpha * mutant[j] + (1.0 - alpha) * parent[j] + draw.noise[j]);
        }
    }
    return trial;
}

Genome crossover(const Genome& parent, const Genome& mutant, const DeConfig& config, Rng& rng) {
    if (parent.size() != mutant.size()) throw ValidationError("mutant", "length differs from the parent genome");
    return crossover(parent, mutant, draw_crossover(parent.size(), config, rng), config);
}

bool trial_survives(double parent_fitness, double trial_fitness) {
    return sanitize(trial_fitness) < sanitize(parent_fitness);
}

const Genome& select(const Genome& parent, const Genome& trial, const FitnessFn& fitness) {
    return trial_survives(fitness(parent), fitness(trial)) ? trial : parent;
}

OptimizeResult optimize(const FitnessFn& fitness, const DeConfig& config, std::size_t dim, const Population& seeds) {
    config.validate();
    Rng rng(config.seed);
    Population pop = init_population(config, dim, rng);
    if (seeds.size() > pop.size()) throw ConfigError("more seed genomes than population slots");
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (seeds[i].size() != dim) throw ConfigError("seed genome has the wrong dimension");
        for (std::size_t j = 0; j < dim; ++j) pop[i][j] = clamp01(seeds[i][j]);
    }

    OptimizeResult result;
    EvolutionTrace& trace = result.trace;
    std::vector<double> fit = evaluate(fitness, pop, 0, config.threads);
    trace.generations.push_back(summarize(0, fit));
    const auto snapshot = [&](int generation) {
        if (config.snapshot_interval > 0 && generation % config.snapshot_interval == 0)
            trace.snapshots.emplace_back(generation, pop[argmin(fit)]);
    };
    snapshot(0);

    const std::size_t np = pop.size();
    Population trials(np);
    for (int gen = 1; gen <= config.max_generations; ++gen) {
        for (std::size_t i = 0; i < np; ++i) {
            const MutationDraw md = draw_mutation(np, i, config.donor_mode, rng);
            const Genome mutant = mutate(pop, md, config);
            const CrossoverDraw cd = draw_crossover(dim, config, rng);
            trials[i] = crossover(pop[i], mutant, cd, config);
        }
        const std::vector<double> trial_fit = evaluate(fitness, trials, gen, config.threads);
        for (std::size_t i = 0; i < np; ++i) {
            if (trial_survives(fit[i], trial_fit[i])) {
                pop[i] = trials[i];
                fit[i] = trial_fit[i];
            }
        }
        trace.generations.push_back(summarize(gen, fit));
        snapshot(gen);
    }

    const std::size_t best = argmin(fit);
    result.best = pop[best];
    result.best_fitness = fit[best];
    trace.best = result.best;
    trace.best_fitness = result.best_fitness;
    return result;
}

}  // namespace uavdc
