#pragma once

#include "feedsim/controller.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

namespace feedsim {

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Axis-aligned search box.
struct Box {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    Eigen::Index dim() const { return lo.size(); }
    bool contains(const Eigen::VectorXd& x) const;
    static Box from(const GainBounds& b);
    static Box cube(Eigen::Index dim, double lo, double hi);
};

void validate(const Box& box);

/// Folds an out-of-range coordinate back as lo + |x - lo| mod (hi - lo).
double map_into(double x, double lo, double hi);
Eigen::VectorXd map_into(const Eigen::VectorXd& x, const Box& box);

enum class FwaSelection { kEliteRandom, kDistance };

struct FwaConfig {
    int generations = 50;
    int n_fireworks = 6;        // "Explosion number"
    int total_sparks = 20;      // "Spark number"
    int gauss_sparks = 5;       // "Mutation spark number"
    double amplitude_max = 5.0; // "Explosion radius"
    double spark_floor_frac = 0.04;
    double spark_ceil_frac = 0.8;
    double epsilon = 1e-12;
    FwaSelection selection = FwaSelection::kEliteRandom;
    std::uint64_t seed = 0;
};

void validate(const FwaConfig& cfg);

struct GaConfig {
    int generations = 50;
    int population = 20;
    int gene_length_bits = 10;
    double crossover_rate = 0.8;
    double mutation_rate = 0.01;
    std::uint64_t seed = 0;
};

void validate(const GaConfig& cfg);

struct OptResult {
    Eigen::VectorXd best;
    double best_W = 0.0;
    std::vector<double> history;  // best-so-far after each generation
    std::size_t evaluations = 0;
    std::uint64_t seed = 0;
};

/// Evaluates a batch of candidates, results in candidate order regardless of
/// how many workers share the work.
struct BatchEvaluator {
    int jobs = 1;
    std::vector<double> operator()(const Objective& f, const std::vector<Eigen::VectorXd>& xs) const;
};

/// Fireworks algorithm. Per generation the random stream is consumed in this
/// order: explosion sparks firework by firework (dimension count, dimension
/// picks, displacement), then Gaussian sparks (firework pick, factor,
/// dimension count, dimension picks), then selection.
OptResult fwa_minimize(const Objective& f, const Box& box, const FwaConfig& cfg,
                       const BatchEvaluator& eval = {});

/// Binary-coded GA: rank roulette, single-point crossover, per-bit mutation,
/// one elite.
OptResult ga_minimize(const Objective& f, const Box& box, const GaConfig& cfg,
                      const BatchEvaluator& eval = {});

/// Decodes `bits` unsigned integers per coordinate, MSB first.
Eigen::VectorXd decode(const std::vector<std::uint8_t>& chromosome, const Box& box, int bits);

using AlgoConfig = std::variant<FwaConfig, GaConfig>;

struct StabilityReport {
    std::vector<OptResult> runs;
    std::vector<double> best_W;
    double spread = 0.0;           // max - min
    double relative_spread = 0.0;  // spread / mean
};

/// Repeats the optimizer with seeds master_seed + i.
StabilityReport stability_trial(const Objective& f, const Box& box, const AlgoConfig& algo,
                                int repeats, std::uint64_t master_seed,
                                const BatchEvaluator& eval = {});

StabilityReport summarize_spread(std::vector<double> values);

}  // namespace feedsim
