#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sgrf/dataset.hpp"
#include "sgrf/forest.hpp"
#include "sgrf/rng.hpp"

namespace sgrf {

// GA chromosome: bit j selects feature j. Always carries at least one set
// bit; operators repair all-zero offspring.
using FeatureMask = std::vector<std::uint8_t>;

enum class SelectionOp { Tournament, Roulette };

struct GaConfig {
    int population_size = 100;
    int generations = 50;
    double crossover_rate = 0.8;
    double mutation_rate = 0.1;  // per bit
    int tournament_size = 3;
    int elitism_count = 2;
    double init_bit_probability = 0.5;
    SelectionOp selection = SelectionOp::Tournament;
    std::uint64_t seed = 0;
};

enum class FitnessMode { CvAccuracy, OobAccuracy };

struct FitnessSpec {
    FitnessMode mode = FitnessMode::CvAccuracy;
    int cv_folds = 3;
    // Wrapper-internal forest; smaller than the final classifier to keep the
    // search tractable.
    ForestConfig rf_config;
    std::uint64_t fitness_seed = 0;

    FitnessSpec() { rf_config.n_trees = 25; }
};

struct GaGenerationStats {
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    FeatureMask best_mask;
};

struct GaHistory {
    std::vector<GaGenerationStats> entries;  // generations + 1, index 0 = initial population
};

struct GaResult {
    FeatureMask best_mask;
    double best_fitness = 0.0;
    GaHistory history;
};

std::vector<FeatureMask> init_population(const GaConfig& cfg, std::size_t n_features);

// Classification accuracy of a forest restricted to the masked columns.
// Folds depend only on fitness_seed; the forest seed is a digest of
// (fitness_seed, mask bits), so a mask always scores the same value and
// results can be cached.
double evaluate_fitness(const FeatureMask& mask, const Dataset& ds, const FitnessSpec& spec);

// Draws tournament_size distinct contestants and returns the winner.
// Ties: higher fitness, then fewer selected features, then lower index.
std::size_t tournament_select(const std::vector<FeatureMask>& population,
                              const std::vector<double>& fitnesses, const GaConfig& cfg,
                              Rng& rng);
std::size_t roulette_select(const std::vector<double>& fitnesses, Rng& rng);

// Single-point crossover at a fixed cut in {1, ..., L-1}; children are NOT
// repaired here.
std::pair<FeatureMask, FeatureMask> crossover_at(const FeatureMask& a, const FeatureMask& b,
                                                 std::size_t cut);
std::pair<FeatureMask, FeatureMask> crossover(const FeatureMask& a, const FeatureMask& b,
                                              const GaConfig& cfg, Rng& rng);
FeatureMask mutate(const FeatureMask& mask, const GaConfig& cfg, Rng& rng);

using GaObserver = std::function<void(int generation, const std::vector<FeatureMask>& population,
                                      const std::vector<double>& fitnesses)>;

GaResult run_ga(const Dataset& ds, const GaConfig& cfg, const FitnessSpec& spec, int threads = 1,
                const GaObserver& observer = nullptr);

std::vector<std::string> mask_to_names(const FeatureMask& mask,
                                       const std::vector<std::string>& feature_names);
std::size_t mask_popcount(const FeatureMask& mask);
std::string history_to_csv(const GaHistory& history);

}  // namespace sgrf
