#include "sgrf/gafs.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

#include "sgrf/csv.hpp"
#include "sgrf/errors.hpp"
#include "sgrf/eval.hpp"
#include "sgrf/parallel.hpp"

namespace sgrf {

namespace {

void validate_config(const GaConfig& cfg) {
    if (cfg.population_size < 1) throw ComputeError("ga: population_size must be >= 1");
    if (cfg.generations < 0) throw ComputeError("ga: generations must be >= 0");
    if (cfg.crossover_rate < 0.0 || cfg.crossover_rate > 1.0)
        throw ComputeError("ga: crossover_rate must be in [0,1]");
    if (cfg.mutation_rate < 0.0 || cfg.mutation_rate > 1.0)
        throw ComputeError("ga: mutation_rate must be in [0,1]");
    if (cfg.tournament_size < 1 || cfg.tournament_size > cfg.population_size)
        throw ComputeError("ga: tournament_size must be in [1, population_size]");
    if (cfg.elitism_count < 0 || cfg.elitism_count >= cfg.population_size)
        throw ComputeError("ga: elitism_count must be in [0, population_size)");
    if (cfg.init_bit_probability <= 0.0 || cfg.init_bit_probability > 1.0)
        throw ComputeError("ga: init_bit_probability must be in (0,1]");
}

void repair(FeatureMask& mask, Rng& rng) {
    if (std::any_of(mask.begin(), mask.end(), [](std::uint8_t b) { return b != 0; })) return;
    mask[rng.uniform_index(mask.size())] = 1;
}

// higher fitness > fewer selected features > lower population index
bool better(double fa, std::size_t bits_a, std::size_t ia, double fb, std::size_t bits_b,
            std::size_t ib) {
    if (fa != fb) return fa > fb;
    if (bits_a != bits_b) return bits_a < bits_b;
    return ia < ib;
}

}  // namespace

std::size_t mask_popcount(const FeatureMask& mask) {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

std::vector<std::string> mask_to_names(const FeatureMask& mask,
                                       const std::vector<std::string>& feature_names) {
    if (mask.size() != feature_names.size())
        throw ComputeError("mask length does not match feature names");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) names.push_back(feature_names[i]);
    }
    return names;
}

std::vector<FeatureMask> init_population(const GaConfig& cfg, std::size_t n_features) {
    validate_config(cfg);
    if (n_features == 0) throw ComputeError("ga: cannot select from zero features");
    Rng rng(mix_seed(cfg.seed, 0));
    std::vector<FeatureMask> population(cfg.population_size);
    for (auto& mask : population) {
        mask.resize(n_features);
        for (auto& bit : mask) bit = rng.bernoulli(cfg.init_bit_probability) ? 1 : 0;
        repair(mask, rng);
    }
    return population;
}

double evaluate_fitness(const FeatureMask& mask, const Dataset& ds, const FitnessSpec& spec) {
    if (mask.size() != ds.n_features())
        throw ComputeError("fitness: mask length does not match feature count");
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) cols.push_back(i);
    }
    if (cols.empty()) throw ComputeError("fitness: mask selects no features");

    Dataset sub = select_columns(ds, cols);
    std::uint64_t rf_seed = hash_bits(spec.fitness_seed, mask);

    if (spec.mode == FitnessMode::OobAccuracy) {
        ForestConfig rf_cfg = spec.rf_config;
        rf_cfg.seed = rf_seed;
        RandomForest rf = fit(sub, rf_cfg);
        return 1.0 - oob_error(rf, sub).error;
    }

    if (spec.cv_folds < 2) throw ComputeError("fitness: cv_folds must be >= 2");
    auto counts = ds.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] > 0 && counts[c] < static_cast<std::size_t>(spec.cv_folds))
            throw ComputeError("fitness: cv_folds exceeds the count of class " +
                               std::to_string(c));
    }

    auto folds = stratified_folds(sub.y, spec.cv_folds, spec.fitness_seed);
    double total_acc = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::uint8_t> in_test(sub.n_rows(), 0);
        for (std::size_t r : folds[f]) in_test[r] = 1;
        std::vector<std::size_t> train_rows;
        for (std::size_t r = 0; r < sub.n_rows(); ++r) {
            if (!in_test[r]) train_rows.push_back(r);
        }
        Dataset train = select_rows(sub, train_rows);
        ForestConfig rf_cfg = spec.rf_config;
        rf_cfg.seed = mix_seed(rf_seed, f);
        RandomForest rf = fit(train, rf_cfg);
        std::size_t correct = 0;
        for (std::size_t r : folds[f]) {
            std::span<const double> row(sub.x.data() + r * sub.n_features(), sub.n_features());
            if (predict(rf, row) == sub.y[r]) correct++;
        }
        total_acc += static_cast<double>(correct) / static_cast<double>(folds[f].size());
    }
    return total_acc / static_cast<double>(folds.size());
}

std::size_t tournament_select(const std::vector<FeatureMask>& population,
                              const std::vector<double>& fitnesses, const GaConfig& cfg,
                              Rng& rng) {
    if (population.empty()) throw ComputeError("ga: empty population");
    // Distinct contestants, so tournament_size == population_size is an
    // exhaustive tournament that always yields the global best.
    std::vector<std::size_t> pool(population.size());
    std::iota(pool.begin(), pool.end(), 0);
    std::size_t best = population.size();
    for (int i = 0; i < cfg.tournament_size; ++i) {
        std::size_t j = i + rng.uniform_index(pool.size() - i);
        std::swap(pool[i], pool[j]);
        std::size_t contestant = pool[i];
        if (best == population.size() ||
            better(fitnesses[contestant], mask_popcount(population[contestant]), contestant,
                   fitnesses[best], mask_popcount(population[best]), best)) {
            best = contestant;
        }
    }
    return best;
}

std::size_t roulette_select(const std::vector<double>& fitnesses, Rng& rng) {
    double total = std::accumulate(fitnesses.begin(), fitnesses.end(), 0.0);
    if (total <= 0.0) return rng.uniform_index(fitnesses.size());
    double target = rng.uniform01() * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < fitnesses.size(); ++i) {
        cum += fitnesses[i];
        if (target < cum) return i;
    }
    return fitnesses.size() - 1;
}

std::pair<FeatureMask, FeatureMask> crossover_at(const FeatureMask& a, const FeatureMask& b,
                                                 std::size_t cut) {
    if (a.size() != b.size()) throw ComputeError("ga: crossover on masks of different length");
    if (cut < 1 || cut >= a.size()) throw ComputeError("ga: crossover cut out of range");
    FeatureMask c1 = a, c2 = b;
    for (std::size_t i = cut; i < a.size(); ++i) {
        c1[i] = b[i];
        c2[i] = a[i];
    }
    return {std::move(c1), std::move(c2)};
}

std::pair<FeatureMask, FeatureMask> crossover(const FeatureMask& a, const FeatureMask& b,
                                              const GaConfig& cfg, Rng& rng) {
    if (a.size() != b.size()) throw ComputeError("ga: crossover on masks of different length");
    FeatureMask c1 = a, c2 = b;
    const std::size_t len = a.size();
    if (len >= 2 && rng.bernoulli(cfg.crossover_rate)) {
        std::size_t cut = 1 + rng.uniform_index(len - 1);  // {1, ..., len-1}
        std::tie(c1, c2) = crossover_at(a, b, cut);
    }
    repair(c1, rng);
    repair(c2, rng);
    return {std::move(c1), std::move(c2)};
}

FeatureMask mutate(const FeatureMask& mask, const GaConfig& cfg, Rng& rng) {
    FeatureMask out = mask;
    for (auto& bit : out) {
        if (rng.bernoulli(cfg.mutation_rate)) bit = bit ? 0 : 1;
    }
    repair(out, rng);
    return out;
}

GaResult run_ga(const Dataset& ds, const GaConfig& cfg, const FitnessSpec& spec, int threads,
                const GaObserver& observer) {
    validate_config(cfg);
    if (ds.has_missing()) throw ComputeError("ga: dataset must be imputed first");

    std::vector<FeatureMask> population = init_population(cfg, ds.n_features());
    std::map<FeatureMask, double> cache;

    auto evaluate_all = [&](const std::vector<FeatureMask>& pop) {
        std::vector<FeatureMask> pending;
        for (const auto& mask : pop) {
            if (!cache.count(mask)) {
                cache.emplace(mask, -1.0);  // placeholder, filled below
                pending.push_back(mask);
            }
        }
        std::vector<double> results(pending.size());
        parallel_for(pending.size(), threads,
                     [&](std::size_t i) { results[i] = evaluate_fitness(pending[i], ds, spec); });
        for (std::size_t i = 0; i < pending.size(); ++i) cache[pending[i]] = results[i];
        std::vector<double> fitnesses(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i) fitnesses[i] = cache.at(pop[i]);
        return fitnesses;
    };

    GaResult result;
    GaHistory& history = result.history;
    bool have_best = false;

    auto record = [&](int gen, const std::vector<double>& fitnesses) {
        std::size_t best = 0;
        double sum = 0.0;
        for (std::size_t i = 0; i < population.size(); ++i) {
            sum += fitnesses[i];
            if (better(fitnesses[i], mask_popcount(population[i]), i, fitnesses[best],
                       mask_popcount(population[best]), best)) {
                best = i;
            }
        }
        history.entries.push_back({fitnesses[best],
                                   sum / static_cast<double>(population.size()),
                                   population[best]});
        bool take = !have_best || fitnesses[best] > result.best_fitness ||
                    (fitnesses[best] == result.best_fitness &&
                     mask_popcount(population[best]) < mask_popcount(result.best_mask));
        if (take) {
            result.best_mask = population[best];
            result.best_fitness = fitnesses[best];
            have_best = true;
        }
        if (observer) observer(gen, population, fitnesses);
    };

    std::vector<double> fitnesses = evaluate_all(population);
    record(0, fitnesses);

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        // elites first, by the same ordering the selection tie-break uses
        std::vector<std::size_t> order(population.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return better(fitnesses[a], mask_popcount(population[a]), a, fitnesses[b],
                          mask_popcount(population[b]), b);
        });

        std::vector<FeatureMask> next;
        next.reserve(population.size());
        for (int e = 0; e < cfg.elitism_count; ++e) next.push_back(population[order[e]]);

        Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(gen)));
        while (next.size() < population.size()) {
            std::size_t ia, ib;
            if (cfg.selection == SelectionOp::Tournament) {
                ia = tournament_select(population, fitnesses, cfg, rng);
                ib = tournament_select(population, fitnesses, cfg, rng);
            } else {
                ia = roulette_select(fitnesses, rng);
                ib = roulette_select(fitnesses, rng);
            }
            auto [c1, c2] = crossover(population[ia], population[ib], cfg, rng);
            next.push_back(mutate(c1, cfg, rng));
            if (next.size() < population.size()) next.push_back(mutate(c2, cfg, rng));
        }

        population = std::move(next);
        fitnesses = evaluate_all(population);
        record(gen, fitnesses);
    }
    return result;
}

std::string history_to_csv(const GaHistory& history) {
    std::string out = "generation,best,mean\n";
    for (std::size_t g = 0; g < history.entries.size(); ++g) {
        out += std::to_string(g);
        out += ',';
        out += csv::format_double(history.entries[g].best_fitness);
        out += ',';
        out += csv::format_double(history.entries[g].mean_fitness);
        out += '\n';
    }
    return out;
}

}  // namespace sgrf
