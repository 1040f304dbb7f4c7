// Copyright 2026 The derschedule Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include "derschedule/engine.hpp"

#include <algorithm>
#include <numeric>

#include "derschedule/error.hpp"

namespace derschedule {

namespace {

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool chance(Rng& rng, double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError(std::string(name) + " must lie in [0, 1]");
    }
}

const EvaluationResult& result_of(const Member& m) {
    if (!m.result) {
        throw ValidationError("population member has not been evaluated");
    }
    return *m.result;
}

std::size_t best_index(const Population& population) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < population.size(); ++i) {
        if (result_of(population.members[i]).fitness > result_of(population.members[best]).fitness) {
            best = i;
        }
    }
    return best;
}

std::vector<Chromosome> breed(const Chromosome& a, const Chromosome& b, Rng& rng, const EaConfig& config,
                              const Fleet& fleet) {
    std::vector<Chromosome> children;
    children.reserve(config.offspring_per_pairing);
    while (children.size() < config.offspring_per_pairing) {
        auto [x, y] = chance(rng, config.crossover_rate) ? crossover(a, b, rng, config.chromosome_length_cap)
                                                         : std::pair{a, b};
        children.push_back(mutate(std::move(x), rng, config, fleet));
        if (children.size() < config.offspring_per_pairing) {
            children.push_back(mutate(std::move(y), rng, config, fleet));
        }
    }
    for (auto& c : children) {
        c.provenance = Provenance::offspring;
    }
    return children;
}

std::vector<EvaluationResult> evaluate_batch(EvaluationBackend& backend, std::span<const Chromosome> batch,
                                             std::size_t generation) {
    try {
        auto results = backend.evaluate(batch, generation);
        if (results.size() != batch.size()) {
            throw ProtocolError("backend returned " + std::to_string(results.size()) + " results for " +
                                std::to_string(batch.size()) + " chromosomes");
        }
        return results;
    } catch (const WorkerLossError& e) {
        throw WorkerLossError(e.chunk_index(), "generation " + std::to_string(generation) + ": " + e.what());
    } catch (const BrokerError& e) {
        throw BrokerError("generation " + std::to_string(generation) + ": " + e.what());
    } catch (const ProtocolError& e) {
        throw ProtocolError("generation " + std::to_string(generation) + ": " + e.what());
    } catch (const StartupError& e) {
        throw StartupError("generation " + std::to_string(generation) + ": " + e.what());
    }
}

} // namespace

EaConfig resolve_config(EaConfig config, const Fleet& fleet) {
    if (config.chromosome_length_cap == 0) config.chromosome_length_cap = 4 * fleet.size();
    if (config.initial_length_cap == 0) config.initial_length_cap = fleet.size();
    config.initial_length_cap = std::min(config.initial_length_cap, config.chromosome_length_cap);
    return config;
}

void validate_config(const EaConfig& config) {
    if (config.population_size < 2) throw ConfigError("population size must be >= 2");
    if (config.offspring_per_pairing < 1) throw ConfigError("offspring per pairing must be >= 1");
    if (config.chromosome_length_cap < 1) throw ConfigError("chromosome length cap must be >= 1");
    if (config.initial_length_cap < 1) throw ConfigError("initial length cap must be >= 1");
    if (config.max_segment_length < 1) throw ConfigError("max segment length must be >= 1");
    check_probability(config.crossover_rate, "crossover rate");
    check_probability(config.mutation.duplication, "duplication rate");
    check_probability(config.mutation.deletion, "deletion rate");
    check_probability(config.mutation.insertion, "insertion rate");
    check_probability(config.mutation.parameter, "parameter mutation rate");
    if (!(config.seed_fraction >= 0.0 && config.seed_fraction <= 0.25)) {
        throw ConfigError("seed fraction must lie in [0, 0.25]");
    }
    if (!(config.selection_pressure >= 1.0 && config.selection_pressure <= 2.0)) {
        throw ConfigError("selection pressure must lie in [1, 2]");
    }
    if (!(config.fraction_sigma >= 0.0)) throw ConfigError("fraction sigma must be >= 0");
}

std::size_t pairings_per_generation(const EaConfig& config) { return config.population_size / 2; }

std::size_t expected_evaluations(const EaConfig& config) {
    return config.population_size +
           config.max_generations * pairings_per_generation(config) * config.offspring_per_pairing;
}

Gene random_gene(const Fleet& fleet, Rng& rng) {
    if (fleet.empty()) throw ConfigError("cannot draw genes for an empty fleet");
    const std::size_t horizon = fleet.grid().intervals();
    const UnitId unit = fleet.unit_ids()[uniform_index(rng, 0, fleet.size() - 1)];
    const std::size_t start = uniform_index(rng, 0, horizon - 1);
    const std::size_t duration = uniform_index(rng, 1, horizon);
    const double fraction = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return Gene(unit, start, duration, fraction, fleet.grid());
}

Chromosome random_chromosome(const Fleet& fleet, std::size_t max_length, Rng& rng) {
    Chromosome c;
    const std::size_t length = uniform_index(rng, 1, std::max<std::size_t>(1, max_length));
    c.genes.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        c.genes.push_back(random_gene(fleet, rng));
    }
    c.provenance = Provenance::random;
    return c;
}

Population init_population(const EaConfig& config, const Fleet& fleet, Rng& rng, std::span<const Chromosome> priors) {
    for (const auto& p : priors) {
        validate_chromosome(p, fleet, config.chromosome_length_cap);
    }
    const auto seeded = priors.empty()
                            ? std::size_t{0}
                            : static_cast<std::size_t>(config.seed_fraction * static_cast<double>(config.population_size));

    Population population;
    population.members.reserve(config.population_size);
    for (std::size_t i = 0; i < seeded; ++i) {
        Chromosome c = priors[i % priors.size()];
        c.provenance = Provenance::seeded;
        population.members.push_back({std::move(c), std::nullopt});
    }
    while (population.members.size() < config.population_size) {
        population.members.push_back({random_chromosome(fleet, config.initial_length_cap, rng), std::nullopt});
    }
    return population;
}

RankingSelector::RankingSelector(const Population& population, double pressure) {
    const std::size_t n = population.size();
    if (n < 2) throw ConfigError("selection needs at least two members");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> fit(n);
    for (std::size_t i = 0; i < n; ++i) fit[i] = result_of(population.members[i]).fitness;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });

    // Rank 0 (best) gets weight `pressure`, rank n-1 gets 2 - pressure. The
    // weights sum to n, so weight / n is a probability.
    const double hi = pressure;
    const double lo = 2.0 - pressure;
    auto weight = [&](std::size_t rank) {
        return lo + (hi - lo) * static_cast<double>(n - 1 - rank) / static_cast<double>(n - 1);
    };

    probabilities_.assign(n, 0.0);
    rank_of_.assign(n, 0);
    for (std::size_t r = 0; r < n;) {
        std::size_t end = r + 1;
        while (end < n && fit[order[end]] == fit[order[r]]) ++end;
        double sum = 0.0;
        for (std::size_t k = r; k < end; ++k) sum += weight(k);
        const double shared = sum / static_cast<double>(end - r);
        for (std::size_t k = r; k < end; ++k) {
            probabilities_[order[k]] = shared / static_cast<double>(n);
            rank_of_[order[k]] = k;
        }
        r = end;
    }
}

std::pair<std::size_t, std::size_t> RankingSelector::draw_pair(Rng& rng) const {
    const std::size_t n = probabilities_.size();
    auto pick = [&](std::optional<std::size_t> excluded) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i != excluded) total += probabilities_[i];
        }
        if (total <= 0.0) {
            // Only zero-weight candidates left: uniform among them.
            std::size_t k = uniform_index(rng, 0, n - 1 - (excluded ? 1 : 0));
            if (excluded && k >= *excluded) ++k;
            return k;
        }
        const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
        double acc = 0.0;
        std::size_t last = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == excluded || probabilities_[i] <= 0.0) continue;
            acc += probabilities_[i];
            last = i;
            if (u < acc) return i;
        }
        return last;
    };
    const std::size_t a = pick(std::nullopt);
    const std::size_t b = pick(a);
    return rank_of_[a] < rank_of_[b] ? std::pair{a, b} : std::pair{b, a};
}

std::pair<std::size_t, std::size_t> select_parents(const Population& population, Rng& rng, double pressure) {
    return RankingSelector(population, pressure).draw_pair(rng);
}

std::pair<Chromosome, Chromosome> crossover_at(const Chromosome& a, const Chromosome& b, std::size_t cut_a,
                                               std::size_t cut_b) {
    if (cut_a > a.size() || cut_b > b.size()) {
        throw ValidationError("crossover cut outside the parent");
    }
    Chromosome x{{}, Provenance::offspring};
    Chromosome y{{}, Provenance::offspring};
    x.genes.reserve(cut_a + (b.size() - cut_b));
    y.genes.reserve(cut_b + (a.size() - cut_a));
    x.genes.insert(x.genes.end(), a.genes.begin(), a.genes.begin() + cut_a);
    x.genes.insert(x.genes.end(), b.genes.begin() + cut_b, b.genes.end());
    y.genes.insert(y.genes.end(), b.genes.begin(), b.genes.begin() + cut_b);
    y.genes.insert(y.genes.end(), a.genes.begin() + cut_a, a.genes.end());
    return {std::move(x), std::move(y)};
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, Rng& rng,
                                            std::size_t length_cap) {
    constexpr int max_attempts = 32;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const std::size_t cut_a = uniform_index(rng, 0, a.size());
        const std::size_t cut_b = uniform_index(rng, 0, b.size());
        const std::size_t len_x = cut_a + (b.size() - cut_b);
        const std::size_t len_y = cut_b + (a.size() - cut_a);
        if (len_x >= 1 && len_y >= 1 && len_x <= length_cap && len_y <= length_cap) {
            return crossover_at(a, b, cut_a, cut_b);
        }
    }
    return {a, b};
}

namespace ops {

Chromosome duplicate_segment(Chromosome c, std::size_t from, std::size_t length, std::size_t at) {
    if (from + length > c.size() || at > c.size()) {
        throw ValidationError("duplication segment outside the chromosome");
    }
    std::vector<Gene> segment(c.genes.begin() + from, c.genes.begin() + from + length);
    c.genes.insert(c.genes.begin() + at, segment.begin(), segment.end());
    return c;
}

Chromosome delete_segment(Chromosome c, std::size_t from, std::size_t length) {
    if (c.size() <= 1 || from >= c.size()) return c;
    length = std::min({length, c.size() - from, c.size() - 1});
    c.genes.erase(c.genes.begin() + from, c.genes.begin() + from + length);
    return c;
}

Chromosome insert_gene(Chromosome c, const Gene& gene, std::size_t at) {
    if (at > c.size()) throw ValidationError("insertion point outside the chromosome");
    c.genes.insert(c.genes.begin() + at, gene);
    return c;
}

} // namespace ops

namespace {

Gene mutate_parameter(const Gene& g, Rng& rng, const EaConfig& config, const TimeGrid& grid) {
    const std::size_t horizon = grid.intervals();
    std::size_t start = g.start();
    std::size_t duration = g.duration();
    double fraction = g.fraction();
    const bool up = chance(rng, 0.5);
    switch (uniform_index(rng, 0, 2)) {
    case 0:
        start = up ? std::min(start + 1, horizon - 1) : (start > 0 ? start - 1 : 0);
        break;
    case 1:
        duration = up ? duration + 1 : std::max<std::size_t>(1, duration - 1);
        break;
    default:
        fraction = std::clamp(fraction + std::normal_distribution<double>(0.0, config.fraction_sigma)(rng), 0.0, 1.0);
        break;
    }
    return Gene(g.unit(), start, duration, fraction, grid);
}

} // namespace

Chromosome mutate(Chromosome c, Rng& rng, const EaConfig& config, const Fleet& fleet) {
    const std::size_t cap = config.chromosome_length_cap;

    if (chance(rng, config.mutation.duplication) && c.size() < cap) {
        const std::size_t max_len = std::min({config.max_segment_length, c.size(), cap - c.size()});
        const std::size_t len = uniform_index(rng, 1, max_len);
        const std::size_t from = uniform_index(rng, 0, c.size() - len);
        const std::size_t at = uniform_index(rng, 0, c.size());
        c = ops::duplicate_segment(std::move(c), from, len, at);
    }
    if (chance(rng, config.mutation.deletion) && c.size() > 1) {
        const std::size_t max_len = std::min(config.max_segment_length, c.size() - 1);
        const std::size_t len = uniform_index(rng, 1, max_len);
        const std::size_t from = uniform_index(rng, 0, c.size() - len);
        c = ops::delete_segment(std::move(c), from, len);
    }
    if (chance(rng, config.mutation.insertion) && c.size() < cap) {
        const Gene g = random_gene(fleet, rng);
        c = ops::insert_gene(std::move(c), g, uniform_index(rng, 0, c.size()));
    }
    if (chance(rng, config.mutation.parameter) && !c.genes.empty()) {
        const std::size_t i = uniform_index(rng, 0, c.size() - 1);
        c.genes[i] = mutate_parameter(c.genes[i], rng, config, fleet.grid());
    }
    return c;
}

Population form_next_generation(Population population, std::span<const Pairing> pairings, const EaConfig& config) {
    const std::size_t size_before = population.size();
    const std::size_t best_before = best_index(population);
    const Member elite = population.members[best_before];

    for (const auto& p : pairings) {
        if (p.offspring.empty()) continue;
        std::size_t best_child = 0;
        for (std::size_t k = 1; k < p.offspring.size(); ++k) {
            if (result_of(p.offspring[k]).fitness > result_of(p.offspring[best_child]).fitness) best_child = k;
        }
        const double fa = result_of(population.members.at(p.first)).fitness;
        const double fb = result_of(population.members.at(p.second)).fitness;
        const std::size_t worse = fb <= fa ? p.second : p.first;
        const double child_fitness = result_of(p.offspring[best_child]).fitness;
        const bool accept = config.elitism ? child_fitness > std::min(fa, fb) : true;
        if (accept) {
            population.members[worse] = p.offspring[best_child];
        }
    }

    if (config.elitism) {
        const std::size_t best_after = best_index(population);
        if (result_of(population.members[best_after]).fitness < result_of(elite).fitness) {
            std::size_t worst = 0;
            for (std::size_t i = 1; i < population.size(); ++i) {
                if (result_of(population.members[i]).fitness < result_of(population.members[worst]).fitness) worst = i;
            }
            population.members[worst] = elite;
        }
    }

    if (population.size() != size_before) {
        throw Error("population size changed while forming the next generation");
    }
    ++population.generation;
    return population;
}

RunResult run(const EaConfig& raw_config, const Fleet& fleet, EvaluationBackend& backend, const RunOptions& options) {
    const EaConfig config = resolve_config(raw_config, fleet);
    validate_config(config);
    if (fleet.empty()) throw ConfigError("fleet is empty");

    Rng rng(config.rng_seed);
    Population population = init_population(config, fleet, rng, options.priors);

    RunResult out;
    {
        std::vector<Chromosome> batch;
        batch.reserve(population.size());
        for (const auto& m : population.members) batch.push_back(m.chromosome);
        auto results = evaluate_batch(backend, batch, 0);
        for (std::size_t i = 0; i < results.size(); ++i) population.members[i].result = results[i];
        out.evaluations = batch.size();
    }

    auto record = [&](std::size_t generation) {
        const std::size_t b = best_index(population);
        const auto& candidate = population.members[b];
        if (generation == 0 || candidate.result->fitness > out.best_result.fitness) {
            out.best = candidate.chromosome;
            out.best_result = *candidate.result;
        }
        double sum = 0.0;
        for (const auto& m : population.members) sum += m.result->fitness;
        GenerationStats s;
        s.generation = generation;
        s.best_fitness = out.best_result.fitness;
        s.mean_fitness = sum / static_cast<double>(population.size());
        s.best_cost = out.best_result.cost;
        s.best_dtd = out.best_result.dtd;
        s.best_hu = out.best_result.hu;
        s.evaluations = out.evaluations;
        out.history.push_back(s);
        if (options.on_generation) options.on_generation(s);
    };
    record(0);

    const std::size_t n_pairings = pairings_per_generation(config);
    for (std::size_t g = 1; g <= config.max_generations; ++g) {
        const RankingSelector selector(population, config.selection_pressure);
        std::vector<Pairing> pairings(n_pairings);
        std::vector<Chromosome> batch;
        batch.reserve(n_pairings * config.offspring_per_pairing);
        for (auto& p : pairings) {
            std::tie(p.first, p.second) = selector.draw_pair(rng);
            auto children = breed(population.members[p.first].chromosome, population.members[p.second].chromosome,
                                  rng, config, fleet);
            for (auto& c : children) batch.push_back(std::move(c));
        }

        auto results = evaluate_batch(backend, batch, g);
        std::size_t k = 0;
        for (auto& p : pairings) {
            p.offspring.reserve(config.offspring_per_pairing);
            for (std::size_t j = 0; j < config.offspring_per_pairing; ++j, ++k) {
                p.offspring.push_back({std::move(batch[k]), results[k]});
            }
        }
        out.evaluations += results.size();
        population = form_next_generation(std::move(population), pairings, config);
        record(g);
    }
    return out;
}

} // namespace derschedule
