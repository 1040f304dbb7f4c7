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

#pragma once

/// @file engine.hpp
/// @brief Master side of the master-slave evolutionary algorithm.
///
/// The engine is single-threaded and deterministic for a given seed. Every
/// fitness evaluation goes through an EvaluationBackend, which is where the
/// parallelism lives.
///
/// One generation:
///   1. rank the evaluated population and draw population_size/2 parent pairs
///      (linear ranking, ties share their averaged rank weight);
///   2. breed offspring_per_pairing children per pair (single-point crossover
///      with independent cuts, then length- and parameter-mutation);
///   3. evaluate all children as one batch;
///   4. per pair, the best child replaces the worse parent if strictly fitter.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "derschedule/domain.hpp"
#include "derschedule/evaluation.hpp"

namespace derschedule {

using Rng = std::mt19937_64;

/// Per-offspring probabilities of each mutation operator.
struct MutationRates {
    double duplication = 0.1;
    double deletion = 0.1;
    double insertion = 0.1;
    double parameter = 0.5;
};

struct EaConfig {
    std::size_t population_size = 120;
    std::size_t max_generations = 150;
    std::size_t offspring_per_pairing = 8;
    double crossover_rate = 0.7;
    MutationRates mutation;
    std::size_t chromosome_length_cap = 0; ///< 0: four genes per fleet unit
    std::size_t initial_length_cap = 0;    ///< 0: one gene per fleet unit
    std::size_t max_segment_length = 3;    ///< for duplication and deletion
    double selection_pressure = 1.8;
    double fraction_sigma = 0.1;
    std::uint64_t rng_seed = 1;
    bool elitism = true;
    double seed_fraction = 0.0; ///< share of the initial population copied from prior solutions
};

/// Fills in fleet-dependent defaults (the length caps).
EaConfig resolve_config(EaConfig config, const Fleet& fleet);

/// Throws ConfigError on out-of-range settings. Expects a resolved config.
void validate_config(const EaConfig& config);

/// population_size / 2.
std::size_t pairings_per_generation(const EaConfig& config);

/// population_size + generations * pairings * offspring_per_pairing.
std::size_t expected_evaluations(const EaConfig& config);

struct Member {
    Chromosome chromosome;
    std::optional<EvaluationResult> result;
};

struct Population {
    std::vector<Member> members;
    std::size_t generation = 0;

    std::size_t size() const noexcept { return members.size(); }
};

Gene random_gene(const Fleet& fleet, Rng& rng);

/// Length uniform in [1, max_length].
Chromosome random_chromosome(const Fleet& fleet, std::size_t max_length, Rng& rng);

/// floor(seed_fraction * population_size) members copied from `priors`
/// (cycled when fewer are given), the rest random.
Population init_population(const EaConfig& config, const Fleet& fleet, Rng& rng,
                           std::span<const Chromosome> priors = {});

/// Linear-ranking parent selection over one evaluated population.
class RankingSelector {
  public:
    RankingSelector(const Population& population, double pressure);

    /// Two distinct member indices, better-ranked first.
    std::pair<std::size_t, std::size_t> draw_pair(Rng& rng) const;

    /// Probability of each member (by index) being drawn as the first partner.
    std::span<const double> probabilities() const noexcept { return probabilities_; }

  private:
    std::vector<double> probabilities_;
    std::vector<std::size_t> rank_of_;
};

std::pair<std::size_t, std::size_t> select_parents(const Population& population, Rng& rng, double pressure = 1.8);

/// Tail exchange: a[0, cut_a) + b[cut_b, end) and b[0, cut_b) + a[cut_a, end).
std::pair<Chromosome, Chromosome> crossover_at(const Chromosome& a, const Chromosome& b, std::size_t cut_a,
                                               std::size_t cut_b);

/// Single-point crossover with an independent random cut in each parent.
/// Cuts producing an empty or over-cap child are resampled.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, Rng& rng,
                                            std::size_t length_cap);

namespace ops {

/// Copies genes [from, from + length) and inserts the copy before position `at`
/// of the original chromosome.
Chromosome duplicate_segment(Chromosome c, std::size_t from, std::size_t length, std::size_t at);

/// Removes genes [from, from + length), never leaving fewer than one gene.
Chromosome delete_segment(Chromosome c, std::size_t from, std::size_t length);

Chromosome insert_gene(Chromosome c, const Gene& gene, std::size_t at);

} // namespace ops

/// Applies duplication, deletion, insertion and parameter mutation, each with
/// its configured probability. Expects a resolved config.
Chromosome mutate(Chromosome c, Rng& rng, const EaConfig& config, const Fleet& fleet);

/// One parent pair and its evaluated children.
struct Pairing {
    std::size_t first = 0;
    std::size_t second = 0;
    std::vector<Member> offspring;
};

Population form_next_generation(Population population, std::span<const Pairing> pairings, const EaConfig& config);

struct GenerationStats {
    std::size_t generation = 0;
    double best_fitness = 0.0; ///< best so far
    double mean_fitness = 0.0; ///< current population
    double best_cost = 0.0;
    double best_dtd = 0.0;
    std::size_t best_hu = 0;
    std::size_t evaluations = 0; ///< cumulative

    bool operator==(const GenerationStats&) const = default;
};

struct RunResult {
    Chromosome best;
    EvaluationResult best_result;
    std::vector<GenerationStats> history;
    std::size_t evaluations = 0;
};

struct RunOptions {
    std::span<const Chromosome> priors;
    std::function<void(const GenerationStats&)> on_generation;
};

RunResult run(const EaConfig& config, const Fleet& fleet, EvaluationBackend& backend, const RunOptions& options = {});

} // namespace derschedule
