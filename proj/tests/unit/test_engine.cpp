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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>

#include "derschedule/engine.hpp"
#include "derschedule/error.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace derschedule;
using fixtures::chromosome;

namespace {

Population evaluated(const std::vector<double>& fitness) {
    Population p;
    const TimeGrid grid(4);
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        EvaluationResult r;
        r.fitness = fitness[i];
        p.members.push_back({chromosome(grid, {{1, i % 4, 1, 0.5}}), r});
    }
    return p;
}

Member child(double fitness) {
    EvaluationResult r;
    r.fitness = fitness;
    return {chromosome(TimeGrid(4), {{9, 0, 4, 1.0}}), r};
}

std::vector<double> fitness_of(const Population& p) {
    std::vector<double> f;
    for (const auto& m : p.members) f.push_back(m.result->fitness);
    return f;
}

bool same_genes(std::vector<Gene> a, std::vector<Gene> b) {
    auto key = [](const Gene& g) { return std::tuple(g.unit().value, g.start(), g.duration(), g.fraction()); };
    auto less = [&](const Gene& x, const Gene& y) { return key(x) < key(y); };
    std::sort(a.begin(), a.end(), less);
    std::sort(b.begin(), b.end(), less);
    return a == b;
}

Fleet small_fleet() {
    return fixtures::make_fleet({{1, 0, 0, 0, {5, 5, 5, 5, 5, 5}}, {2, 0, 0, 0, {3, 3, 3, 3, 3, 3}},
                                 {3, 0, 0, 0, {1, 2, 3, 4, 5, 6}}});
}

} // namespace

TEST_CASE("config resolution and validation") {
    const Fleet fleet = small_fleet();
    const EaConfig c = resolve_config(EaConfig{}, fleet);
    CHECK(c.chromosome_length_cap == 12);
    CHECK(c.initial_length_cap == 3);
    CHECK_NOTHROW(validate_config(c));

    auto bad = c;
    bad.population_size = 1;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = c;
    bad.offspring_per_pairing = 0;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = c;
    bad.mutation.deletion = 1.5;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = c;
    bad.seed_fraction = 0.3;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = c;
    bad.crossover_rate = -0.1;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
}

TEST_CASE("evaluation bookkeeping identity") {
    EaConfig c;
    c.population_size = 300;
    c.max_generations = 420;
    c.offspring_per_pairing = 8;
    CHECK(pairings_per_generation(c) == 150);
    CHECK(expected_evaluations(c) == 300 + 420 * 150 * 8);
}

TEST_CASE("init_population") {
    const Fleet fleet = small_fleet();
    EaConfig c = resolve_config(EaConfig{}, fleet);

    SUBCASE("purely random and reproducible") {
        c.population_size = 4;
        Rng a(77), b(77);
        const auto p = init_population(c, fleet, a);
        const auto q = init_population(c, fleet, b);
        REQUIRE(p.size() == 4);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(p.members[i].chromosome == q.members[i].chromosome);
            CHECK(p.members[i].chromosome.provenance == Provenance::random);
            CHECK(p.members[i].chromosome.size() >= 1);
            CHECK(p.members[i].chromosome.size() <= c.initial_length_cap);
            CHECK_FALSE(p.members[i].result.has_value());
        }
    }
    SUBCASE("seeded share is floored") {
        c.population_size = 8;
        c.seed_fraction = 0.25;
        const std::vector<Chromosome> priors{chromosome(fleet.grid(), {{1, 0, 6, 0.3}}),
                                             chromosome(fleet.grid(), {{2, 1, 2, 0.9}})};
        Rng rng(1);
        const auto p = init_population(c, fleet, rng, priors);
        std::size_t seeded = 0;
        for (const auto& m : p.members) seeded += m.chromosome.provenance == Provenance::seeded;
        CHECK(seeded == 2);
        CHECK(p.members[0].chromosome.genes == priors[0].genes);
        CHECK(p.members[1].chromosome.genes == priors[1].genes);
    }
    SUBCASE("priors are cycled") {
        c.population_size = 16;
        c.seed_fraction = 0.25;
        const std::vector<Chromosome> priors{chromosome(fleet.grid(), {{1, 0, 6, 0.3}})};
        Rng rng(1);
        const auto p = init_population(c, fleet, rng, priors);
        for (std::size_t i = 0; i < 4; ++i) CHECK(p.members[i].chromosome.genes == priors[0].genes);
        CHECK(p.members[4].chromosome.provenance == Provenance::random);
    }
    SUBCASE("prior with an unknown unit") {
        c.seed_fraction = 0.25;
        const std::vector<Chromosome> priors{chromosome(fleet.grid(), {{42, 0, 1, 0.3}})};
        Rng rng(1);
        CHECK_THROWS_AS(init_population(c, fleet, rng, priors), ValidationError);
    }
}

TEST_CASE("selection from two members returns them in rank order") {
    const auto pop = evaluated({10.0, 20.0});
    Rng rng(3);
    for (int i = 0; i < 50; ++i) CHECK(select_parents(pop, rng) == std::pair<std::size_t, std::size_t>{1, 0});
}

TEST_CASE("selection requires evaluated members") {
    auto pop = evaluated({1, 2, 3});
    pop.members[1].result.reset();
    Rng rng(3);
    CHECK_THROWS_AS(select_parents(pop, rng), ValidationError);
}

TEST_CASE("uniform fitness makes every pair equally likely") {
    const std::size_t n = 5;
    const auto pop = evaluated(std::vector<double>(n, 500.0));
    const RankingSelector selector(pop, 1.8);
    Rng rng(2024);
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> counts;
    const std::size_t draws = 10000;
    for (std::size_t i = 0; i < draws; ++i) {
        auto [a, b] = selector.draw_pair(rng);
        REQUIRE(a != b);
        counts[{std::min(a, b), std::max(a, b)}]++;
    }
    const std::size_t pairs = n * (n - 1) / 2;
    REQUIRE(counts.size() == pairs);
    const double expected = double(draws) / double(pairs);
    double stat = 0.0;
    for (const auto& [pair, count] : counts) stat += (count - expected) * (count - expected) / expected;
    const boost::math::chi_squared dist(double(pairs - 1));
    const double p_value = boost::math::cdf(boost::math::complement(dist, stat));
    CHECK(p_value > 0.01);
}

TEST_CASE("a single leader is drawn with the linear-ranking probability") {
    const std::vector<double> fitness{0, 0, 100000, 0, 0, 0};
    const auto pop = evaluated(fitness);
    const RankingSelector selector(pop, 1.8);
    const auto analytic = oracle::ranking_probabilities(fitness, 1.8);
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        CHECK(selector.probabilities()[i] == doctest::Approx(analytic[i]).epsilon(1e-12));
    }
    CHECK(analytic[2] == doctest::Approx(1.8 / 6));

    const double p_in_pair = oracle::pair_inclusion_probability(analytic, 2);
    Rng rng(99);
    const std::size_t draws = 100000;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < draws; ++i) {
        auto [a, b] = selector.draw_pair(rng);
        if (a == 2) ++hits;
        CHECK(b != 2); // the leader always comes first
    }
    const double sigma = std::sqrt(p_in_pair * (1 - p_in_pair) / double(draws));
    CHECK(std::abs(double(hits) / double(draws) - p_in_pair) < 4.5 * sigma);
}

TEST_CASE("tied members share their averaged rank weight") {
    const std::vector<double> fitness{5, 9, 5, 1, 9, 5};
    const RankingSelector selector(evaluated(fitness), 1.6);
    const auto expected = oracle::ranking_probabilities(fitness, 1.6);
    double total = 0;
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        CHECK(selector.probabilities()[i] == doctest::Approx(expected[i]).epsilon(1e-12));
        total += selector.probabilities()[i];
    }
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("crossover") {
    const TimeGrid grid(6);
    const auto a = chromosome(grid, {{1, 0, 1, 0.1}, {1, 1, 1, 0.2}});
    const auto b = chromosome(grid, {{2, 0, 1, 0.3}, {2, 1, 1, 0.4}});

    SUBCASE("tail exchange after the first gene") {
        auto [x, y] = crossover_at(a, b, 1, 1);
        CHECK(x.genes == std::vector<Gene>{a.genes[0], b.genes[1]});
        CHECK(y.genes == std::vector<Gene>{b.genes[0], a.genes[1]});
    }
    SUBCASE("single-gene parents produce copies") {
        const auto p = chromosome(grid, {{1, 2, 2, 0.5}});
        const auto q = chromosome(grid, {{2, 3, 1, 0.7}});
        Rng rng(5);
        for (int i = 0; i < 100; ++i) {
            auto [x, y] = crossover(p, q, rng, 8);
            const bool same = x.genes == p.genes && y.genes == q.genes;
            const bool swapped = x.genes == q.genes && y.genes == p.genes;
            CHECK((same || swapped));
        }
    }
    SUBCASE("genes are conserved and lengths stay within bounds") {
        const Fleet fleet = small_fleet();
        Rng rng(17);
        for (int i = 0; i < 1000; ++i) {
            const auto p = random_chromosome(fleet, 7, rng);
            const auto q = random_chromosome(fleet, 7, rng);
            auto [x, y] = crossover(p, q, rng, 9);
            CHECK(x.size() >= 1);
            CHECK(y.size() >= 1);
            CHECK(x.size() <= 9);
            CHECK(y.size() <= 9);
            std::vector<Gene> before = p.genes, after = x.genes;
            before.insert(before.end(), q.genes.begin(), q.genes.end());
            after.insert(after.end(), y.genes.begin(), y.genes.end());
            CHECK(same_genes(before, after));
        }
    }
}

TEST_CASE("mutation operators") {
    const Fleet fleet = small_fleet();
    const auto& grid = fleet.grid();
    const auto g = chromosome(grid, {{1, 2, 3, 0.4}});

    SUBCASE("deletion never empties a chromosome") {
        CHECK(ops::delete_segment(g, 0, 1).genes == g.genes);
        EaConfig c = resolve_config(EaConfig{}, fleet);
        c.mutation = {0.0, 1.0, 0.0, 0.0};
        Rng rng(4);
        CHECK(mutate(g, rng, c, fleet).genes == g.genes);
    }
    SUBCASE("duplicating the only gene") {
        const auto d = ops::duplicate_segment(g, 0, 1, 0);
        CHECK(d.genes == std::vector<Gene>{g.genes[0], g.genes[0]});
        CHECK(ops::duplicate_segment(g, 0, 1, 1).genes == d.genes);
        EaConfig c = resolve_config(EaConfig{}, fleet);
        c.mutation = {1.0, 0.0, 0.0, 0.0};
        Rng rng(4);
        CHECK(mutate(g, rng, c, fleet).genes == d.genes);
    }
    SUBCASE("all rates zero is the identity") {
        EaConfig c = resolve_config(EaConfig{}, fleet);
        c.mutation = {0.0, 0.0, 0.0, 0.0};
        Rng rng(8);
        for (int i = 0; i < 200; ++i) {
            const auto x = random_chromosome(fleet, 10, rng);
            CHECK(mutate(x, rng, c, fleet) == x);
        }
    }
    SUBCASE("segment deletion") {
        const auto x = chromosome(grid, {{1, 0, 1, 0.1}, {2, 0, 1, 0.2}, {3, 0, 1, 0.3}, {1, 1, 1, 0.4}});
        CHECK(ops::delete_segment(x, 1, 2).genes == std::vector<Gene>{x.genes[0], x.genes[3]});
        CHECK(ops::delete_segment(x, 0, 9).size() == 1);
    }
    SUBCASE("operators are closed over valid chromosomes") {
        EaConfig c = resolve_config(EaConfig{}, fleet);
        c.mutation = {0.5, 0.5, 0.5, 1.0};
        c.fraction_sigma = 0.5;
        Rng rng(12);
        for (int i = 0; i < 3000; ++i) {
            auto x = random_chromosome(fleet, c.chromosome_length_cap, rng);
            for (int k = 0; k < 5; ++k) x = mutate(std::move(x), rng, c, fleet);
            CHECK_NOTHROW(validate_chromosome(x, fleet, c.chromosome_length_cap));
        }
    }
}

TEST_CASE("form_next_generation") {
    EaConfig c;
    SUBCASE("worse offspring are rejected") {
        const auto pop = evaluated({10, 20, 30, 40});
        std::vector<Pairing> pairings{{3, 0, {child(5), child(9)}}, {2, 1, {child(19.999)}}};
        const auto next = form_next_generation(pop, pairings, c);
        CHECK(fitness_of(next) == fitness_of(pop));
        CHECK(next.generation == pop.generation + 1);
    }
    SUBCASE("one fitter offspring replaces exactly the worse parent") {
        const auto pop = evaluated({10, 20, 30, 40});
        std::vector<Pairing> pairings{{3, 0, {child(5), child(25), child(12)}}, {2, 1, {child(3)}}};
        const auto next = form_next_generation(pop, pairings, c);
        CHECK(fitness_of(next) == std::vector<double>{25, 20, 30, 40});
        CHECK(next.members[0].chromosome.genes == child(0).chromosome.genes);
    }
    SUBCASE("ties are not accepted") {
        const auto pop = evaluated({10, 20});
        std::vector<Pairing> pairings{{1, 0, {child(10)}}};
        CHECK(fitness_of(form_next_generation(pop, pairings, c)) == std::vector<double>{10, 20});
    }
    SUBCASE("without elitism the best child always replaces the worse parent") {
        c.elitism = false;
        const auto pop = evaluated({10, 20});
        std::vector<Pairing> pairings{{1, 0, {child(1), child(2)}}};
        CHECK(fitness_of(form_next_generation(pop, pairings, c)) == std::vector<double>{2, 20});
    }
    SUBCASE("the best member never gets worse") {
        Rng rng(31);
        std::uniform_real_distribution<double> f(0, 100000);
        for (int trial = 0; trial < 500; ++trial) {
            std::vector<double> fit(8);
            for (auto& v : fit) v = f(rng);
            const auto pop = evaluated(fit);
            std::vector<Pairing> pairings;
            for (int k = 0; k < 4; ++k) {
                const auto [a, b] = select_parents(pop, rng);
                pairings.push_back({a, b, {child(f(rng)), child(f(rng))}});
            }
            const auto next = form_next_generation(pop, pairings, c);
            const auto before = fitness_of(pop), after = fitness_of(next);
            CHECK(after.size() == before.size());
            CHECK(*std::max_element(after.begin(), after.end()) >= *std::max_element(before.begin(), before.end()));
        }
    }
}

namespace {

RunResult run_serial(const ScenarioBundle& s, const EaConfig& c) {
    SerialBackend backend(ChromosomeEvaluator(s.fleet(), s.load(), s.fitness()));
    return run(c, s.fleet(), backend);
}

} // namespace

TEST_CASE("run with zero generations returns the best initial member") {
    const auto s = bundled_scenario("mini5");
    EaConfig c;
    c.population_size = 20;
    c.max_generations = 0;
    const auto r = run_serial(s, c);
    CHECK(r.history.size() == 1);
    CHECK(r.evaluations == 20);
    CHECK(r.history[0].best_fitness == r.best_result.fitness);
    CHECK(r.best_result == ChromosomeEvaluator(s.fleet(), s.load(), s.fitness())(r.best));
}

TEST_CASE("run is deterministic for a seed") {
    const auto s = bundled_scenario("mini5");
    EaConfig c;
    c.population_size = 30;
    c.max_generations = 25;
    c.rng_seed = 4;
    const auto a = run_serial(s, c);
    const auto b = run_serial(s, c);
    CHECK(a.history == b.history);
    CHECK(a.best == b.best);
    c.rng_seed = 5;
    CHECK_FALSE(run_serial(s, c).history == a.history);
}

TEST_CASE("run invariants") {
    const auto s = bundled_scenario("mini5");
    for (bool elitism : {true, false}) {
        EaConfig c;
        c.population_size = 24;
        c.max_generations = 40;
        c.elitism = elitism;
        c.rng_seed = 9;
        const auto r = run_serial(s, c);
        REQUIRE(r.history.size() == 41);
        CHECK(r.evaluations == expected_evaluations(c));
        CHECK(r.history.back().evaluations == expected_evaluations(c));
        for (std::size_t g = 1; g < r.history.size(); ++g) {
            CHECK(r.history[g].best_fitness >= r.history[g - 1].best_fitness);
            CHECK(r.history[g].generation == g);
        }
        CHECK_NOTHROW(validate_chromosome(r.best, s.fleet(), resolve_config(c, s.fleet()).chromosome_length_cap));
    }
}

TEST_CASE("run reaches the discretized optimum on tiny instances") {
    std::size_t good = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto s = fixtures::tiny_instance(seed);
        const auto best = oracle::brute_force_best(oracle::instance_of(s.fleet(), s.load(), s.fitness()), {0, 0.5, 1});
        EaConfig c;
        c.population_size = 50;
        c.max_generations = 200;
        c.rng_seed = seed;
        const auto r = run_serial(s, c);
        if (r.best_result.fitness >= 0.99 * best.result.fitness) ++good;
    }
    CHECK(good >= 9);
}
