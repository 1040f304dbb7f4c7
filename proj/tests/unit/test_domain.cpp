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

#include <random>

#include "derschedule/domain.hpp"
#include "derschedule/error.hpp"
#include "fixtures.hpp"

using namespace derschedule;

namespace {

DerSpec spec(int id, std::size_t T) {
    DerSpec s;
    s.unit_id = UnitId{id};
    s.cost_alpha = 0.01;
    s.availability.assign(T, true);
    return s;
}

ForecastSeries series(int id, std::size_t T, double value = 5.0) { return {UnitId{id}, std::vector<double>(T, value)}; }

} // namespace

TEST_CASE("validate_fleet accepts a consistent fleet") {
    const TimeGrid grid(24);
    const Fleet fleet = validate_fleet({spec(2, 24), spec(1, 24)}, {series(1, 24), series(2, 24)}, grid);
    CHECK(fleet.size() == 2);
    CHECK(fleet.unit_ids()[0] == UnitId{1});
    CHECK(fleet.unit_ids()[1] == UnitId{2});
    CHECK(fleet.grid() == grid);
}

TEST_CASE("validate_fleet rejects duplicate unit ids") {
    CHECK_THROWS_AS(validate_fleet({spec(1, 24), spec(1, 24)}, {series(1, 24), series(1, 24)}, TimeGrid(24)),
                    ValidationError);
}

TEST_CASE("validate_fleet rejects a forecast shorter than the grid") {
    CHECK_THROWS_AS(validate_fleet({spec(1, 24), spec(2, 24)}, {series(1, 24), series(2, 23)}, TimeGrid(24)),
                    ValidationError);
}

TEST_CASE("validate_fleet rejects inconsistent inputs") {
    const TimeGrid grid(3);
    SUBCASE("negative forecast") {
        auto f = series(1, 3);
        f.max_power[1] = -0.5;
        CHECK_THROWS_AS(validate_fleet({spec(1, 3)}, {f}, grid), ValidationError);
    }
    SUBCASE("forecast for an unknown unit") {
        CHECK_THROWS_AS(validate_fleet({spec(1, 3)}, {series(7, 3)}, grid), ValidationError);
    }
    SUBCASE("unit without forecast") {
        CHECK_THROWS_AS(validate_fleet({spec(1, 3), spec(2, 3)}, {series(1, 3)}, grid), ValidationError);
    }
    SUBCASE("mask length") {
        auto s = spec(1, 3);
        s.availability.pop_back();
        CHECK_THROWS_AS(validate_fleet({s}, {series(1, 3)}, grid), ValidationError);
    }
    SUBCASE("negative alpha") {
        auto s = spec(1, 3);
        s.cost_alpha = -1e-6;
        CHECK_THROWS_AS(validate_fleet({s}, {series(1, 3)}, grid), ValidationError);
    }
    SUBCASE("power outside the availability window") {
        auto s = spec(1, 3);
        s.availability[2] = false;
        CHECK_THROWS_AS(validate_fleet({s}, {series(1, 3)}, grid), ValidationError);
        auto f = series(1, 3);
        f.max_power[2] = 0.0;
        CHECK_NOTHROW(validate_fleet({s}, {f}, grid));
    }
}

TEST_CASE("fleet lookup is a bijection between ids and rows") {
    const std::size_t T = 4;
    std::vector<DerSpec> specs;
    std::vector<ForecastSeries> forecasts;
    for (int id : {40, 3, 17, 8, 25}) {
        specs.push_back(spec(id, T));
        forecasts.push_back(series(id, T, id));
    }
    const Fleet fleet = validate_fleet(specs, forecasts, TimeGrid(T));
    for (std::size_t row = 0; row < fleet.size(); ++row) {
        const UnitId id = fleet.unit_ids()[row];
        CHECK(fleet.row_of(id) == row);
        CHECK(fleet.spec(id).unit_id == id);
        CHECK(fleet.forecast(id).unit_id == id);
        CHECK(fleet.forecast(id).max_power[0] == doctest::Approx(id.value));
        if (row > 0) CHECK(fleet.unit_ids()[row - 1] < id);
    }
    CHECK_FALSE(fleet.contains(UnitId{4}));
    CHECK_THROWS_AS(fleet.row_of(UnitId{4}), ValidationError);
}

TEST_CASE("time grid rejects degenerate values") {
    CHECK_THROWS_AS(TimeGrid(0), ValidationError);
    CHECK_THROWS_AS(TimeGrid(24, 0.0), ValidationError);
    CHECK_THROWS_AS(TimeGrid(24, -1.0), ValidationError);
}

TEST_CASE("gene construction clamps the duration and rejects out-of-range values") {
    const TimeGrid grid(24);
    const Gene g(UnitId{1}, 20, 10, 0.5, grid);
    CHECK(g.duration() == 4);
    CHECK(g.end() == 24);

    CHECK_THROWS_AS(Gene(UnitId{1}, 24, 1, 0.5, grid), ValidationError);
    CHECK_THROWS_AS(Gene(UnitId{1}, 0, 0, 0.5, grid), ValidationError);
    CHECK_THROWS_AS(Gene(UnitId{1}, 0, 1, 1.0001, grid), ValidationError);
    CHECK_THROWS_AS(Gene(UnitId{1}, 0, 1, -0.0001, grid), ValidationError);
    CHECK_THROWS_AS(Gene(UnitId{1}, 0, 1, std::nan(""), grid), ValidationError);
}

TEST_CASE("every constructible gene satisfies the range invariants") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 5000; ++i) {
        const std::size_t T = std::uniform_int_distribution<std::size_t>(1, 48)(rng);
        const TimeGrid grid(T);
        const std::size_t start = std::uniform_int_distribution<std::size_t>(0, T - 1)(rng);
        const std::size_t duration = std::uniform_int_distribution<std::size_t>(1, 2 * T)(rng);
        const double f = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const Gene g(UnitId{1}, start, duration, f, grid);
        CHECK(g.start() < T);
        CHECK(g.duration() >= 1);
        CHECK(g.end() <= T);
        CHECK(g.duration() == std::min(duration, T - start));
    }
}

TEST_CASE("validate_chromosome") {
    const Fleet fleet = fixtures::make_fleet({{1, 0, 0, 0, {1, 1, 1}}, {2, 0, 0, 0, {1, 1, 1}}});
    const auto& grid = fleet.grid();
    CHECK_NOTHROW(validate_chromosome(fixtures::chromosome(grid, {{1, 0, 1, 0.5}, {2, 1, 2, 1.0}}), fleet, 4));
    CHECK_THROWS_AS(validate_chromosome(Chromosome{}, fleet, 4), ValidationError);
    CHECK_THROWS_AS(validate_chromosome(fixtures::chromosome(grid, {{3, 0, 1, 0.5}}), fleet, 4), ValidationError);
    CHECK_THROWS_AS(validate_chromosome(fixtures::chromosome(grid, {{1, 0, 1, 0.5}, {1, 0, 1, 0.5}}), fleet, 1),
                    ValidationError);
    // A gene built for a longer horizon does not fit this fleet.
    Chromosome wide;
    wide.genes.emplace_back(UnitId{1}, 5, 1, 0.5, TimeGrid(24));
    CHECK_THROWS_AS(validate_chromosome(wide, fleet, 4), ValidationError);
}

TEST_CASE("validate_load") {
    const TimeGrid grid(3);
    CHECK_NOTHROW(validate_load(LoadProfile{{0, 1, 2}}, grid));
    CHECK_THROWS_AS(validate_load(LoadProfile{{0, 1}}, grid), ValidationError);
    CHECK_THROWS_AS(validate_load(LoadProfile{{0, -1, 2}}, grid), ValidationError);
    CHECK_THROWS_AS(validate_load(LoadProfile{{0, 1, INFINITY}}, grid), ValidationError);
}

TEST_CASE("provenance names round trip") {
    for (auto p : {Provenance::random, Provenance::seeded, Provenance::offspring}) {
        CHECK(provenance_from_string(to_string(p)) == p);
    }
    CHECK_THROWS_AS(provenance_from_string("mutant"), ValidationError);
}
