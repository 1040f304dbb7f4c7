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

#include "fixtures.hpp"

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "derschedule/objectives.hpp"

namespace fixtures {

using namespace derschedule;

Fleet make_fleet(const std::vector<Unit>& units, double interval_hours) {
    const std::size_t T = units.empty() ? 1 : units.front().forecast_kw.size();
    const TimeGrid grid(T, interval_hours);
    std::vector<DerSpec> specs;
    std::vector<ForecastSeries> forecasts;
    for (const auto& u : units) {
        DerSpec s;
        s.unit_id = UnitId{u.id};
        s.cost_alpha = u.alpha;
        s.cost_beta = u.beta;
        s.cost_gamma = u.gamma;
        s.availability.assign(u.forecast_kw.size(), true);
        specs.push_back(std::move(s));
        forecasts.push_back({UnitId{u.id}, u.forecast_kw});
    }
    return validate_fleet(std::move(specs), std::move(forecasts), grid);
}

ScenarioBundle make_bundle(const std::vector<Unit>& units, std::vector<double> demand, std::string name) {
    Fleet fleet = make_fleet(units);
    LoadProfile load{std::move(demand)};
    FitnessConfig config = default_fitness_config(fleet, load);
    return ScenarioBundle(std::move(name), std::move(fleet), std::move(load), config);
}

ScenarioBundle tiny_instance(std::uint64_t seed) {
    std::mt19937_64 rng(seed * 7919 + 17);
    std::uniform_real_distribution<double> kw(2.0, 10.0), share(0.3, 0.9), a(0.001, 0.01), b(0.05, 0.2),
        g(0.01, 0.1);
    std::vector<Unit> units;
    for (int id = 1; id <= 2; ++id) {
        Unit u;
        u.id = id;
        u.alpha = a(rng);
        u.beta = b(rng);
        u.gamma = g(rng);
        for (int t = 0; t < 4; ++t) u.forecast_kw.push_back(kw(rng));
        units.push_back(u);
    }
    std::vector<double> demand;
    for (int t = 0; t < 4; ++t) demand.push_back(share(rng) * (units[0].forecast_kw[t] + units[1].forecast_kw[t]));
    return make_bundle(units, demand, "tiny" + std::to_string(seed));
}

Chromosome chromosome(const TimeGrid& grid, const std::vector<std::tuple<int, std::size_t, std::size_t, double>>& genes) {
    Chromosome c;
    for (const auto& [u, s, d, f] : genes) c.genes.emplace_back(UnitId{u}, s, d, f, grid);
    return c;
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("derschedule-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

std::filesystem::path scenario_root() { return DERSCHEDULE_TEST_SCENARIO_ROOT; }

std::filesystem::path cli_path() { return DERSCHEDULE_TEST_CLI; }

} // namespace fixtures
