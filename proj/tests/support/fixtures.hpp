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

#include <cstdint>
#include <filesystem>
#include <string>
#include <tuple>
#include <vector>

#include "derschedule/data.hpp"
#include "derschedule/domain.hpp"
#include "derschedule/engine.hpp"

namespace fixtures {

struct Unit {
    int id = 1;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    std::vector<double> forecast_kw;
};

/// Fleet with every unit available in every interval.
derschedule::Fleet make_fleet(const std::vector<Unit>& units, double interval_hours = 1.0);

derschedule::ScenarioBundle make_bundle(const std::vector<Unit>& units, std::vector<double> demand,
                                        std::string name = "fixture");

/// 2 units, 4 intervals, forecasts 2-10 kW, demand 30-90% of total supply.
derschedule::ScenarioBundle tiny_instance(std::uint64_t seed);

derschedule::Chromosome chromosome(const derschedule::TimeGrid& grid,
                                   const std::vector<std::tuple<int, std::size_t, std::size_t, double>>& genes);

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag = "t");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& content);

/// Directory of the bundled scenarios in the source tree.
std::filesystem::path scenario_root();

/// The built command-line tool.
std::filesystem::path cli_path();

} // namespace fixtures
