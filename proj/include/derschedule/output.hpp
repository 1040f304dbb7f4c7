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

/// @file output.hpp
/// @brief Run artifacts: schedule.csv, history.csv, result.meta and an optional
/// gnuplot script. CSVs use '.' as decimal separator and '\n' line endings.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include "derschedule/data.hpp"
#include "derschedule/encoding.hpp"
#include "derschedule/engine.hpp"

namespace derschedule {

struct RunSummary {
    std::string scenario;
    std::string backend; ///< "serial" or "distributed"
    std::size_t workers = 1;
    double wall_time_s = 0.0;
};

/// unit_id,t,power_kwh with one row per unit and interval.
void write_schedule_csv(std::ostream& out, const AbsoluteSchedule& schedule, const Fleet& fleet);

/// generation,best_fitness,mean_fitness,best_cost,best_dtd,best_hu,evaluations
void write_history_csv(std::ostream& out, std::span<const GenerationStats> history);

/// key=value lines: scenario, backend, workers, seed, population_size,
/// generations, fitness, cost, dtd, hu, penalty, evaluations, wall_time_s.
void write_result_meta(std::ostream& out, const RunResult& result, const EaConfig& config, const RunSummary& summary);

/// Plots best and mean fitness from history.csv.
void write_gnuplot_script(std::ostream& out);

/// Writes all artifacts into `dir` (created if missing). Throws Error on I/O failure.
void write_run_outputs(const std::filesystem::path& dir, const ScenarioBundle& scenario, const RunResult& result,
                       const EaConfig& config, const RunSummary& summary, bool gnuplot = false);

/// Parses a key=value file such as result.meta.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& file);

} // namespace derschedule
