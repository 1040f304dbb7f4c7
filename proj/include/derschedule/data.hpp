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

/// @file data.hpp
/// @brief Scenario persistence, CSV ingestion and synthetic scenario generation.
///
/// A scenario directory holds four files:
///
///     specs.csv      unit_id,alpha,beta,gamma,avail_mask[,extra attribute columns]
///     forecast.csv   unit_id,t,max_power_kw       (also _w / _mw)
///     load.csv       t,demand_kwh                  (also _wh / _mwh)
///     scenario.meta  key=value lines
///
/// Recognized meta keys: name, T, interval_hours, weight_cost, weight_dtd,
/// fitness_scale_max, cost_best, cost_worst, dtd_best, dtd_worst. Anything else
/// is preserved verbatim.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "derschedule/domain.hpp"
#include "derschedule/objectives.hpp"

namespace derschedule {

/// A complete, validated scheduling problem.
class ScenarioBundle {
  public:
    /// Validates the load against the fleet's grid and the fitness config.
    ScenarioBundle(std::string name, Fleet fleet, LoadProfile load, FitnessConfig fitness,
                   std::map<std::string, std::string> meta = {});

    const std::string& name() const noexcept { return name_; }
    const Fleet& fleet() const noexcept { return fleet_; }
    const TimeGrid& grid() const noexcept { return fleet_.grid(); }
    const LoadProfile& load() const noexcept { return load_; }
    const FitnessConfig& fitness() const noexcept { return fitness_; }
    const std::map<std::string, std::string>& meta() const noexcept { return meta_; }

    bool operator==(const ScenarioBundle&) const = default;

  private:
    std::string name_;
    Fleet fleet_;
    LoadProfile load_;
    FitnessConfig fitness_;
    std::map<std::string, std::string> meta_;
};

ScenarioBundle load_scenario(const std::filesystem::path& dir);

/// Writes the canonical form of `bundle` into `dir` (created if missing).
void save_scenario(const ScenarioBundle& bundle, const std::filesystem::path& dir);

/// 64-bit FNV-1a over the canonical serialization; equal bundles hash equal.
std::uint64_t fingerprint(const ScenarioBundle& bundle);

struct IngestOptions {
    std::string name = "ingested";
    double interval_hours = 1.0;
    /// When set, the load file must have exactly this many intervals.
    std::optional<std::size_t> intervals;
};

/// Builds a bundle from the three CSV files. The horizon is the number of rows in
/// `load_csv`; fitness bounds are the scenario defaults.
ScenarioBundle ingest_csv(const std::filesystem::path& forecast_csv, const std::filesystem::path& specs_csv,
                          const std::filesystem::path& load_csv, const IngestOptions& options = {});

enum class FleetProfile {
    pv_only,      ///< photovoltaics only: power between 07:00 and 17:00
    pv_plus_flex, ///< PV plus a flat dispatchable share, available all day
};

enum class LoadShape {
    single_peak, ///< profile A
    double_peak, ///< profile B (morning and evening peaks)
};

/// Synthetic stand-in for measured PV data. Deterministic per seed.
///
/// PV output follows a Gaussian daytime bell (centre 13:00 +- 0.5 h, sigma 2.5 h,
/// peak 4-10 kW) that is zero before 07:00 and from 17:00 on; the flexible share
/// is a flat 2-6 kW. Cost coefficients are uniform draws:
///
///     pv_only       alpha 0.001-0.003  beta 0.03-0.08  gamma 0.01-0.05
///     pv_plus_flex  alpha 0.002-0.006  beta 0.08-0.18  gamma 0.05-0.15
///
/// The load is scaled so daily demand is 8% of the fleet's daily maximum, with
/// each interval capped at 16% of that interval's maximum supply. Shape A is
/// 0.55 + 0.45 bump(13h, 4h); shape B is 0.30 + 0.45 bump(8h, 2h) + 0.65 bump(19h, 2.5h).
ScenarioBundle generate_synthetic(std::size_t fleet_size, FleetProfile profile, std::uint64_t seed,
                                  const TimeGrid& grid, LoadShape shape = LoadShape::single_peak);

/// Fleet of `flex_count` pv_plus_flex units (ids 1..flex_count) followed by
/// `pv_only_count` pv_only units.
ScenarioBundle generate_mixed(std::size_t flex_count, std::size_t pv_only_count, std::uint64_t seed,
                              const TimeGrid& grid, LoadShape shape, std::string name);

/// Names of the bundled scenarios: uc1, uc2, uc3, mini5.
std::span<const std::string_view> bundled_scenario_names();

/// Regenerates a bundled scenario in memory.
ScenarioBundle bundled_scenario(std::string_view name);

/// Resolves a scenario argument: an existing directory is used as is, otherwise
/// the name is looked up under $DERSCHEDULE_DATA_DIR and then `default_root`.
/// Throws ConfigError when nothing matches.
std::filesystem::path resolve_scenario_dir(const std::string& name_or_path,
                                           const std::filesystem::path& default_root = {});

} // namespace derschedule
