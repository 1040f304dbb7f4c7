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

/// @file domain.hpp
/// @brief Problem-level value types shared by every module.
///
/// All types are immutable after construction in practice (the library never
/// mutates a validated Fleet) and are safe to copy across threads.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace derschedule {

/// Identity of one DER. Doubles as the gene ID in chromosomes.
struct UnitId {
    std::int32_t value = 0;

    constexpr auto operator<=>(const UnitId&) const = default;
};

/// Uniform planning horizon: `intervals()` slots of `interval_hours()` each.
class TimeGrid {
  public:
    explicit TimeGrid(std::size_t intervals = 24, double interval_hours = 1.0);

    std::size_t intervals() const noexcept { return intervals_; }
    double interval_hours() const noexcept { return interval_hours_; }

    bool operator==(const TimeGrid&) const = default;

  private:
    std::size_t intervals_;
    double interval_hours_;
};

/// Static description of one DER.
///
/// `attributes` holds data that is carried along but not used by any objective
/// (minimum up/down times, storage capacity, ramp limits, ...).
struct DerSpec {
    UnitId unit_id;
    double cost_alpha = 0.0; ///< EUR/kWh^2
    double cost_beta = 0.0;  ///< EUR/kWh
    double cost_gamma = 0.0; ///< EUR per committed interval
    std::vector<bool> availability;
    double max_power_hint = 0.0; ///< kW, informational
    std::map<std::string, std::string> attributes;

    bool operator==(const DerSpec&) const = default;
};

/// Forecast maximum obtainable power per interval, in kW.
struct ForecastSeries {
    UnitId unit_id;
    std::vector<double> max_power;

    bool operator==(const ForecastSeries&) const = default;
};

/// Requested energy per interval, in kWh.
struct LoadProfile {
    std::vector<double> demand;

    bool operator==(const LoadProfile&) const = default;
};

/// One scheduling operation: run `unit` from `start` for `duration` intervals at
/// `fraction` of its forecast maximum.
///
/// The constructor is the only way to build a gene and it enforces the range
/// invariants: start in [0, T), duration >= 1, fraction in [0, 1]. A duration
/// that runs past the horizon is clamped to T - start.
class Gene {
  public:
    Gene(UnitId unit, std::size_t start, std::size_t duration, double fraction, const TimeGrid& grid);

    UnitId unit() const noexcept { return unit_; }
    std::size_t start() const noexcept { return start_; }
    std::size_t duration() const noexcept { return duration_; }
    std::size_t end() const noexcept { return start_ + duration_; }
    double fraction() const noexcept { return fraction_; }

    bool operator==(const Gene&) const = default;

  private:
    UnitId unit_;
    std::size_t start_;
    std::size_t duration_;
    double fraction_;
};

enum class Provenance { random, seeded, offspring };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

/// Variable-length ordered chain of genes.
struct Chromosome {
    std::vector<Gene> genes;
    Provenance provenance = Provenance::random;

    std::size_t size() const noexcept { return genes.size(); }
    bool operator==(const Chromosome&) const = default;
};

/// Criteria and fitness of one evaluated chromosome.
struct EvaluationResult {
    double cost = 0.0;    ///< EUR
    double dtd = 0.0;     ///< kWh
    std::size_t hu = 0;   ///< undersupplied intervals
    double penalty = 0.0; ///< 1 - hu/T
    double fitness = 0.0; ///< [0, fitness_scale_max]

    bool operator==(const EvaluationResult&) const = default;
};

/// A validated DER fleet: specs and forecasts, sorted by ascending unit id,
/// with constant-time lookup from id to row.
///
/// Only `validate_fleet` can build one.
class Fleet {
  public:
    std::size_t size() const noexcept { return specs_.size(); }
    bool empty() const noexcept { return specs_.empty(); }
    const TimeGrid& grid() const noexcept { return grid_; }

    std::span<const DerSpec> specs() const noexcept { return specs_; }
    std::span<const ForecastSeries> forecasts() const noexcept { return forecasts_; }
    std::span<const UnitId> unit_ids() const noexcept { return ids_; }

    bool contains(UnitId id) const noexcept { return rows_.contains(id.value); }

    /// Row index of `id`; throws ValidationError for unknown ids.
    std::size_t row_of(UnitId id) const;

    const DerSpec& spec(UnitId id) const { return specs_[row_of(id)]; }
    const ForecastSeries& forecast(UnitId id) const { return forecasts_[row_of(id)]; }

    bool operator==(const Fleet& other) const {
        return grid_ == other.grid_ && specs_ == other.specs_ && forecasts_ == other.forecasts_;
    }

  private:
    friend Fleet validate_fleet(std::vector<DerSpec>, std::vector<ForecastSeries>, const TimeGrid&);
    Fleet() = default;

    TimeGrid grid_;
    std::vector<DerSpec> specs_;
    std::vector<ForecastSeries> forecasts_;
    std::vector<UnitId> ids_;
    std::unordered_map<std::int32_t, std::size_t> rows_;
};

/// Checks specs and forecasts against each other and the grid.
///
/// Rejects duplicate ids, specs without a forecast (and vice versa), series or
/// masks whose length differs from the grid, negative or non-finite values,
/// negative alpha, and forecast power outside the availability window.
Fleet validate_fleet(std::vector<DerSpec> specs, std::vector<ForecastSeries> forecasts, const TimeGrid& grid);

/// Throws ValidationError unless the load has one finite non-negative value per interval.
void validate_load(const LoadProfile& load, const TimeGrid& grid);

/// Throws ValidationError unless the chromosome is non-empty, within `length_cap`,
/// references only fleet units, and every gene fits the fleet's grid.
void validate_chromosome(const Chromosome& chromosome, const Fleet& fleet, std::size_t length_cap);

} // namespace derschedule

template <>
struct std::hash<derschedule::UnitId> {
    std::size_t operator()(const derschedule::UnitId& id) const noexcept {
        return std::hash<std::int32_t>{}(id.value);
    }
};
