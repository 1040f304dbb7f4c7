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

#include "derschedule/domain.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "derschedule/error.hpp"

namespace derschedule {

namespace {

std::string unit_name(UnitId id) { return "unit " + std::to_string(id.value); }

void check_series(std::span<const double> values, std::size_t expected, const std::string& what) {
    if (values.size() != expected) {
        throw ValidationError(what + ": length " + std::to_string(values.size()) + " does not match " +
                              std::to_string(expected) + " intervals");
    }
    for (std::size_t t = 0; t < values.size(); ++t) {
        if (!std::isfinite(values[t]) || values[t] < 0.0) {
            throw ValidationError(what + ": value at t=" + std::to_string(t) + " must be finite and >= 0");
        }
    }
}

} // namespace

TimeGrid::TimeGrid(std::size_t intervals, double interval_hours)
    : intervals_(intervals), interval_hours_(interval_hours) {
    if (intervals_ == 0) {
        throw ValidationError("time grid needs at least one interval");
    }
    if (!std::isfinite(interval_hours_) || interval_hours_ <= 0.0) {
        throw ValidationError("interval duration must be positive");
    }
}

Gene::Gene(UnitId unit, std::size_t start, std::size_t duration, double fraction, const TimeGrid& grid)
    : unit_(unit), start_(start), duration_(duration), fraction_(fraction) {
    if (start_ >= grid.intervals()) {
        throw ValidationError("gene start " + std::to_string(start_) + " outside horizon of " +
                              std::to_string(grid.intervals()));
    }
    if (duration_ == 0) {
        throw ValidationError("gene duration must be >= 1");
    }
    if (!(fraction_ >= 0.0 && fraction_ <= 1.0)) {
        throw ValidationError("gene power fraction must lie in [0, 1]");
    }
    duration_ = std::min(duration_, grid.intervals() - start_);
}

std::string_view to_string(Provenance p) {
    switch (p) {
    case Provenance::random:
        return "random";
    case Provenance::seeded:
        return "seeded";
    case Provenance::offspring:
        return "offspring";
    }
    return "random";
}

Provenance provenance_from_string(std::string_view s) {
    if (s == "random") return Provenance::random;
    if (s == "seeded") return Provenance::seeded;
    if (s == "offspring") return Provenance::offspring;
    throw ValidationError("unknown provenance '" + std::string(s) + "'");
}

std::size_t Fleet::row_of(UnitId id) const {
    auto it = rows_.find(id.value);
    if (it == rows_.end()) {
        throw ValidationError(unit_name(id) + " is not part of the fleet");
    }
    return it->second;
}

Fleet validate_fleet(std::vector<DerSpec> specs, std::vector<ForecastSeries> forecasts, const TimeGrid& grid) {
    const std::size_t n = grid.intervals();

    std::unordered_set<std::int32_t> spec_ids;
    for (const auto& s : specs) {
        if (!spec_ids.insert(s.unit_id.value).second) {
            throw ValidationError("duplicate " + unit_name(s.unit_id));
        }
        if (s.availability.size() != n) {
            throw ValidationError(unit_name(s.unit_id) + ": availability mask length " +
                                  std::to_string(s.availability.size()) + " does not match " +
                                  std::to_string(n) + " intervals");
        }
        if (!std::isfinite(s.cost_alpha) || s.cost_alpha < 0.0) {
            throw ValidationError(unit_name(s.unit_id) + ": cost alpha must be finite and >= 0");
        }
        if (!std::isfinite(s.cost_beta) || !std::isfinite(s.cost_gamma) || !std::isfinite(s.max_power_hint)) {
            throw ValidationError(unit_name(s.unit_id) + ": non-finite cost coefficient");
        }
    }

    std::unordered_set<std::int32_t> forecast_ids;
    for (const auto& f : forecasts) {
        if (!forecast_ids.insert(f.unit_id.value).second) {
            throw ValidationError("duplicate forecast for " + unit_name(f.unit_id));
        }
        if (!spec_ids.contains(f.unit_id.value)) {
            throw ValidationError("forecast for unknown " + unit_name(f.unit_id));
        }
        check_series(f.max_power, n, "forecast of " + unit_name(f.unit_id));
    }
    for (const auto& s : specs) {
        if (!forecast_ids.contains(s.unit_id.value)) {
            throw ValidationError("missing forecast for " + unit_name(s.unit_id));
        }
    }

    auto by_id = [](const auto& a, const auto& b) { return a.unit_id < b.unit_id; };
    std::sort(specs.begin(), specs.end(), by_id);
    std::sort(forecasts.begin(), forecasts.end(), by_id);

    for (std::size_t i = 0; i < specs.size(); ++i) {
        for (std::size_t t = 0; t < n; ++t) {
            if (!specs[i].availability[t] && forecasts[i].max_power[t] != 0.0) {
                throw ValidationError(unit_name(specs[i].unit_id) + ": forecast power at t=" + std::to_string(t) +
                                      " outside the availability window");
            }
        }
    }

    Fleet fleet;
    fleet.grid_ = grid;
    fleet.ids_.reserve(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        fleet.ids_.push_back(specs[i].unit_id);
        fleet.rows_.emplace(specs[i].unit_id.value, i);
    }
    fleet.specs_ = std::move(specs);
    fleet.forecasts_ = std::move(forecasts);
    return fleet;
}

void validate_load(const LoadProfile& load, const TimeGrid& grid) {
    check_series(load.demand, grid.intervals(), "load profile");
}

void validate_chromosome(const Chromosome& chromosome, const Fleet& fleet, std::size_t length_cap) {
    if (chromosome.genes.empty()) {
        throw ValidationError("chromosome has no genes");
    }
    if (chromosome.genes.size() > length_cap) {
        throw ValidationError("chromosome length " + std::to_string(chromosome.genes.size()) + " exceeds cap " +
                              std::to_string(length_cap));
    }
    for (const auto& g : chromosome.genes) {
        if (!fleet.contains(g.unit())) {
            throw ValidationError("chromosome references unknown " + unit_name(g.unit()));
        }
        if (g.end() > fleet.grid().intervals()) {
            throw ValidationError("gene of " + unit_name(g.unit()) + " runs past the horizon");
        }
    }
}

} // namespace derschedule
