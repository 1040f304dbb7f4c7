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

#include "derschedule/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "derschedule/error.hpp"

namespace derschedule {

namespace {

std::vector<double> column_sums(const AbsoluteSchedule& schedule) {
    std::vector<double> sums(schedule.cols(), 0.0);
    for (std::size_t i = 0; i < schedule.rows(); ++i) {
        for (std::size_t t = 0; t < schedule.cols(); ++t) {
            sums[t] += schedule(i, t);
        }
    }
    return sums;
}

void check_columns(const AbsoluteSchedule& schedule, const LoadProfile& load) {
    if (schedule.cols() != load.demand.size()) {
        throw ValidationError("schedule has " + std::to_string(schedule.cols()) + " intervals, load has " +
                              std::to_string(load.demand.size()));
    }
}

} // namespace

void validate_fitness_config(const FitnessConfig& config) {
    if (config.weight_cost < 0.0 || config.weight_dtd < 0.0 ||
        std::abs(config.weight_cost + config.weight_dtd - 1.0) > 1e-12) {
        throw ConfigError("fitness weights must be non-negative and sum to 1");
    }
    if (!(config.fitness_scale_max > 0.0)) {
        throw ConfigError("fitness scale maximum must be positive");
    }
    if (!(config.cost_bounds.best < config.cost_bounds.worst)) {
        throw ConfigError("cost bounds need best < worst");
    }
    if (!(config.dtd_bounds.best < config.dtd_bounds.worst)) {
        throw ConfigError("DTD bounds need best < worst");
    }
}

double cost(const AbsoluteSchedule& schedule, const Fleet& fleet) {
    if (schedule.rows() != fleet.size()) {
        throw ValidationError("schedule rows do not match the fleet");
    }
    const auto specs = fleet.specs();
    double total = 0.0;
    for (std::size_t i = 0; i < schedule.rows(); ++i) {
        const auto& s = specs[i];
        for (double p : schedule.row(i)) {
            if (p > 0.0) {
                total += s.cost_alpha * p * p + s.cost_beta * p + s.cost_gamma;
            }
        }
    }
    return total;
}

double dtd(const AbsoluteSchedule& schedule, const LoadProfile& load) {
    check_columns(schedule, load);
    const auto supply = column_sums(schedule);
    double total = 0.0;
    for (std::size_t t = 0; t < supply.size(); ++t) {
        total += std::abs(supply[t] - load.demand[t]);
    }
    return total;
}

std::size_t hours_undersupply(const AbsoluteSchedule& schedule, const LoadProfile& load) {
    check_columns(schedule, load);
    const auto supply = column_sums(schedule);
    std::size_t hu = 0;
    for (std::size_t t = 0; t < supply.size(); ++t) {
        if (load.demand[t] > supply[t]) {
            ++hu;
        }
    }
    return hu;
}

double penalty(std::size_t hu, const TimeGrid& grid) {
    if (hu > grid.intervals()) {
        throw ValidationError("hours of undersupply " + std::to_string(hu) + " exceed horizon " +
                              std::to_string(grid.intervals()));
    }
    return 1.0 - static_cast<double>(hu) / static_cast<double>(grid.intervals());
}

double normalize_criterion(double raw, const CriterionBounds& bounds, double scale_max) {
    if (!(bounds.best < bounds.worst)) {
        throw ConfigError("criterion bounds need best < worst");
    }
    if (raw <= bounds.best) return scale_max;
    if (raw >= bounds.worst) return 0.0;
    return scale_max * (bounds.worst - raw) / (bounds.worst - bounds.best);
}

EvaluationResult fitness(const CriterionValues& values, const FitnessConfig& config, const TimeGrid& grid) {
    EvaluationResult r;
    r.cost = values.cost;
    r.dtd = values.dtd;
    r.hu = values.hu;
    r.penalty = penalty(values.hu, grid);
    const double cost_score = normalize_criterion(values.cost, config.cost_bounds, config.fitness_scale_max);
    const double dtd_score = normalize_criterion(values.dtd, config.dtd_bounds, config.fitness_scale_max);
    r.fitness = (config.weight_cost * cost_score + config.weight_dtd * dtd_score) * r.penalty;
    r.fitness = std::clamp(r.fitness, 0.0, config.fitness_scale_max);
    return r;
}

EvaluationResult evaluate_schedule(const AbsoluteSchedule& schedule, const Fleet& fleet, const LoadProfile& load,
                                   const FitnessConfig& config) {
    CriterionValues v;
    v.cost = cost(schedule, fleet);
    v.dtd = dtd(schedule, load);
    v.hu = hours_undersupply(schedule, load);
    return fitness(v, config, fleet.grid());
}

FitnessConfig default_fitness_config(const Fleet& fleet, const LoadProfile& load) {
    AllocationMatrix full(fleet.size(), fleet.grid().intervals(), 1.0);
    const double cost_worst = cost(to_absolute(full, fleet), fleet);
    double demand_total = 0.0;
    for (double d : load.demand) demand_total += d;

    FitnessConfig config;
    config.cost_bounds = {0.0, cost_worst > 0.0 ? cost_worst : 1.0};
    config.dtd_bounds = {0.0, demand_total > 0.0 ? demand_total : 1.0};
    return config;
}

} // namespace derschedule
