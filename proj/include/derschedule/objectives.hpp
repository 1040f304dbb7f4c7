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

/// @file objectives.hpp
/// @brief Scheduling criteria and the weighted-sum fitness.
///
/// Raw criteria are minimized (cost in EUR, daily total deviation in kWh) while
/// fitness is maximized on [0, fitness_scale_max]. Each raw criterion is mapped
/// linearly onto the fitness scale between a best and a worst bound, the two
/// scores are combined with fixed weights, and the result is multiplied by the
/// undersupply penalty 1 - HU/T.

#include <cstddef>

#include "derschedule/domain.hpp"
#include "derschedule/encoding.hpp"

namespace derschedule {

struct CriterionBounds {
    double best = 0.0;
    double worst = 1.0;

    bool operator==(const CriterionBounds&) const = default;
};

struct FitnessConfig {
    double weight_cost = 0.4;
    double weight_dtd = 0.6;
    double fitness_scale_max = 100000.0;
    CriterionBounds cost_bounds;
    CriterionBounds dtd_bounds;

    bool operator==(const FitnessConfig&) const = default;
};

/// Throws ConfigError unless weights are non-negative and sum to 1, both
/// bounds satisfy best < worst, and the scale is positive.
void validate_fitness_config(const FitnessConfig& config);

/// Sum over units and intervals of alpha*P^2 + beta*P + gamma, where gamma is
/// only charged for intervals in which the unit is dispatched (P > 0).
double cost(const AbsoluteSchedule& schedule, const Fleet& fleet);

/// Sum over intervals of |supply_t - demand_t|.
double dtd(const AbsoluteSchedule& schedule, const LoadProfile& load);

/// Number of intervals where demand strictly exceeds scheduled supply.
std::size_t hours_undersupply(const AbsoluteSchedule& schedule, const LoadProfile& load);

/// 1 - hu/T. Throws ValidationError for hu > T.
double penalty(std::size_t hu, const TimeGrid& grid);

/// Maps a minimized raw value onto [0, scale_max]: best (or better) gives
/// scale_max, worst (or worse) gives 0, linear in between.
double normalize_criterion(double raw, const CriterionBounds& bounds, double scale_max);

struct CriterionValues {
    double cost = 0.0;
    double dtd = 0.0;
    std::size_t hu = 0;
};

/// Combines raw criteria into an EvaluationResult.
EvaluationResult fitness(const CriterionValues& values, const FitnessConfig& config, const TimeGrid& grid);

/// All criteria and fitness of one absolute schedule.
EvaluationResult evaluate_schedule(const AbsoluteSchedule& schedule, const Fleet& fleet, const LoadProfile& load,
                                   const FitnessConfig& config);

/// Scenario-intrinsic bounds: cost from 0 to the cost of running every unit at
/// its forecast maximum in every interval, DTD from 0 to total demand. A worst
/// bound that would collapse onto the best one is lifted to best + 1.
FitnessConfig default_fitness_config(const Fleet& fleet, const LoadProfile& load);

} // namespace derschedule
