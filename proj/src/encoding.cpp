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

#include "derschedule/encoding.hpp"

#include <algorithm>

#include "derschedule/error.hpp"

namespace derschedule {

AllocationMatrix build_allocation_matrix(const Chromosome& chromosome, const Fleet& fleet) {
    const std::size_t n = fleet.grid().intervals();
    AllocationMatrix alloc(fleet.size(), n);
    for (const auto& gene : chromosome.genes) {
        const std::size_t row = fleet.row_of(gene.unit());
        if (gene.end() > n) {
            throw ValidationError("gene runs past the horizon of the fleet's grid");
        }
        auto cells = alloc.row(row).subspan(gene.start(), gene.duration());
        std::fill(cells.begin(), cells.end(), gene.fraction());
    }
    return alloc;
}

AbsoluteSchedule to_absolute(const AllocationMatrix& alloc, const Fleet& fleet) {
    const std::size_t n = fleet.grid().intervals();
    const double hours = fleet.grid().interval_hours();
    if (alloc.rows() != fleet.size() || alloc.cols() != n) {
        throw ValidationError("allocation matrix dimensions do not match the fleet");
    }
    AbsoluteSchedule schedule(fleet.size(), n);
    const auto forecasts = fleet.forecasts();
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        const auto& max_power = forecasts[i].max_power;
        for (std::size_t t = 0; t < n; ++t) {
            schedule(i, t) = alloc(i, t) * max_power[t] * hours;
        }
    }
    return schedule;
}

AbsoluteSchedule interpret(const Chromosome& chromosome, const Fleet& fleet) {
    return to_absolute(build_allocation_matrix(chromosome, fleet), fleet);
}

} // namespace derschedule
