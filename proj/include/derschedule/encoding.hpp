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

/// @file encoding.hpp
/// @brief Two-step chromosome interpretation.
///
/// Step one writes each gene's power fraction into a DER x interval matrix,
/// genes applied in chromosome order so a later gene overwrites earlier cells
/// of the same unit. Step two scales every fraction by the unit's forecast
/// maximum for that interval, giving energy in kWh.
///
/// Rows are ordered by ascending unit id (the Fleet's row order).

#include <cstddef>
#include <span>
#include <vector>

#include "derschedule/domain.hpp"

namespace derschedule {

namespace detail {

/// Dense row-major unit x interval matrix. Tag keeps fraction and energy
/// matrices from being mixed up.
template <class Tag>
class UnitTimeMatrix {
  public:
    UnitTimeMatrix() = default;
    UnitTimeMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double operator()(std::size_t row, std::size_t col) const noexcept { return values_[row * cols_ + col]; }
    double& operator()(std::size_t row, std::size_t col) noexcept { return values_[row * cols_ + col]; }

    std::span<const double> row(std::size_t r) const noexcept { return {values_.data() + r * cols_, cols_}; }
    std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }

    std::span<const double> values() const noexcept { return values_; }

    bool operator==(const UnitTimeMatrix&) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

struct FractionTag {};
struct EnergyTag {};

} // namespace detail

/// Relative power fractions in [0, 1]; default entry 0.
using AllocationMatrix = detail::UnitTimeMatrix<detail::FractionTag>;

/// Scheduled energy P[i][t] in kWh.
using AbsoluteSchedule = detail::UnitTimeMatrix<detail::EnergyTag>;

AllocationMatrix build_allocation_matrix(const Chromosome& chromosome, const Fleet& fleet);

AbsoluteSchedule to_absolute(const AllocationMatrix& alloc, const Fleet& fleet);

/// build_allocation_matrix followed by to_absolute.
AbsoluteSchedule interpret(const Chromosome& chromosome, const Fleet& fleet);

} // namespace derschedule
