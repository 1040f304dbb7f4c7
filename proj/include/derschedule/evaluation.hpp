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

#include <chrono>
#include <cstddef>
#include <span>
#include <vector>

#include "derschedule/domain.hpp"
#include "derschedule/objectives.hpp"

namespace derschedule {

/// Interprets and scores chromosomes for one scenario. Pure apart from the
/// optional artificial delay, which emulates an expensive simulator.
class ChromosomeEvaluator {
  public:
    ChromosomeEvaluator(Fleet fleet, LoadProfile load, FitnessConfig config,
                        std::chrono::microseconds delay = std::chrono::microseconds::zero());

    EvaluationResult operator()(const Chromosome& chromosome) const;

    const Fleet& fleet() const noexcept { return fleet_; }
    const LoadProfile& load() const noexcept { return load_; }
    const FitnessConfig& fitness_config() const noexcept { return config_; }
    std::chrono::microseconds delay() const noexcept { return delay_; }

  private:
    Fleet fleet_;
    LoadProfile load_;
    FitnessConfig config_;
    std::chrono::microseconds delay_;
};

/// Evaluates ordered batches. Implementations may evaluate in any order
/// internally but must return results aligned with the input.
class EvaluationBackend {
  public:
    virtual ~EvaluationBackend() = default;

    /// `batch_index` is 0 for the initial population and g for the offspring
    /// of generation g.
    virtual std::vector<EvaluationResult> evaluate(std::span<const Chromosome> batch, std::size_t batch_index) = 0;
};

class SerialBackend final : public EvaluationBackend {
  public:
    explicit SerialBackend(ChromosomeEvaluator evaluator) : evaluator_(std::move(evaluator)) {}

    std::vector<EvaluationResult> evaluate(std::span<const Chromosome> batch, std::size_t batch_index) override;

  private:
    ChromosomeEvaluator evaluator_;
};

} // namespace derschedule
