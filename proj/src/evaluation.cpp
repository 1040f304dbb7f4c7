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

#include "derschedule/evaluation.hpp"

#include <thread>

#include "derschedule/encoding.hpp"

namespace derschedule {

ChromosomeEvaluator::ChromosomeEvaluator(Fleet fleet, LoadProfile load, FitnessConfig config,
                                         std::chrono::microseconds delay)
    : fleet_(std::move(fleet)), load_(std::move(load)), config_(config), delay_(delay) {
    validate_load(load_, fleet_.grid());
    validate_fitness_config(config_);
}

EvaluationResult ChromosomeEvaluator::operator()(const Chromosome& chromosome) const {
    if (delay_.count() > 0) {
        std::this_thread::sleep_for(delay_);
    }
    return evaluate_schedule(interpret(chromosome, fleet_), fleet_, load_, config_);
}

std::vector<EvaluationResult> SerialBackend::evaluate(std::span<const Chromosome> batch, std::size_t) {
    std::vector<EvaluationResult> out;
    out.reserve(batch.size());
    for (const auto& c : batch) {
        out.push_back(evaluator_(c));
    }
    return out;
}

} // namespace derschedule
