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

/// @file coordinator.hpp
/// @brief Master side of distributed evaluation.
///
/// Each batch is split evenly over the live workers and chunk i goes to worker
/// i mod k (static round-robin). A chunk that is not answered within the chunk
/// timeout is re-sent to a surviving worker, and the silent worker is dropped
/// from the roster; after `max_retries` re-sends the job fails. Replies for
/// chunks already answered are discarded, so at-least-once delivery is safe.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "derschedule/data.hpp"
#include "derschedule/distribution/broker.hpp"
#include "derschedule/engine.hpp"
#include "derschedule/evaluation.hpp"

namespace derschedule::dist {

struct DistributionOptions {
    std::string task_id;
    std::size_t worker_count = 1;
    std::chrono::milliseconds startup_timeout{30000};
    std::chrono::milliseconds chunk_timeout{30000};
    std::size_t max_retries = 2;
    std::chrono::milliseconds roll_call_interval{500};
    /// Workers announcing a different scenario fingerprint are not admitted.
    std::optional<std::uint64_t> scenario_fingerprint;
};

struct DistributionStats {
    std::size_t batches = 0;
    std::size_t chunks_sent = 0;
    std::size_t retries = 0;
    std::size_t workers_lost = 0;
    std::size_t naks = 0;
    std::size_t failures = 0;
    std::size_t discarded_replies = 0;  ///< stale, foreign or already-answered
    std::size_t rejected_workers = 0;   ///< wrong scenario fingerprint
};

class DistributedBackend final : public EvaluationBackend {
  public:
    /// Subscribes to the results and ready topics immediately, so no reply
    /// published after construction is missed.
    DistributedBackend(Broker& broker, DistributionOptions options);
    ~DistributedBackend() override;

    DistributedBackend(const DistributedBackend&) = delete;
    DistributedBackend& operator=(const DistributedBackend&) = delete;

    /// Blocks until `worker_count` distinct workers have announced themselves,
    /// re-broadcasting a roll call meanwhile. Throws StartupError on timeout.
    const std::vector<std::string>& await_workers();

    /// Throws StartupError before await_workers succeeded, WorkerLossError when
    /// a chunk exhausts its retries, ProtocolError when a chunk is refused by
    /// every attempt.
    std::vector<EvaluationResult> evaluate(std::span<const Chromosome> batch, std::size_t batch_index) override;

    /// Publishes the terminate message. Idempotent.
    void terminate();

    const std::vector<std::string>& roster() const noexcept { return roster_; }
    const DistributionStats& stats() const noexcept { return stats_; }
    const DistributionOptions& options() const noexcept { return options_; }

  private:
    Broker& broker_;
    DistributionOptions options_;
    std::shared_ptr<Subscription> results_;
    std::shared_ptr<Subscription> ready_;
    std::vector<std::string> roster_;
    bool ready_done_ = false;
    bool terminated_ = false;
    DistributionStats stats_;
};

struct TaskDescriptor {
    std::string task_id;
    std::string scenario;
    EaConfig ea;
    std::size_t worker_count = 1;
};

struct JobResult {
    RunResult run;
    DistributionStats stats;
    std::vector<std::string> workers; ///< roster at the end of the run
    double wall_time_s = 0.0;         ///< from the first ready wait to termination
};

struct CoordinateOptions {
    std::chrono::milliseconds startup_timeout{30000};
    std::chrono::milliseconds chunk_timeout{30000};
    std::size_t max_retries = 2;
    std::optional<std::filesystem::path> out_dir; ///< persist the final result here
    bool gnuplot = false;
    RunOptions run;
};

/// Waits for the workers, runs the engine on the distributed backend, then
/// publishes terminate (also on failure) and persists the result when
/// `out_dir` is set.
JobResult coordinate(const TaskDescriptor& task, Broker& broker, const ScenarioBundle& scenario,
                     const CoordinateOptions& options = {});

} // namespace derschedule::dist
