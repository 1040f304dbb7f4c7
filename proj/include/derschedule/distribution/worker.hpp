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

/// @file worker.hpp
/// @brief Evaluation worker: interprets and scores the chunks sent to it.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <optional>
#include <string>

#include "derschedule/data.hpp"
#include "derschedule/distribution/broker.hpp"

namespace derschedule::dist {

struct WorkerOptions {
    std::string task_id;
    std::string worker_id;
    std::chrono::microseconds eval_delay{0};
    /// Stop answering (but keep running) after this many chunks. Test hook for
    /// silent worker loss.
    std::optional<std::size_t> go_silent_after;
    std::chrono::milliseconds poll_interval{50};
};

enum class WorkerExit {
    terminated,  ///< the master sent `terminate`
    stopped,     ///< the stop flag was raised
    broker_lost, ///< the broker connection closed
};

struct WorkerStats {
    std::size_t chunks = 0;
    std::size_t evaluations = 0;
    std::size_t naks = 0;
    std::size_t failures = 0;
};

/// Subscribes to its chunk and control topics, announces itself on
/// workers/ready and then serves chunks until told to stop. Answers each
/// roll call by announcing itself again.
WorkerExit run_worker(Broker& broker, const ScenarioBundle& scenario, const WorkerOptions& options,
                      const std::atomic<bool>& stop, WorkerStats* stats = nullptr);

} // namespace derschedule::dist
