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

/// @file harness.hpp
/// @brief Runs one optimization job on a chosen backend, and speedup sweeps.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "derschedule/data.hpp"
#include "derschedule/distribution/coordinator.hpp"
#include "derschedule/distribution/tcp_broker.hpp"
#include "derschedule/engine.hpp"
#include "derschedule/process.hpp"

namespace derschedule {

enum class BackendKind {
    serial,      ///< evaluate in the master process
    in_process,  ///< in-process broker, one worker thread per worker
    spawn_local, ///< embedded TCP broker, one worker child process per worker
    external,    ///< existing TCP broker, workers started separately
};

std::string_view to_string(BackendKind kind);

struct LocalClusterOptions {
    std::filesystem::path worker_executable; ///< a binary with the `worker` subcommand
    std::filesystem::path scenario_dir;
    std::string task_id;
    std::size_t workers = 1;
    double eval_delay_ms = 0.0;
};

/// An embedded TCP broker on a free loopback port plus worker processes
/// connected to it. Workers are terminated on destruction.
class LocalCluster {
  public:
    explicit LocalCluster(const LocalClusterOptions& options);
    ~LocalCluster();

    LocalCluster(const LocalCluster&) = delete;
    LocalCluster& operator=(const LocalCluster&) = delete;

    dist::Endpoint broker_endpoint() const { return server_.endpoint(); }
    std::size_t size() const noexcept { return workers_.size(); }
    const std::string& worker_id(std::size_t i) const { return ids_.at(i); }
    ChildProcess& worker(std::size_t i) { return workers_.at(i); }

    void kill_worker(std::size_t i, int sig);

  private:
    dist::TcpBrokerServer server_;
    std::vector<std::string> ids_;
    std::vector<ChildProcess> workers_;
};

struct JobSpec {
    EaConfig ea;
    BackendKind backend = BackendKind::serial;
    std::size_t workers = 1;
    /// Scenario directory handed to spawned workers.
    std::filesystem::path scenario_dir;
    std::filesystem::path worker_executable;
    std::optional<dist::Endpoint> broker; ///< for BackendKind::external
    std::string task_id;                  ///< generated when empty
    double eval_delay_ms = 0.0;
    std::chrono::milliseconds startup_timeout{30000};
    std::chrono::milliseconds chunk_timeout{30000};
    std::size_t max_retries = 2;
    std::optional<std::filesystem::path> out_dir;
    bool gnuplot = false;
    /// Called after every generation. `cluster` is set for spawn_local runs.
    std::function<void(const GenerationStats&, LocalCluster* cluster)> on_generation;
};

struct JobOutcome {
    RunResult run;
    EaConfig config; ///< resolved
    BackendKind backend = BackendKind::serial;
    std::size_t workers = 1;
    /// Optimization time. For distributed backends it starts once the master
    /// begins waiting for ready signals, after worker processes were launched.
    double wall_time_s = 0.0;
    dist::DistributionStats stats;
};

/// Throws ConfigError for inconsistent specs and forwards runtime failures.
JobOutcome run_job(const ScenarioBundle& scenario, const JobSpec& spec);

/// A fresh task id unique to this process.
std::string make_task_id();

struct SweepRow {
    std::size_t workers = 0;
    std::vector<double> wall_times_s;
    double mean_wall_time_s = 0.0;
    double speedup = 1.0; ///< mean wall time at k=1 divided by this row's
};

struct SweepSpec {
    JobSpec job; ///< backend must be distributed; `workers` is overridden
    std::vector<std::size_t> worker_counts;
    std::size_t repeats = 1;
};

/// Every k (including 1) runs on the distributed backend so the comparison
/// includes the same messaging overhead. Throws ConfigError when the list
/// lacks k=1.
std::vector<SweepRow> run_sweep(const ScenarioBundle& scenario, const SweepSpec& spec,
                                const std::function<void(std::size_t workers, std::size_t repeat,
                                                         const JobOutcome&)>& progress = {});

/// k,mean_wall_time_s,speedup
void write_speedup_csv(std::ostream& out, std::span<const SweepRow> rows);

/// Indices i where speedup[i] < speedup[i-1] * (1 - tolerance).
std::vector<std::size_t> speedup_regressions(std::span<const SweepRow> rows, double tolerance);

} // namespace derschedule
