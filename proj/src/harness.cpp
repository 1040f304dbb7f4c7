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

#include "derschedule/harness.hpp"

#include <signal.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <thread>

#include "derschedule/distribution/worker.hpp"
#include "derschedule/error.hpp"
#include "derschedule/evaluation.hpp"
#include "derschedule/output.hpp"
#include "derschedule/text.hpp"

namespace derschedule {

namespace {

using Clock = std::chrono::steady_clock;

std::chrono::microseconds delay_of(double ms) {
    if (!(ms >= 0.0) || !std::isfinite(ms)) throw ConfigError("evaluation delay must be a non-negative number");
    return std::chrono::microseconds(std::llround(ms * 1000.0));
}

dist::CoordinateOptions coordinate_options(const JobSpec& spec, LocalCluster* cluster) {
    dist::CoordinateOptions o;
    o.startup_timeout = spec.startup_timeout;
    o.chunk_timeout = spec.chunk_timeout;
    o.max_retries = spec.max_retries;
    o.out_dir = spec.out_dir;
    o.gnuplot = spec.gnuplot;
    if (spec.on_generation) {
        o.run.on_generation = [&spec, cluster](const GenerationStats& s) { spec.on_generation(s, cluster); };
    }
    return o;
}

JobOutcome from_job(dist::JobResult job, const ScenarioBundle& scenario, const JobSpec& spec) {
    JobOutcome out;
    out.run = std::move(job.run);
    out.config = resolve_config(spec.ea, scenario.fleet());
    out.backend = spec.backend;
    out.workers = spec.workers;
    out.wall_time_s = job.wall_time_s;
    out.stats = job.stats;
    return out;
}

JobOutcome run_serial(const ScenarioBundle& scenario, const JobSpec& spec) {
    SerialBackend backend(ChromosomeEvaluator(scenario.fleet(), scenario.load(), scenario.fitness(),
                                              delay_of(spec.eval_delay_ms)));
    RunOptions options;
    if (spec.on_generation) {
        options.on_generation = [&spec](const GenerationStats& s) { spec.on_generation(s, nullptr); };
    }
    JobOutcome out;
    out.config = resolve_config(spec.ea, scenario.fleet());
    validate_config(out.config);
    const auto start = Clock::now();
    out.run = run(out.config, scenario.fleet(), backend, options);
    out.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    out.backend = BackendKind::serial;
    out.workers = 1;
    if (spec.out_dir) {
        write_run_outputs(*spec.out_dir, scenario, out.run, out.config,
                          RunSummary{scenario.name(), "serial", 1, out.wall_time_s}, spec.gnuplot);
    }
    return out;
}

JobOutcome run_in_process(const ScenarioBundle& scenario, const JobSpec& spec, const std::string& task_id) {
    dist::InProcessBroker broker;
    std::atomic<bool> stop{false};
    std::vector<std::thread> threads;
    const auto delay = delay_of(spec.eval_delay_ms);
    for (std::size_t i = 0; i < spec.workers; ++i) {
        threads.emplace_back([&, i] {
            dist::WorkerOptions w;
            w.task_id = task_id;
            w.worker_id = "w" + std::to_string(i);
            w.eval_delay = delay;
            dist::run_worker(broker, scenario, w, stop);
        });
    }
    struct Joiner {
        std::atomic<bool>& stop;
        std::vector<std::thread>& threads;
        ~Joiner() {
            stop = true;
            for (auto& t : threads) t.join();
        }
    } joiner{stop, threads};

    const dist::TaskDescriptor task{task_id, scenario.name(), spec.ea, spec.workers};
    return from_job(dist::coordinate(task, broker, scenario, coordinate_options(spec, nullptr)), scenario, spec);
}

} // namespace

std::string_view to_string(BackendKind kind) {
    switch (kind) {
    case BackendKind::serial: return "serial";
    case BackendKind::in_process: return "in_process";
    case BackendKind::spawn_local: return "spawn_local";
    case BackendKind::external: return "external";
    }
    return "unknown";
}

std::string make_task_id() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    char buf[64];
    std::snprintf(buf, sizeof buf, "t%d-%u-%08x", static_cast<int>(::getpid()), counter++, rd());
    return buf;
}

LocalCluster::LocalCluster(const LocalClusterOptions& options) : server_(dist::Endpoint{"127.0.0.1", 0}) {
    if (options.worker_executable.empty()) throw ConfigError("no worker executable given");
    if (options.scenario_dir.empty()) throw ConfigError("spawned workers need a scenario directory");
    const auto endpoint = server_.endpoint().to_string();
    for (std::size_t i = 0; i < options.workers; ++i) {
        ids_.push_back("w" + std::to_string(i));
        workers_.push_back(ChildProcess::spawn(
            options.worker_executable,
            {"worker", "--broker", endpoint, "--task", options.task_id, "--data-dir", options.scenario_dir.string(),
             "--worker-id", ids_.back(), "--eval-delay-ms", text::format_double(options.eval_delay_ms)}));
    }
}

LocalCluster::~LocalCluster() {
    for (auto& w : workers_) w.signal(SIGTERM);
    for (auto& w : workers_) {
        if (w.pid() > 0) w.terminate(std::chrono::seconds(2));
    }
    server_.stop();
}

void LocalCluster::kill_worker(std::size_t i, int sig) { workers_.at(i).signal(sig); }

JobOutcome run_job(const ScenarioBundle& scenario, const JobSpec& spec) {
    if (spec.workers == 0) throw ConfigError("worker count must be at least 1");
    delay_of(spec.eval_delay_ms);
    validate_config(resolve_config(spec.ea, scenario.fleet()));

    if (spec.backend == BackendKind::serial) {
        if (spec.workers != 1) throw ConfigError("the serial backend runs exactly one worker");
        return run_serial(scenario, spec);
    }

    std::string task_id = spec.task_id.empty() ? make_task_id() : spec.task_id;
    if (spec.backend == BackendKind::in_process) return run_in_process(scenario, spec, task_id);

    if (spec.backend == BackendKind::spawn_local) {
        LocalCluster cluster(
            {spec.worker_executable, spec.scenario_dir, task_id, spec.workers, spec.eval_delay_ms});
        dist::TcpBrokerClient client(cluster.broker_endpoint());
        const dist::TaskDescriptor task{task_id, scenario.name(), spec.ea, spec.workers};
        return from_job(dist::coordinate(task, client, scenario, coordinate_options(spec, &cluster)), scenario,
                        spec);
    }

    if (!spec.broker) throw ConfigError("an external broker address is required");
    if (spec.task_id.empty()) throw ConfigError("an external broker needs an explicit task id shared with the workers");
    dist::TcpBrokerClient client(*spec.broker);
    const dist::TaskDescriptor task{task_id, scenario.name(), spec.ea, spec.workers};
    return from_job(dist::coordinate(task, client, scenario, coordinate_options(spec, nullptr)), scenario, spec);
}

std::vector<SweepRow> run_sweep(const ScenarioBundle& scenario, const SweepSpec& spec,
                                const std::function<void(std::size_t, std::size_t, const JobOutcome&)>& progress) {
    if (spec.job.backend == BackendKind::serial) throw ConfigError("a sweep needs a distributed backend");
    if (spec.repeats == 0) throw ConfigError("repeats must be at least 1");
    std::vector<std::size_t> counts = spec.worker_counts;
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
    if (counts.empty() || counts.front() != 1) throw ConfigError("the worker count list must include 1");

    std::vector<SweepRow> rows;
    for (const auto k : counts) {
        SweepRow row;
        row.workers = k;
        for (std::size_t r = 0; r < spec.repeats; ++r) {
            JobSpec job = spec.job;
            job.workers = k;
            job.out_dir.reset();
            if (job.backend != BackendKind::external) job.task_id.clear();
            const auto outcome = run_job(scenario, job);
            row.wall_times_s.push_back(outcome.wall_time_s);
            if (progress) progress(k, r, outcome);
        }
        double sum = 0.0;
        for (const double w : row.wall_times_s) sum += w;
        row.mean_wall_time_s = sum / static_cast<double>(row.wall_times_s.size());
        rows.push_back(std::move(row));
    }
    for (auto& row : rows) row.speedup = rows.front().mean_wall_time_s / row.mean_wall_time_s;
    return rows;
}

void write_speedup_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "k,mean_wall_time_s,speedup\n";
    for (const auto& r : rows) {
        out << r.workers << ',' << text::format_double(r.mean_wall_time_s) << ',' << text::format_double(r.speedup)
            << '\n';
    }
}

std::vector<std::size_t> speedup_regressions(std::span<const SweepRow> rows, double tolerance) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].speedup < rows[i - 1].speedup * (1.0 - tolerance)) out.push_back(i);
    }
    return out;
}

} // namespace derschedule
