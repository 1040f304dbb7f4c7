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

// Command-line front end: run, sweep, worker, broker, generate, ingest.
//
// Exit codes: 0 success (for `run`: the best schedule has no undersupplied
// interval), 1 configuration error, 2 runtime or distribution failure,
// 3 run completed but the best schedule still undersupplies some interval.

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "derschedule/data.hpp"
#include "derschedule/distribution/tcp_broker.hpp"
#include "derschedule/distribution/worker.hpp"
#include "derschedule/error.hpp"
#include "derschedule/harness.hpp"
#include "derschedule/process.hpp"
#include "derschedule/text.hpp"

#ifndef DERSCHEDULE_DEFAULT_DATA_DIR
#define DERSCHEDULE_DEFAULT_DATA_DIR ""
#endif

namespace fs = std::filesystem;
using namespace derschedule;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_runtime = 2;
constexpr int exit_undersupply = 3;

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

void install_stop_handlers() {
    struct sigaction sa{};
    sa.sa_handler = on_signal;
    sigemptyset(&sa.sa_mask);
    ::sigaction(SIGTERM, &sa, nullptr);
    ::sigaction(SIGINT, &sa, nullptr);
}

fs::path default_data_root() { return DERSCHEDULE_DEFAULT_DATA_DIR; }

struct EaFlags {
    std::size_t population = EaConfig{}.population_size;
    std::size_t generations = EaConfig{}.max_generations;
    std::size_t offspring = EaConfig{}.offspring_per_pairing;
    std::uint64_t seed = EaConfig{}.rng_seed;
    double pressure = EaConfig{}.selection_pressure;
    double crossover = EaConfig{}.crossover_rate;
    std::size_t length_cap = 0;
    std::size_t initial_length = 0;
    bool no_elitism = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--population", population, "Population size")->capture_default_str();
        cmd->add_option("--generations", generations, "Number of generations")->capture_default_str();
        cmd->add_option("--offspring", offspring, "Offspring per pairing")->capture_default_str();
        cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
        cmd->add_option("--pressure", pressure, "Linear ranking selection pressure")->capture_default_str();
        cmd->add_option("--crossover-rate", crossover, "Crossover probability")->capture_default_str();
        cmd->add_option("--length-cap", length_cap, "Longest chromosome (0: four genes per unit)")
            ->capture_default_str();
        cmd->add_option("--initial-length", initial_length, "Longest initial chromosome (0: default)")
            ->capture_default_str();
        cmd->add_flag("--no-elitism", no_elitism, "Always let the best child replace the worse parent");
    }

    EaConfig config() const {
        EaConfig c;
        c.population_size = population;
        c.max_generations = generations;
        c.offspring_per_pairing = offspring;
        c.rng_seed = seed;
        c.selection_pressure = pressure;
        c.crossover_rate = crossover;
        c.chromosome_length_cap = length_cap;
        c.initial_length_cap = initial_length;
        c.elitism = !no_elitism;
        return c;
    }
};

struct DistFlags {
    std::string backend = "auto";
    bool spawn_local = false;
    std::string broker;
    std::string task;
    double eval_delay_ms = 0.0;
    double startup_timeout_s = 30.0;
    double chunk_timeout_s = 30.0;
    std::size_t max_retries = 2;

    void attach(CLI::App* cmd) {
        cmd->add_option("--backend", backend, "auto, serial, in-process, spawn-local or external")
            ->check(CLI::IsMember({"auto", "serial", "in-process", "spawn-local", "external"}))
            ->capture_default_str();
        cmd->add_flag("--spawn-local", spawn_local, "Start an embedded broker and local worker processes");
        cmd->add_option("--broker", broker, "Address of a running broker (host:port)");
        cmd->add_option("--task", task, "Task id shared with externally started workers");
        cmd->add_option("--eval-delay-ms", eval_delay_ms, "Artificial delay per evaluation")->capture_default_str();
        cmd->add_option("--startup-timeout", startup_timeout_s, "Seconds to wait for workers")->capture_default_str();
        cmd->add_option("--chunk-timeout", chunk_timeout_s, "Seconds before a chunk is re-sent")
            ->capture_default_str();
        cmd->add_option("--max-retries", max_retries, "Re-sends per chunk before the job fails")
            ->capture_default_str();
    }

    BackendKind kind(std::size_t workers, bool sweep) const {
        if (backend == "serial") return BackendKind::serial;
        if (backend == "in-process") return BackendKind::in_process;
        if (backend == "spawn-local") return BackendKind::spawn_local;
        if (backend == "external") return BackendKind::external;
        if (!broker.empty()) return BackendKind::external;
        if (spawn_local || sweep) return BackendKind::spawn_local;
        return workers == 1 ? BackendKind::serial : BackendKind::in_process;
    }

    void apply(JobSpec& spec, std::size_t workers, bool sweep) const {
        if (startup_timeout_s <= 0 || chunk_timeout_s <= 0) throw ConfigError("timeouts must be positive");
        spec.backend = kind(workers, sweep);
        spec.workers = workers;
        spec.eval_delay_ms = eval_delay_ms;
        spec.startup_timeout = std::chrono::milliseconds(static_cast<long long>(startup_timeout_s * 1000));
        spec.chunk_timeout = std::chrono::milliseconds(static_cast<long long>(chunk_timeout_s * 1000));
        spec.max_retries = max_retries;
        spec.task_id = task;
        if (!broker.empty()) spec.broker = dist::parse_endpoint(broker);
        spec.worker_executable = current_executable();
    }
};

void print_outcome(const ScenarioBundle& scenario, const JobOutcome& o) {
    const auto& r = o.run.best_result;
    std::cout << "scenario=" << scenario.name() << " backend=" << to_string(o.backend) << " workers=" << o.workers
              << " seed=" << o.config.rng_seed << '\n'
              << "fitness=" << text::format_double(r.fitness) << " cost=" << text::format_double(r.cost)
              << " dtd=" << text::format_double(r.dtd) << " hu=" << r.hu << '\n'
              << "evaluations=" << o.run.evaluations << " wall_time_s=" << text::format_double(o.wall_time_s)
              << '\n';
    if (o.stats.retries > 0 || o.stats.workers_lost > 0) {
        std::cout << "retries=" << o.stats.retries << " workers_lost=" << o.stats.workers_lost << '\n';
    }
}

int cmd_run(const std::string& scenario_arg, const EaFlags& ea, const DistFlags& dflags, std::size_t workers,
            const fs::path& out, bool gnuplot, bool verbose) {
    const auto dir = resolve_scenario_dir(scenario_arg, default_data_root());
    const auto scenario = load_scenario(dir);
    JobSpec spec;
    spec.ea = ea.config();
    spec.scenario_dir = dir;
    dflags.apply(spec, workers, false);
    spec.out_dir = out;
    spec.gnuplot = gnuplot;
    if (verbose) {
        spec.on_generation = [](const GenerationStats& s, LocalCluster*) {
            std::cerr << "gen " << s.generation << " best=" << text::format_double(s.best_fitness)
                      << " mean=" << text::format_double(s.mean_fitness) << " hu=" << s.best_hu << '\n';
        };
    }
    const auto outcome = run_job(scenario, spec);
    print_outcome(scenario, outcome);
    std::cout << "wrote " << out.string() << '\n';
    return outcome.run.best_result.hu == 0 ? exit_ok : exit_undersupply;
}

int cmd_sweep(const std::string& scenario_arg, const EaFlags& ea, const DistFlags& dflags,
              const std::vector<std::size_t>& counts, std::size_t repeats, const fs::path& out) {
    const auto dir = resolve_scenario_dir(scenario_arg, default_data_root());
    const auto scenario = load_scenario(dir);
    SweepSpec spec;
    spec.job.ea = ea.config();
    spec.job.scenario_dir = dir;
    dflags.apply(spec.job, 1, true);
    spec.worker_counts = counts;
    spec.repeats = repeats;
    const auto rows = run_sweep(scenario, spec, [](std::size_t k, std::size_t r, const JobOutcome& o) {
        std::cerr << "k=" << k << " repeat=" << r << " wall_time_s=" << text::format_double(o.wall_time_s)
                  << " fitness=" << text::format_double(o.run.best_result.fitness) << '\n';
    });

    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error("cannot create " + out.string() + ": " + ec.message());
    std::ofstream csv(out / "speedup.csv", std::ios::binary);
    if (!csv) throw Error("cannot write " + (out / "speedup.csv").string());
    write_speedup_csv(csv, rows);
    write_speedup_csv(std::cout, rows);
    for (const auto i : speedup_regressions(rows, 0.10)) {
        std::cout << "note: speedup drops from k=" << rows[i - 1].workers << " to k=" << rows[i].workers << '\n';
    }
    std::cout << "wrote " << (out / "speedup.csv").string() << '\n';
    return exit_ok;
}

int cmd_worker(const std::string& broker, const std::string& task, const std::string& data_dir,
               std::string worker_id, double eval_delay_ms) {
    install_stop_handlers();
    std::optional<ScenarioBundle> scenario;
    try {
        scenario.emplace(load_scenario(resolve_scenario_dir(data_dir)));
    } catch (const Error& e) {
        std::cerr << "worker startup failed: " << e.what() << '\n';
        return exit_config;
    }
    if (worker_id.empty()) worker_id = "w-" + std::to_string(::getpid());
    if (!(eval_delay_ms >= 0.0)) throw ConfigError("evaluation delay must be non-negative");

    dist::TcpBrokerClient client(dist::parse_endpoint(broker));
    dist::WorkerOptions options;
    options.task_id = task;
    options.worker_id = worker_id;
    options.eval_delay = std::chrono::microseconds(std::llround(eval_delay_ms * 1000.0));
    const auto exit = dist::run_worker(client, *scenario, options, g_stop);
    if (exit == dist::WorkerExit::broker_lost) {
        std::cerr << "worker " << worker_id << ": broker connection lost\n";
        return exit_runtime;
    }
    return exit_ok;
}

int cmd_broker(const std::string& bind, std::size_t frame_cap) {
    install_stop_handlers();
    dist::TcpBrokerServer server(dist::parse_endpoint(bind), frame_cap);
    std::cout << "listening on " << server.endpoint().to_string() << std::endl;
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    return exit_ok;
}

LoadShape parse_shape(const std::string& s) {
    if (s == "A" || s == "a" || s == "single") return LoadShape::single_peak;
    if (s == "B" || s == "b" || s == "double") return LoadShape::double_peak;
    throw ConfigError("unknown load shape '" + s + "' (expected A or B)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Day-ahead DER scheduling with a master-slave evolutionary algorithm"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "derschedule 0.1.0");

    // run
    auto* run_cmd = app.add_subcommand("run", "Optimize one scenario");
    std::string scenario;
    EaFlags run_ea;
    DistFlags run_dist;
    std::size_t workers = 1;
    std::string out = "out";
    bool gnuplot = false;
    bool verbose = false;
    run_cmd->add_option("--scenario,-s", scenario, "Scenario name or directory")->required();
    run_ea.attach(run_cmd);
    run_dist.attach(run_cmd);
    run_cmd->add_option("--workers,-k", workers, "Number of evaluation workers")->capture_default_str();
    run_cmd->add_option("--out,-o", out, "Output directory")->capture_default_str();
    run_cmd->add_flag("--gnuplot", gnuplot, "Also write a gnuplot script for history.csv");
    run_cmd->add_flag("--verbose,-v", verbose, "Print per-generation statistics to stderr");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Measure wall time over worker counts");
    std::string sweep_scenario;
    EaFlags sweep_ea;
    DistFlags sweep_dist;
    std::vector<std::size_t> counts{1, 2, 4, 8};
    std::size_t repeats = 1;
    std::string sweep_out = "sweep";
    sweep_cmd->add_option("--scenario,-s", sweep_scenario, "Scenario name or directory")->required();
    sweep_ea.attach(sweep_cmd);
    sweep_dist.attach(sweep_cmd);
    sweep_cmd->add_option("--workers-list", counts, "Comma-separated worker counts (must include 1)")
        ->delimiter(',')
        ->capture_default_str();
    sweep_cmd->add_option("--repeats", repeats, "Runs per worker count")->capture_default_str();
    sweep_cmd->add_option("--out,-o", sweep_out, "Output directory for speedup.csv")->capture_default_str();

    // worker
    auto* worker_cmd = app.add_subcommand("worker", "Serve evaluation chunks for one task");
    std::string w_broker, w_task, w_data, w_id;
    double w_delay = 0.0;
    worker_cmd->add_option("--broker", w_broker, "Broker address host:port")->required();
    worker_cmd->add_option("--task", w_task, "Task id")->required();
    worker_cmd->add_option("--data-dir", w_data, "Scenario directory")->required();
    worker_cmd->add_option("--worker-id", w_id, "Worker id (default w-<pid>)");
    worker_cmd->add_option("--eval-delay-ms", w_delay, "Artificial delay per evaluation")->capture_default_str();

    // broker
    auto* broker_cmd = app.add_subcommand("broker", "Run a standalone TCP broker");
    std::string bind = "127.0.0.1:7878";
    std::size_t frame_cap = dist::default_frame_cap;
    broker_cmd->add_option("--bind", bind, "Listen address host:port (port 0 picks one)")->capture_default_str();
    broker_cmd->add_option("--frame-cap", frame_cap, "Largest accepted frame in bytes")->capture_default_str();

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "Write synthetic scenarios");
    std::vector<std::string> gen_names;
    std::string gen_root = default_data_root().string();
    std::size_t gen_flex = 0, gen_pv = 0, gen_t = 24;
    std::uint64_t gen_seed = 1;
    double gen_hours = 1.0;
    std::string gen_shape = "A";
    std::string gen_custom;
    gen_cmd->add_option("--bundled", gen_names, "Bundled scenario names (default: all)")->delimiter(',');
    gen_cmd->add_option("--root", gen_root, "Directory receiving one folder per scenario")->capture_default_str();
    gen_cmd->add_option("--custom", gen_custom, "Name of a custom scenario built from the flags below");
    gen_cmd->add_option("--flex", gen_flex, "Units with a flexible share");
    gen_cmd->add_option("--pv-only", gen_pv, "Photovoltaic-only units");
    gen_cmd->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
    gen_cmd->add_option("--intervals", gen_t, "Intervals per day")->capture_default_str();
    gen_cmd->add_option("--interval-hours", gen_hours, "Interval length in hours")->capture_default_str();
    gen_cmd->add_option("--shape", gen_shape, "Load shape A (single peak) or B (double peak)")->capture_default_str();

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "Build a scenario from forecast, specs and load CSV files");
    std::string in_forecast, in_specs, in_load, in_out, in_name = "ingested";
    double in_hours = 1.0;
    ingest_cmd->add_option("--forecast", in_forecast)->required();
    ingest_cmd->add_option("--specs", in_specs)->required();
    ingest_cmd->add_option("--load", in_load)->required();
    ingest_cmd->add_option("--out", in_out, "Scenario directory to write")->required();
    ingest_cmd->add_option("--name", in_name)->capture_default_str();
    ingest_cmd->add_option("--interval-hours", in_hours)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*run_cmd) return cmd_run(scenario, run_ea, run_dist, workers, out, gnuplot, verbose);
        if (*sweep_cmd) return cmd_sweep(sweep_scenario, sweep_ea, sweep_dist, counts, repeats, sweep_out);
        if (*worker_cmd) return cmd_worker(w_broker, w_task, w_data, w_id, w_delay);
        if (*broker_cmd) return cmd_broker(bind, frame_cap);
        if (*gen_cmd) {
            if (!gen_custom.empty()) {
                const auto b = generate_mixed(gen_flex, gen_pv, gen_seed, TimeGrid(gen_t, gen_hours),
                                              parse_shape(gen_shape), gen_custom);
                save_scenario(b, fs::path(gen_root) / gen_custom);
                std::cout << "wrote " << (fs::path(gen_root) / gen_custom).string() << '\n';
                return exit_ok;
            }
            if (gen_names.empty()) {
                for (const auto n : bundled_scenario_names()) gen_names.emplace_back(n);
            }
            for (const auto& n : gen_names) {
                save_scenario(bundled_scenario(n), fs::path(gen_root) / n);
                std::cout << "wrote " << (fs::path(gen_root) / n).string() << '\n';
            }
            return exit_ok;
        }
        if (*ingest_cmd) {
            IngestOptions opts;
            opts.name = in_name;
            opts.interval_hours = in_hours;
            save_scenario(ingest_csv(in_forecast, in_specs, in_load, opts), in_out);
            std::cout << "wrote " << in_out << '\n';
            return exit_ok;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_config;
}
