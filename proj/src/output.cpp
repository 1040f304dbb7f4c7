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

#include "derschedule/output.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "derschedule/error.hpp"
#include "derschedule/text.hpp"

namespace derschedule {

namespace {

using text::format_double;

template <class Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    fn(out);
    out.flush();
    if (!out) throw Error("write failed: " + path.string());
}

} // namespace

void write_schedule_csv(std::ostream& out, const AbsoluteSchedule& schedule, const Fleet& fleet) {
    out << "unit_id,t,power_kwh\n";
    for (std::size_t r = 0; r < schedule.rows(); ++r) {
        const auto id = fleet.unit_ids()[r].value;
        for (std::size_t t = 0; t < schedule.cols(); ++t) {
            out << id << ',' << t << ',' << format_double(schedule(r, t)) << '\n';
        }
    }
}

void write_history_csv(std::ostream& out, std::span<const GenerationStats> history) {
    out << "generation,best_fitness,mean_fitness,best_cost,best_dtd,best_hu,evaluations\n";
    for (const auto& h : history) {
        out << h.generation << ',' << format_double(h.best_fitness) << ',' << format_double(h.mean_fitness) << ','
            << format_double(h.best_cost) << ',' << format_double(h.best_dtd) << ',' << h.best_hu << ','
            << h.evaluations << '\n';
    }
}

void write_result_meta(std::ostream& out, const RunResult& result, const EaConfig& config,
                       const RunSummary& summary) {
    const auto& r = result.best_result;
    out << "scenario=" << summary.scenario << '\n'
        << "backend=" << summary.backend << '\n'
        << "workers=" << summary.workers << '\n'
        << "seed=" << config.rng_seed << '\n'
        << "population_size=" << config.population_size << '\n'
        << "generations=" << config.max_generations << '\n'
        << "fitness=" << format_double(r.fitness) << '\n'
        << "cost=" << format_double(r.cost) << '\n'
        << "dtd=" << format_double(r.dtd) << '\n'
        << "hu=" << r.hu << '\n'
        << "penalty=" << format_double(r.penalty) << '\n'
        << "evaluations=" << result.evaluations << '\n'
        << "genes=" << result.best.genes.size() << '\n'
        << "wall_time_s=" << format_double(summary.wall_time_s) << '\n';
}

void write_gnuplot_script(std::ostream& out) {
    out << "set datafile separator ','\n"
           "set key autotitle columnhead\n"
           "set xlabel 'generation'\n"
           "set ylabel 'fitness'\n"
           "set terminal pngcairo size 900,600\n"
           "set output 'history.png'\n"
           "plot 'history.csv' using 1:2 with lines, '' using 1:3 with lines\n";
}

void write_run_outputs(const std::filesystem::path& dir, const ScenarioBundle& scenario, const RunResult& result,
                       const EaConfig& config, const RunSummary& summary, bool gnuplot) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
    const auto schedule = interpret(result.best, scenario.fleet());
    write_file(dir / "schedule.csv", [&](std::ostream& o) { write_schedule_csv(o, schedule, scenario.fleet()); });
    write_file(dir / "history.csv", [&](std::ostream& o) { write_history_csv(o, result.history); });
    write_file(dir / "result.meta", [&](std::ostream& o) { write_result_meta(o, result, config, summary); });
    if (gnuplot) write_file(dir / "history.gp", [](std::ostream& o) { write_gnuplot_script(o); });
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot read " + file.string());
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string_view::npos) continue;
        out[std::string(text::trim(trimmed.substr(0, eq)))] = std::string(text::trim(trimmed.substr(eq + 1)));
    }
    return out;
}

} // namespace derschedule
