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

#include "derschedule/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "derschedule/error.hpp"
#include "derschedule/text.hpp"

namespace derschedule {

namespace fs = std::filesystem;

ScenarioBundle::ScenarioBundle(std::string name, Fleet fleet, LoadProfile load, FitnessConfig fitness,
                               std::map<std::string, std::string> meta)
    : name_(std::move(name)), fleet_(std::move(fleet)), load_(std::move(load)), fitness_(fitness),
      meta_(std::move(meta)) {
    if (name_.empty()) throw ValidationError("scenario name must not be empty");
    validate_load(load_, fleet_.grid());
    validate_fitness_config(fitness_);
}

namespace {

// ---------------------------------------------------------------------------
// CSV reading

struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> cells;
    std::vector<std::size_t> columns; // 1-based
};

struct CsvTable {
    std::string file;
    std::vector<std::string> header;
    std::vector<CsvRow> rows;

    std::size_t column(std::string_view name) const {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ParseError(file, 1, 1, "missing column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - header.begin());
    }

    std::optional<std::size_t> find_column(std::string_view name) const {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    }

    [[noreturn]] void fail(const CsvRow& row, std::size_t col, const std::string& what) const {
        throw ParseError(file, row.line, col < row.columns.size() ? row.columns[col] : 1, what);
    }

    double number(const CsvRow& row, std::size_t col) const {
        auto v = text::parse_double(row.cells[col]);
        if (!v) fail(row, col, "non-numeric value '" + row.cells[col] + "' in column '" + header[col] + "'");
        return *v;
    }

    long long integer(const CsvRow& row, std::size_t col) const {
        auto v = text::parse_integer(row.cells[col]);
        if (!v) fail(row, col, "expected an integer in column '" + header[col] + "', got '" + row.cells[col] + "'");
        return *v;
    }
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CsvTable read_csv(const fs::path& path) {
    CsvTable table;
    table.file = path.filename().string();
    const std::string content = read_file(path);
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<std::size_t> offsets;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        auto cells = text::split(line, ',', &offsets);
        if (!have_header) {
            for (auto c : cells) table.header.emplace_back(text::trim(c));
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw ParseError(table.file, line_no, 1,
                             "expected " + std::to_string(table.header.size()) + " cells, found " +
                                 std::to_string(cells.size()));
        }
        CsvRow row;
        row.line = line_no;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            row.cells.emplace_back(text::trim(cells[i]));
            row.columns.push_back(offsets[i] + 1);
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw ParseError(table.file, 1, 1, "file is empty");
    return table;
}

/// Finds the first present column among `names`, returning its index and scale to the base unit.
std::pair<std::size_t, double> unit_column(const CsvTable& table, std::initializer_list<std::pair<const char*, double>> names) {
    for (const auto& [name, scale] : names) {
        if (auto c = table.find_column(name)) return {*c, scale};
    }
    throw ParseError(table.file, 1, 1, "missing column '" + std::string(names.begin()->first) + "'");
}

// ---------------------------------------------------------------------------
// Parsing the three data files

LoadProfile parse_load(const CsvTable& table, std::optional<std::size_t> expected) {
    const std::size_t t_col = table.column("t");
    const auto [d_col, scale] = unit_column(table, {{"demand_kwh", 1.0}, {"demand_wh", 1e-3}, {"demand_mwh", 1e3}});
    const std::size_t n = expected.value_or(table.rows.size());
    std::vector<std::optional<double>> values(n);
    for (const auto& row : table.rows) {
        const long long t = table.integer(row, t_col);
        if (t < 0 || static_cast<std::size_t>(t) >= n) {
            table.fail(row, t_col, "interval " + std::to_string(t) + " outside horizon of " + std::to_string(n));
        }
        if (values[t]) table.fail(row, t_col, "duplicate row for t=" + std::to_string(t));
        values[t] = table.number(row, d_col) * scale;
    }
    LoadProfile load;
    load.demand.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        if (!values[t]) throw ParseError(table.file, 1, 1, "missing demand for t=" + std::to_string(t));
        load.demand.push_back(*values[t]);
    }
    return load;
}

std::vector<DerSpec> parse_specs(const CsvTable& table, std::size_t horizon) {
    static constexpr std::array<std::string_view, 5> fixed{"unit_id", "alpha", "beta", "gamma", "avail_mask"};
    const std::size_t id_col = table.column("unit_id");
    const std::size_t a_col = table.column("alpha");
    const std::size_t b_col = table.column("beta");
    const std::size_t g_col = table.column("gamma");
    const std::size_t m_col = table.column("avail_mask");

    std::vector<DerSpec> specs;
    std::set<long long> seen;
    for (const auto& row : table.rows) {
        DerSpec s;
        const long long id = table.integer(row, id_col);
        if (id < INT32_MIN || id > INT32_MAX) table.fail(row, id_col, "unit id out of range");
        if (!seen.insert(id).second) table.fail(row, id_col, "duplicate unit_id " + std::to_string(id));
        s.unit_id = UnitId{static_cast<std::int32_t>(id)};
        s.cost_alpha = table.number(row, a_col);
        s.cost_beta = table.number(row, b_col);
        s.cost_gamma = table.number(row, g_col);
        const std::string& mask = row.cells[m_col];
        if (mask.size() != horizon) {
            table.fail(row, m_col, "availability mask has " + std::to_string(mask.size()) + " entries, expected " +
                                       std::to_string(horizon));
        }
        for (char c : mask) {
            if (c != '0' && c != '1') table.fail(row, m_col, "availability mask must contain only 0 and 1");
            s.availability.push_back(c == '1');
        }
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (std::find(fixed.begin(), fixed.end(), table.header[c]) != fixed.end()) continue;
            if (!row.cells[c].empty()) s.attributes.emplace(table.header[c], row.cells[c]);
        }
        specs.push_back(std::move(s));
    }
    return specs;
}

std::vector<ForecastSeries> parse_forecasts(const CsvTable& table, std::size_t horizon) {
    const std::size_t id_col = table.column("unit_id");
    const std::size_t t_col = table.column("t");
    const auto [p_col, scale] =
        unit_column(table, {{"max_power_kw", 1.0}, {"max_power_w", 1e-3}, {"max_power_mw", 1e3}});

    std::map<std::int32_t, std::vector<std::optional<double>>> by_unit;
    for (const auto& row : table.rows) {
        const long long id = table.integer(row, id_col);
        if (id < INT32_MIN || id > INT32_MAX) table.fail(row, id_col, "unit id out of range");
        const long long t = table.integer(row, t_col);
        if (t < 0 || static_cast<std::size_t>(t) >= horizon) {
            table.fail(row, t_col, "interval " + std::to_string(t) + " outside horizon of " + std::to_string(horizon));
        }
        auto& series = by_unit[static_cast<std::int32_t>(id)];
        series.resize(horizon);
        if (series[t]) {
            table.fail(row, t_col, "duplicate row for unit " + std::to_string(id) + ", t=" + std::to_string(t));
        }
        series[t] = table.number(row, p_col) * scale;
    }

    std::vector<ForecastSeries> out;
    for (auto& [id, series] : by_unit) {
        ForecastSeries f;
        f.unit_id = UnitId{id};
        for (std::size_t t = 0; t < horizon; ++t) {
            if (!series[t]) {
                throw ParseError(table.file, 1, 1,
                                 "missing forecast for unit " + std::to_string(id) + ", t=" + std::to_string(t));
            }
            f.max_power.push_back(*series[t]);
        }
        out.push_back(std::move(f));
    }
    return out;
}

void set_power_hints(std::vector<DerSpec>& specs, const std::vector<ForecastSeries>& forecasts) {
    std::map<std::int32_t, double> peak;
    for (const auto& f : forecasts) {
        double m = 0.0;
        for (double p : f.max_power) m = std::max(m, p);
        peak[f.unit_id.value] = m;
    }
    for (auto& s : specs) {
        if (auto it = peak.find(s.unit_id.value); it != peak.end()) s.max_power_hint = it->second;
    }
}

// ---------------------------------------------------------------------------
// scenario.meta

const std::set<std::string_view>& known_meta_keys() {
    static const std::set<std::string_view> keys{"name",       "T",         "interval_hours",    "weight_cost",
                                                 "weight_dtd", "cost_best", "cost_worst",        "dtd_best",
                                                 "dtd_worst",  "fitness_scale_max"};
    return keys;
}

std::map<std::string, std::string> parse_meta(const fs::path& path) {
    const std::string file = path.filename().string();
    std::istringstream in(read_file(path));
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string_view::npos) throw ParseError(file, line_no, 1, "expected key=value");
        const std::string key(text::trim(trimmed.substr(0, eq)));
        if (key.empty()) throw ParseError(file, line_no, 1, "empty key");
        if (!kv.emplace(key, std::string(text::trim(trimmed.substr(eq + 1)))).second) {
            throw ParseError(file, line_no, 1, "duplicate key '" + key + "'");
        }
    }
    return kv;
}

double meta_number(const std::map<std::string, std::string>& kv, const std::string& key, const std::string& file) {
    auto v = text::parse_double(kv.at(key));
    if (!v) throw ParseError(file, 1, 1, "meta key '" + key + "' is not a number");
    return *v;
}

// ---------------------------------------------------------------------------
// Canonical serialization

struct Serialized {
    std::string specs;
    std::string forecast;
    std::string load;
    std::string meta;
};

Serialized serialize(const ScenarioBundle& b) {
    using text::format_double;
    Serialized out;
    const std::size_t n = b.grid().intervals();

    std::set<std::string> attribute_keys;
    for (const auto& s : b.fleet().specs()) {
        for (const auto& [k, v] : s.attributes) attribute_keys.insert(k);
    }
    std::ostringstream specs;
    specs << "unit_id,alpha,beta,gamma,avail_mask";
    for (const auto& k : attribute_keys) specs << ',' << k;
    specs << '\n';
    for (const auto& s : b.fleet().specs()) {
        specs << s.unit_id.value << ',' << format_double(s.cost_alpha) << ',' << format_double(s.cost_beta) << ','
              << format_double(s.cost_gamma) << ',';
        for (bool a : s.availability) specs << (a ? '1' : '0');
        for (const auto& k : attribute_keys) {
            auto it = s.attributes.find(k);
            specs << ',' << (it == s.attributes.end() ? "" : it->second);
        }
        specs << '\n';
    }
    out.specs = specs.str();

    std::ostringstream forecast;
    forecast << "unit_id,t,max_power_kw\n";
    for (const auto& f : b.fleet().forecasts()) {
        for (std::size_t t = 0; t < n; ++t) {
            forecast << f.unit_id.value << ',' << t << ',' << format_double(f.max_power[t]) << '\n';
        }
    }
    out.forecast = forecast.str();

    std::ostringstream load;
    load << "t,demand_kwh\n";
    for (std::size_t t = 0; t < n; ++t) load << t << ',' << format_double(b.load().demand[t]) << '\n';
    out.load = load.str();

    const auto& fc = b.fitness();
    std::ostringstream meta;
    meta << "name=" << b.name() << '\n'
         << "T=" << n << '\n'
         << "interval_hours=" << format_double(b.grid().interval_hours()) << '\n'
         << "weight_cost=" << format_double(fc.weight_cost) << '\n'
         << "weight_dtd=" << format_double(fc.weight_dtd) << '\n'
         << "fitness_scale_max=" << format_double(fc.fitness_scale_max) << '\n'
         << "cost_best=" << format_double(fc.cost_bounds.best) << '\n'
         << "cost_worst=" << format_double(fc.cost_bounds.worst) << '\n'
         << "dtd_best=" << format_double(fc.dtd_bounds.best) << '\n'
         << "dtd_worst=" << format_double(fc.dtd_bounds.worst) << '\n';
    for (const auto& [k, v] : b.meta()) meta << k << '=' << v << '\n';
    out.meta = meta.str();
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("failed writing " + path.string());
}

// ---------------------------------------------------------------------------
// Synthetic data

using GenRng = std::mt19937_64;

/// Rounds to `digits` decimals so the canonical text form stays short.
double rounded(double v, int digits) {
    const double scale = std::pow(10.0, digits);
    return std::round(v * scale) / scale;
}

double uniform(GenRng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double interval_start_hour(std::size_t t, const TimeGrid& grid) {
    return static_cast<double>(t) * 24.0 / static_cast<double>(grid.intervals());
}

double interval_mid_hour(std::size_t t, const TimeGrid& grid) {
    return (static_cast<double>(t) + 0.5) * 24.0 / static_cast<double>(grid.intervals());
}

bool in_pv_window(std::size_t t, const TimeGrid& grid) {
    const double h = interval_start_hour(t, grid);
    return h >= 7.0 && h < 17.0;
}

double load_shape(LoadShape shape, double hour) {
    auto bump = [hour](double centre, double width) {
        const double z = (hour - centre) / width;
        return std::exp(-0.5 * z * z);
    };
    switch (shape) {
    case LoadShape::single_peak:
        return 0.55 + 0.45 * bump(13.0, 4.0);
    case LoadShape::double_peak:
        return 0.30 + 0.45 * bump(8.0, 2.0) + 0.65 * bump(19.0, 2.5);
    }
    return 1.0;
}

/// Scales `shape` so the total equals 8% of total supply, with each interval
/// capped at 16% of its supply. Bisection on the common scale factor.
constexpr double demand_share = 0.08;
constexpr double interval_cap = 0.16;

LoadProfile calibrate_load(const std::vector<double>& supply, LoadShape shape, const TimeGrid& grid) {
    const std::size_t n = supply.size();
    std::vector<double> profile(n);
    for (std::size_t t = 0; t < n; ++t) profile[t] = load_shape(shape, interval_mid_hour(t, grid));

    double supply_total = 0.0;
    for (double s : supply) supply_total += s;
    const double target = demand_share * supply_total;

    auto demand_at = [&](double scale, std::size_t t) { return std::min(scale * profile[t], interval_cap * supply[t]); };
    auto total_at = [&](double scale) {
        double sum = 0.0;
        for (std::size_t t = 0; t < n; ++t) sum += demand_at(scale, t);
        return sum;
    };

    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t t = 0; t < n; ++t) hi = std::max(hi, interval_cap * supply[t] / profile[t]);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (total_at(mid) < target ? lo : hi) = mid;
    }

    LoadProfile load;
    for (std::size_t t = 0; t < n; ++t) {
        // Floor to whole Wh so rounding never pushes demand above the cap.
        load.demand.push_back(std::floor(demand_at(hi, t) * 1000.0) / 1000.0);
    }
    return load;
}

} // namespace

ScenarioBundle load_scenario(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("scenario directory " + dir.string() + " does not exist");
    auto kv = parse_meta(dir / "scenario.meta");
    const std::string meta_file = "scenario.meta";

    std::optional<std::size_t> horizon;
    if (kv.contains("T")) {
        auto t = text::parse_integer(kv.at("T"));
        if (!t || *t < 1) throw ParseError(meta_file, 1, 1, "T must be a positive integer");
        horizon = static_cast<std::size_t>(*t);
    }
    const double hours = kv.contains("interval_hours") ? meta_number(kv, "interval_hours", meta_file) : 1.0;
    const std::string name = kv.contains("name") ? kv.at("name") : dir.filename().string();

    IngestOptions opts;
    opts.name = name;
    opts.interval_hours = hours;
    opts.intervals = horizon;
    const ScenarioBundle base = ingest_csv(dir / "forecast.csv", dir / "specs.csv", dir / "load.csv", opts);

    FitnessConfig fc = base.fitness();
    auto override_with = [&](const char* key, double& field) {
        if (kv.contains(key)) field = meta_number(kv, key, meta_file);
    };
    override_with("weight_cost", fc.weight_cost);
    override_with("weight_dtd", fc.weight_dtd);
    override_with("fitness_scale_max", fc.fitness_scale_max);
    override_with("cost_best", fc.cost_bounds.best);
    override_with("cost_worst", fc.cost_bounds.worst);
    override_with("dtd_best", fc.dtd_bounds.best);
    override_with("dtd_worst", fc.dtd_bounds.worst);

    std::map<std::string, std::string> extra;
    for (const auto& [k, v] : kv) {
        if (!known_meta_keys().contains(k)) extra.emplace(k, v);
    }
    return ScenarioBundle(name, base.fleet(), base.load(), fc, std::move(extra));
}

void save_scenario(const ScenarioBundle& bundle, const fs::path& dir) {
    fs::create_directories(dir);
    const Serialized s = serialize(bundle);
    write_file(dir / "specs.csv", s.specs);
    write_file(dir / "forecast.csv", s.forecast);
    write_file(dir / "load.csv", s.load);
    write_file(dir / "scenario.meta", s.meta);
}

std::uint64_t fingerprint(const ScenarioBundle& bundle) {
    const Serialized s = serialize(bundle);
    std::uint64_t h = 1469598103934665603ULL;
    for (const std::string* part : {&s.specs, &s.forecast, &s.load, &s.meta}) {
        for (unsigned char c : *part) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= 0xff;
        h *= 1099511628211ULL;
    }
    return h;
}

ScenarioBundle ingest_csv(const fs::path& forecast_csv, const fs::path& specs_csv, const fs::path& load_csv,
                          const IngestOptions& options) {
    const CsvTable load_table = read_csv(load_csv);
    LoadProfile load = parse_load(load_table, options.intervals);
    if (load.demand.empty()) throw ParseError(load_table.file, 1, 1, "load profile has no intervals");
    const TimeGrid grid(load.demand.size(), options.interval_hours);

    auto specs = parse_specs(read_csv(specs_csv), grid.intervals());
    auto forecasts = parse_forecasts(read_csv(forecast_csv), grid.intervals());
    set_power_hints(specs, forecasts);

    Fleet fleet = validate_fleet(std::move(specs), std::move(forecasts), grid);
    FitnessConfig fc = default_fitness_config(fleet, load);
    return ScenarioBundle(options.name, std::move(fleet), std::move(load), fc);
}

ScenarioBundle generate_mixed(std::size_t flex_count, std::size_t pv_only_count, std::uint64_t seed,
                              const TimeGrid& grid, LoadShape shape, std::string name) {
    GenRng rng(seed);
    const std::size_t n = grid.intervals();
    std::vector<DerSpec> specs;
    std::vector<ForecastSeries> forecasts;
    std::vector<double> supply(n, 0.0);

    const std::size_t total = flex_count + pv_only_count;
    for (std::size_t k = 0; k < total; ++k) {
        const bool pv_only = k >= flex_count;
        DerSpec s;
        s.unit_id = UnitId{static_cast<std::int32_t>(k + 1)};
        if (pv_only) {
            s.cost_alpha = rounded(uniform(rng, 0.001, 0.003), 5);
            s.cost_beta = rounded(uniform(rng, 0.03, 0.08), 4);
            s.cost_gamma = rounded(uniform(rng, 0.01, 0.05), 3);
        } else {
            s.cost_alpha = rounded(uniform(rng, 0.002, 0.006), 5);
            s.cost_beta = rounded(uniform(rng, 0.08, 0.18), 4);
            s.cost_gamma = rounded(uniform(rng, 0.05, 0.15), 3);
        }
        const double peak = uniform(rng, 4.0, 10.0);
        const double centre = 13.0 + uniform(rng, -0.5, 0.5);
        const double flat = pv_only ? 0.0 : uniform(rng, 2.0, 6.0);

        ForecastSeries f;
        f.unit_id = s.unit_id;
        for (std::size_t t = 0; t < n; ++t) {
            const bool window = in_pv_window(t, grid);
            double pv = 0.0;
            if (window) {
                const double z = (interval_mid_hour(t, grid) - centre) / 2.5;
                pv = peak * std::exp(-0.5 * z * z);
            }
            const double p = rounded(flat + pv, 3);
            s.availability.push_back(pv_only ? window : true);
            f.max_power.push_back(pv_only && !window ? 0.0 : p);
            supply[t] += f.max_power.back() * grid.interval_hours();
        }
        s.max_power_hint = *std::max_element(f.max_power.begin(), f.max_power.end());
        specs.push_back(std::move(s));
        forecasts.push_back(std::move(f));
    }

    LoadProfile load = calibrate_load(supply, shape, grid);
    Fleet fleet = validate_fleet(std::move(specs), std::move(forecasts), grid);
    FitnessConfig fc = default_fitness_config(fleet, load);
    std::map<std::string, std::string> meta{
        {"calibration", "synthetic"},
        {"generator_seed", std::to_string(seed)},
        {"load_shape", shape == LoadShape::single_peak ? "A" : "B"},
        {"pv_only_units", std::to_string(pv_only_count)},
        {"flex_units", std::to_string(flex_count)},
    };
    return ScenarioBundle(std::move(name), std::move(fleet), std::move(load), fc, std::move(meta));
}

ScenarioBundle generate_synthetic(std::size_t fleet_size, FleetProfile profile, std::uint64_t seed,
                                  const TimeGrid& grid, LoadShape shape) {
    if (fleet_size < 1) throw ConfigError("fleet size must be >= 1");
    return profile == FleetProfile::pv_only ? generate_mixed(0, fleet_size, seed, grid, shape, "synthetic")
                                            : generate_mixed(fleet_size, 0, seed, grid, shape, "synthetic");
}

std::span<const std::string_view> bundled_scenario_names() {
    static constexpr std::array<std::string_view, 4> names{"uc1", "uc2", "uc3", "mini5"};
    return names;
}

ScenarioBundle bundled_scenario(std::string_view name) {
    const TimeGrid day(24, 1.0);
    if (name == "uc1") return generate_mixed(50, 0, 101, day, LoadShape::single_peak, "uc1");
    if (name == "uc2") return generate_mixed(25, 25, 102, day, LoadShape::single_peak, "uc2");
    if (name == "uc3") return generate_mixed(100, 0, 103, day, LoadShape::double_peak, "uc3");
    if (name == "mini5") return generate_mixed(5, 0, 105, day, LoadShape::single_peak, "mini5");
    throw ConfigError("unknown bundled scenario '" + std::string(name) + "'");
}

fs::path resolve_scenario_dir(const std::string& name_or_path, const fs::path& default_root) {
    if (name_or_path.empty()) throw ConfigError("no scenario given");
    if (fs::is_directory(name_or_path)) return name_or_path;
    if (const char* env = std::getenv("DERSCHEDULE_DATA_DIR"); env && *env) {
        if (fs::is_directory(fs::path(env) / name_or_path)) return fs::path(env) / name_or_path;
    }
    if (!default_root.empty() && fs::is_directory(default_root / name_or_path)) return default_root / name_or_path;
    throw ConfigError("scenario '" + name_or_path + "' not found");
}

} // namespace derschedule
