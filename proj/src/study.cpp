#include "feedsim/study.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace feedsim {

std::vector<MotorSpec> default_catalog() {
    return {
        {"ISMH3-44C15CD", 71.1, 88.9 * kKgCm2},  {"ISMH3-29C15CD", 37.2, 55.0 * kKgCm2},
        {"ISMH3-18C15CD", 28.75, 25.5 * kKgCm2}, {"ISMH3-13C15CD", 20.85, 19.3 * kKgCm2},
        {"ISMH3-85B15CD", 13.5, 13.0 * kKgCm2},  {"1MH3-50B15CB", 9.6, 11.01 * kKgCm2},
    };
}

std::vector<Gains> fixed_gain_sets() {
    return {{10.0, 20.0, 50.0, 1.0}, {50.0, 20.0, 5.0, 0.5}, {200.0, 20.0, 5.0, 1.0}};
}

void validate(const StudyConfig& cfg) {
    const MotorSpec probe{"probe", 1.0, 1.0};
    (void)cfg.mechanics.with(probe);
    if (cfg.motors.empty()) throw std::invalid_argument("motor catalog is empty");
    for (const auto& m : cfg.motors) validate(m);
    for (const auto& g : cfg.gain_sets) validate(g);
    validate(cfg.bounds);
    validate(cfg.fwa);
    validate(cfg.ga);
    validate(cfg.sim);
    (void)reciprocate(plan(cfg.motion), cfg.sim.ts);
    if (cfg.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
}

bool SweepResult::any_diverged() const {
    return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.index.diverged; });
}

PerformanceIndex evaluate_gains(const PlantParams& plant, const Gains& gains,
                                const ProfileSpec& motion, const SimConfig& sim, StdKind kind) {
    const auto cmds = reciprocate(plan(motion), sim.ts);
    return evaluate(run(plant, gains, cmds, sim), kind);
}

Objective make_objective(const PlantParams& plant, const CommandStream& cmds, const SimConfig& sim,
                         StdKind kind) {
    return [plant, cmds, sim, kind](const Eigen::VectorXd& x) {
        return evaluate(run(plant, Gains::from_vector(x), cmds, sim), kind).W;
    };
}

namespace {

SweepRow make_row(const std::string& scenario, const MotorSpec& motor, const PlantParams& plant,
                  std::string source, const Gains& g, const PerformanceIndex& idx,
                  std::uint64_t seed) {
    return SweepRow{scenario, motor.label, plant.inertia_ratio(), std::move(source), g, idx, seed};
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

// Best W per motor in catalog order.
std::vector<std::pair<const SweepRow*, std::size_t>> best_per_motor(const SweepResult& r) {
    std::vector<std::pair<const SweepRow*, std::size_t>> best;
    std::map<std::string, std::size_t> slot;
    for (const auto& row : r.rows) {
        auto [it, fresh] = slot.try_emplace(row.motor, best.size());
        if (fresh) {
            best.emplace_back(&row, 0);
        } else if (row.index.W < best[it->second].first->index.W) {
            best[it->second].first = &row;
        }
        ++best[it->second].second;
    }
    return best;
}

nlohmann::json row_json(const SweepRow& r) {
    return {{"scenario", r.scenario},
            {"motor", r.motor},
            {"inertia_ratio", r.inertia_ratio},
            {"gain_source", r.gain_source},
            {"Kp", r.gains.kp},
            {"Kvp", r.gains.kvp},
            {"Kvi", r.gains.kvi},
            {"Kfv", r.gains.kfv},
            {"max_pos_err_mm", r.index.max_pos_err},
            {"max_vel_err_mms", r.index.max_vel_err},
            {"vel_fluct", r.index.vel_fluct},
            {"W", r.index.W},
            {"seed", r.seed},
            {"diverged", r.index.diverged}};
}

}  // namespace

SweepResult fixed_gain_sweep(const StudyConfig& cfg, const std::string& scenario) {
    validate(cfg);
    SweepResult res;
    res.scenario = scenario;
    const auto cmds = reciprocate(plan(cfg.motion), cfg.sim.ts);

    for (const auto& motor : cfg.motors) {
        const auto plant = cfg.mechanics.with(motor);
        for (std::size_t s = 0; s < cfg.gain_sets.size(); ++s) {
            const auto& g = cfg.gain_sets[s];
            const auto idx = evaluate(run(plant, g, cmds, cfg.sim), cfg.std_kind);
            res.rows.push_back(make_row(scenario, motor, plant, "set" + std::to_string(s + 1), g,
                                        idx, cfg.master_seed));
        }
    }

    // Which inertia ratio each gain set favours; differing answers mean the
    // tuning, not the mechanics, decides the trend.
    nlohmann::json argmins = nlohmann::json::object();
    std::vector<std::string> winners;
    for (std::size_t s = 0; s < cfg.gain_sets.size(); ++s) {
        const SweepRow* best = nullptr;
        for (const auto& row : res.rows) {
            if (row.gain_source != "set" + std::to_string(s + 1)) continue;
            if (!best || row.index.W < best->index.W) best = &row;
        }
        if (!best) continue;
        argmins[best->gain_source] = {{"motor", best->motor},
                                      {"inertia_ratio", best->inertia_ratio},
                                      {"W", best->index.W}};
        winners.push_back(best->motor);
    }
    std::sort(winners.begin(), winners.end());
    const bool differ = std::unique(winners.begin(), winners.end()) - winners.begin() > 1;
    res.report["argmin_ratio_by_gain_set"] = argmins;
    res.report["expected_outcome"] = {
        {"claim", "arg-min inertia ratio of W differs between fixed gain sets"},
        {"observed", differ}};
    return res;
}

SweepResult decoupled_sweep(const StudyConfig& cfg, const std::string& scenario) {
    validate(cfg);
    SweepResult res;
    res.scenario = scenario;
    const auto cmds = reciprocate(plan(cfg.motion), cfg.sim.ts);
    const Box box = Box::from(cfg.bounds);
    const BatchEvaluator eval{cfg.jobs};

    nlohmann::json spreads = nlohmann::json::array();
    for (const auto& motor : cfg.motors) {
        const auto plant = cfg.mechanics.with(motor);
        const auto objective = make_objective(plant, cmds, cfg.sim, cfg.std_kind);
        std::vector<double> ws;
        for (int r = 0; r < cfg.repeats; ++r) {
            FwaConfig fwa = cfg.fwa;
            fwa.seed = cfg.master_seed + static_cast<std::uint64_t>(r);
            const auto opt = fwa_minimize(objective, box, fwa, eval);
            const Gains g = Gains::from_vector(opt.best);
            const auto idx = evaluate(run(plant, g, cmds, cfg.sim), cfg.std_kind);
            ws.push_back(idx.W);
            res.rows.push_back(
                make_row(scenario, motor, plant, "fwa-r" + std::to_string(r), g, idx, fwa.seed));
        }
        const auto spread = summarize_spread(ws);
        spreads.push_back({{"motor", motor.label},
                           {"inertia_ratio", plant.inertia_ratio()},
                           {"spread", spread.spread},
                           {"relative_spread", spread.relative_spread}});
    }
    res.report["repeat_spread"] = spreads;

    // Large-ratio deterioration: best W of the highest-ratio motor against the
    // best over motors inside the usual matching window.
    constexpr double kWindowLo = 0.75;
    constexpr double kWindowHi = 2.5;
    const auto best = best_per_motor(res);
    const SweepRow* highest = nullptr;
    double window_min = std::numeric_limits<double>::infinity();
    for (const auto& [row, count] : best) {
        if (!highest || row->inertia_ratio > highest->inertia_ratio) highest = row;
        if (row->inertia_ratio >= kWindowLo && row->inertia_ratio <= kWindowHi) {
            window_min = std::min(window_min, row->index.W);
        }
    }
    if (highest && std::isfinite(window_min)) {
        res.report["expected_outcome"] = {
            {"claim", "W at the largest inertia ratio exceeds the best W inside ratio window"},
            {"window", {kWindowLo, kWindowHi}},
            {"largest_ratio", highest->inertia_ratio},
            {"W_at_largest_ratio", highest->index.W},
            {"min_W_in_window", window_min},
            {"margin", highest->index.W - window_min},
            {"observed", highest->index.W > window_min}};
    }
    return res;
}

SweepResult motion_sweep(const StudyConfig& cfg, const MotionGrid& grid,
                         const std::string& scenario) {
    if (grid.values.empty()) throw std::invalid_argument("motion grid is empty");
    SweepResult res;
    res.scenario = scenario;
    const bool accel = grid.axis == MotionAxis::kAcceleration;

    nlohmann::json monotone = nlohmann::json::array();
    std::map<std::string, std::vector<double>> w_by_motor;
    for (double value : grid.values) {
        StudyConfig point = cfg;
        if (accel) {
            point.motion.a_max = value;
        } else {
            point.motion.v_max = value * 1e-3;
        }
        point.repeats = 1;
        const std::string tag =
            scenario + (accel ? "/a=" : "/v=") + format_number(value);
        auto sub = decoupled_sweep(point, tag);
        for (auto& row : sub.rows) {
            w_by_motor[row.motor].push_back(row.index.W);
            res.rows.push_back(std::move(row));
        }
    }
    for (const auto& motor : cfg.motors) {
        const auto& ws = w_by_motor[motor.label];
        monotone.push_back({{"motor", motor.label},
                            {"W_first", ws.front()},
                            {"W_last", ws.back()},
                            {"observed", ws.back() > ws.front()}});
    }
    res.report["grid"] = {{"axis", accel ? "acceleration_m_s2" : "speed_mm_s"},
                          {"values", grid.values}};
    res.report["expected_outcome"] = {
        {"claim", "per motor, W at the last grid point exceeds W at the first"},
        {"per_motor", monotone}};
    return res;
}

SweepResult stability_study(const StudyConfig& cfg, std::size_t motor_index, int repeats,
                            const std::string& scenario) {
    validate(cfg);
    if (motor_index >= cfg.motors.size()) throw std::invalid_argument("motor index out of range");
    SweepResult res;
    res.scenario = scenario;
    const auto& motor = cfg.motors[motor_index];
    const auto plant = cfg.mechanics.with(motor);
    const auto cmds = reciprocate(plan(cfg.motion), cfg.sim.ts);
    const auto objective = make_objective(plant, cmds, cfg.sim, cfg.std_kind);
    const Box box = Box::from(cfg.bounds);
    const BatchEvaluator eval{cfg.jobs};

    const std::pair<const char*, AlgoConfig> algos[] = {{"fwa", cfg.fwa}, {"ga", cfg.ga}};
    for (const auto& [name, algo] : algos) {
        const auto rep = stability_trial(objective, box, algo, repeats, cfg.master_seed, eval);
        for (std::size_t i = 0; i < rep.runs.size(); ++i) {
            const Gains g = Gains::from_vector(rep.runs[i].best);
            const auto idx = evaluate(run(plant, g, cmds, cfg.sim), cfg.std_kind);
            res.rows.push_back(make_row(scenario, motor, plant,
                                        std::string(name) + "-r" + std::to_string(i), g, idx,
                                        rep.runs[i].seed));
        }
        res.report[name] = {{"best_W", rep.best_W},
                            {"spread", rep.spread},
                            {"relative_spread", rep.relative_spread}};
    }
    const double fwa_rel = res.report["fwa"]["relative_spread"];
    const double ga_rel = res.report["ga"]["relative_spread"];
    res.report["expected_outcome"] = {
        {"claim", "FWA relative spread of best W <= GA relative spread"},
        {"fwa_relative_spread", fwa_rel},
        {"ga_relative_spread", ga_rel},
        {"observed", fwa_rel <= ga_rel}};
    return res;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "scenario,motor,inertia_ratio,gain_source,Kp,Kvp,Kvi,Kfv,max_pos_err_mm,"
          "max_vel_err_mms,vel_fluct,W,seed,diverged\n";
    for (const auto& r : result.rows) {
        os << r.scenario << ',' << r.motor << ',' << format_number(r.inertia_ratio) << ','
           << r.gain_source << ',' << format_number(r.gains.kp) << ','
           << format_number(r.gains.kvp) << ',' << format_number(r.gains.kvi) << ','
           << format_number(r.gains.kfv) << ',' << format_number(r.index.max_pos_err) << ','
           << format_number(r.index.max_vel_err) << ',' << format_number(r.index.vel_fluct) << ','
           << format_number(r.index.W) << ',' << r.seed << ',' << (r.index.diverged ? 1 : 0)
           << '\n';
    }
}

nlohmann::json summarize(const SweepResult& result) {
    nlohmann::json best = nlohmann::json::array();
    for (const auto& [row, count] : best_per_motor(result)) {
        auto j = row_json(*row);
        j["rows"] = count;
        best.push_back(std::move(j));
    }
    return {{"scenario", result.scenario},
            {"rows", result.rows.size()},
            {"any_diverged", result.any_diverged()},
            {"best_per_motor", best},
            {"report", result.report}};
}

void write_bundle(const std::filesystem::path& dir, const SweepResult& result) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream os(dir / "sweep.csv", std::ios::binary);
        write_sweep_csv(os, result);
        if (!os) throw std::runtime_error("cannot write " + (dir / "sweep.csv").string());
    }
    {
        std::ofstream os(dir / "summary.json", std::ios::binary);
        os << summarize(result).dump(2) << '\n';
        if (!os) throw std::runtime_error("cannot write " + (dir / "summary.json").string());
    }

    // One series per (scenario, gain source), rows ordered by inertia ratio.
    std::map<std::string, std::vector<const SweepRow*>> series;
    std::vector<std::string> order;
    for (const auto& r : result.rows) {
        std::string key = r.scenario + "_" + r.gain_source;
        for (auto& c : key) {
            if (c == '/' || c == '=' || c == ' ') c = '_';
        }
        if (!series.contains(key)) order.push_back(key);
        series[key].push_back(&r);
    }
    for (const auto& key : order) {
        auto rows = series[key];
        std::stable_sort(rows.begin(), rows.end(), [](const SweepRow* a, const SweepRow* b) {
            return a->inertia_ratio < b->inertia_ratio;
        });
        std::ofstream os(dir / ("W_vs_ratio_" + key + ".dat"), std::ios::binary);
        os << "# ratio W\n";
        for (const auto* r : rows) os << format_number(r->inertia_ratio) << ' ' << format_number(r->index.W) << '\n';
        if (!os) throw std::runtime_error("cannot write plot data for " + key);
    }
}

}  // namespace feedsim
