// feedsim: servo feed-drive simulation, gain tuning and sweep studies.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 run completed but
// at least one simulation diverged.

#include "feedsim/config.hpp"
#include "feedsim/metrics.hpp"
#include "feedsim/optimizer.hpp"
#include "feedsim/repro.hpp"
#include "feedsim/simulation.hpp"
#include "feedsim/study.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace feedsim;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kDiverged = 3;

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string algo;
    int jobs = 1;
    std::string scenario;
};

void prepare_out(const std::string& out) {
    if (out.empty()) throw ConfigError("--out is required");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw ConfigError("cannot create output directory '" + out + "'");
}

ScenarioFile load_checked(const Options& o) {
    if (o.config.empty()) throw ConfigError("--config is required");
    ScenarioFile f = load_scenario(o.config);
    if (o.seed) f.study.master_seed = *o.seed;
    if (!o.algo.empty()) f.algo = o.algo == "ga" ? Algo::kGa : Algo::kFwa;
    f.study.jobs = o.jobs;
    const auto problems = diagnose(f);
    if (!problems.empty()) throw ConfigError(problems.front());
    return f;
}

void require(bool present, const char* field) {
    if (!present) throw ConfigError(std::string("missing field '") + field + "'");
}

int cmd_simulate(const Options& o) {
    const ScenarioFile f = load_checked(o);
    require(f.motor.has_value(), "motor");
    require(f.gains.has_value(), "gains");
    require(f.has_motion, "motion");
    prepare_out(o.out);

    const auto& s = f.study;
    const auto plant = s.mechanics.with(s.motors[find_motor(s, *f.motor)]);
    const auto cmds = reciprocate(plan(s.motion), s.sim.ts);
    const auto trace = run(plant, *f.gains, cmds, s.sim);
    const auto idx = evaluate(trace, s.std_kind);

    std::ofstream tcsv(fs::path(o.out) / "trace.csv", std::ios::binary);
    write_trace_csv(tcsv, trace);
    std::ofstream icsv(fs::path(o.out) / "index.csv", std::ios::binary);
    write_index_csv(icsv, idx);
    std::cout << "W = " << idx.W << (idx.diverged ? " (diverged)" : "") << '\n';
    return idx.diverged ? kDiverged : kOk;
}

int cmd_optimize(const Options& o) {
    const ScenarioFile f = load_checked(o);
    require(f.motor.has_value(), "motor");
    prepare_out(o.out);

    const auto& s = f.study;
    const auto plant = s.mechanics.with(s.motors[find_motor(s, *f.motor)]);
    const auto cmds = reciprocate(plan(s.motion), s.sim.ts);
    const auto objective = make_objective(plant, cmds, s.sim, s.std_kind);
    const Box box = Box::from(s.bounds);
    const BatchEvaluator eval{s.jobs};

    OptResult r;
    if (f.algo == Algo::kFwa) {
        FwaConfig c = s.fwa;
        c.seed = s.master_seed;
        r = fwa_minimize(objective, box, c, eval);
    } else {
        GaConfig c = s.ga;
        c.seed = s.master_seed;
        r = ga_minimize(objective, box, c, eval);
    }
    const Gains g = Gains::from_vector(r.best);
    const auto idx = evaluate(run(plant, g, cmds, s.sim), s.std_kind);

    nlohmann::json j;
    j["algo"] = f.algo == Algo::kFwa ? "fwa" : "ga";
    j["motor"] = *f.motor;
    j["seed"] = r.seed;
    j["gains"] = {{"Kp", g.kp}, {"Kvp", g.kvp}, {"Kvi", g.kvi}, {"Kfv", g.kfv}};
    j["W"] = r.best_W;
    j["index"] = {{"max_pos_err_mm", idx.max_pos_err},
                  {"max_vel_err_mms", idx.max_vel_err},
                  {"vel_fluct", idx.vel_fluct},
                  {"diverged", idx.diverged}};
    j["history"] = r.history;
    j["evaluations"] = r.evaluations;
    ScenarioFile echo = f;
    j["config"] = to_json(echo);
    std::ofstream os(fs::path(o.out) / "result.json", std::ios::binary);
    os << j.dump(2) << '\n';
    std::cout << "best W = " << r.best_W << " after " << r.evaluations << " evaluations\n";
    return idx.diverged ? kDiverged : kOk;
}

int finish_bundle(const std::string& out, const SweepResult& r) {
    write_bundle(out, r);
    std::cout << r.rows.size() << " rows written to " << out << '\n';
    return r.any_diverged() ? kDiverged : kOk;
}

int cmd_sweep(const Options& o) {
    const ScenarioFile f = load_checked(o);
    const std::string kind = !o.scenario.empty() ? o.scenario : f.scenario.value_or("");
    if (kind.empty()) throw ConfigError("missing field 'scenario'");
    prepare_out(o.out);

    const auto& s = f.study;
    if (kind == "fixed") return finish_bundle(o.out, fixed_gain_sweep(s, kind));
    if (kind == "decoupled") return finish_bundle(o.out, decoupled_sweep(s, kind));
    if (kind == "motion") {
        require(f.motion_grid.has_value(), "motion_grid");
        return finish_bundle(o.out, motion_sweep(s, *f.motion_grid, kind));
    }
    if (kind == "stability") {
        require(f.motor.has_value(), "motor");
        return finish_bundle(o.out, stability_study(s, find_motor(s, *f.motor), 6, kind));
    }
    throw ConfigError("scenario: unknown '" + kind + "' (expected fixed, decoupled, motion, stability)");
}

int cmd_repro(const Options& o, const std::string& positional) {
    const std::string id = !positional.empty() ? positional : o.scenario;
    const auto& ids = repro_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
        std::string list;
        for (const auto& v : ids) list += (list.empty() ? "" : ", ") + v;
        throw ConfigError("unknown scenario id '" + id + "'; valid ids: " + list);
    }
    prepare_out(o.out);
    return finish_bundle(o.out, run_repro(id, o.seed.value_or(0), o.jobs));
}

int cmd_validate(const Options& o) {
    if (o.config.empty()) throw ConfigError("--config is required");
    const ScenarioFile f = load_scenario(o.config);
    const auto problems = diagnose(f);
    const auto& b = f.study.bounds;
    const char* names[] = {"Kp", "Kvp", "Kvi", "Kfv"};
    for (int k = 0; k < 4; ++k) {
        std::cout << "bounds." << names[k] << " = [" << b.lo(k) << "," << b.hi(k) << "]\n";
    }
    std::cout << "motors:";
    for (const auto& m : f.study.motors) {
        std::cout << ' ' << m.label << " (ratio " << f.study.mechanics.load_inertia / m.rotor_inertia
                  << ')';
    }
    std::cout << '\n';
    for (const auto& p : problems) std::cout << "error: " << p << '\n';
    std::cout << (problems.empty() ? "config OK\n" : "config INVALID\n");
    return problems.empty() ? kOk : kConfigError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Servo feed-drive simulator and control-parameter tuner"};
    app.require_subcommand(1);

    Options o;
    std::string repro_id;
    std::uint64_t seed = 0;
    std::vector<CLI::Option*> seed_flags;

    const auto add_common = [&](CLI::App* sub, bool config, bool out) {
        if (config) sub->add_option("--config", o.config, "Scenario config (JSON)");
        if (out) sub->add_option("--out", o.out, "Output directory");
        seed_flags.push_back(sub->add_option("--seed", seed, "Master seed (default 0)"));
        sub->add_option("--jobs", o.jobs, "Worker threads for objective evaluation")
            ->check(CLI::PositiveNumber);
    };

    auto* simulate = app.add_subcommand("simulate", "Run one closed-loop simulation");
    add_common(simulate, true, true);
    auto* optimize = app.add_subcommand("optimize", "Tune the four gains for one motor");
    add_common(optimize, true, true);
    optimize->add_option("--algo", o.algo, "fwa or ga")->check(CLI::IsMember({"fwa", "ga"}));
    auto* sweep = app.add_subcommand("sweep", "Run a sweep scenario from a config");
    add_common(sweep, true, true);
    sweep->add_option("--scenario", o.scenario, "fixed, decoupled, motion or stability");
    auto* repro = app.add_subcommand("repro", "Run a built-in scenario with default settings");
    add_common(repro, false, true);
    repro->add_option("id", repro_id, "Scenario id");
    repro->add_option("--scenario", o.scenario, "Scenario id");
    auto* validate_cmd = app.add_subcommand("validate", "Check a config without simulating");
    validate_cmd->add_option("--config", o.config, "Scenario config (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }
    for (const auto* flag : seed_flags) {
        if (flag->count() > 0) o.seed = seed;
    }

    try {
        if (*simulate) return cmd_simulate(o);
        if (*optimize) return cmd_optimize(o);
        if (*sweep) return cmd_sweep(o);
        if (*repro) return cmd_repro(o, repro_id);
        return cmd_validate(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
}
