#include "feedsim/config.hpp"

#include <fstream>
#include <numbers>
#include <set>

namespace feedsim {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
        if (!allowed.contains(k)) throw ConfigError(where + ": unknown field '" + k + "'");
    }
}

std::string path_of(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
}

double number(const json& j, const std::string& where, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(path_of(where, key) + ": expected a number");
    return v.get<double>();
}

double required_number(const json& j, const std::string& where, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing field '" + path_of(where, key) + "'");
    return number(j, where, key, 0.0);
}

int integer(const json& j, const std::string& where, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(path_of(where, key) + ": expected an integer");
    return v.get<int>();
}

std::string text(const json& j, const std::string& where, const std::string& key,
                 const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_string()) throw ConfigError(path_of(where, key) + ": expected a string");
    return v.get<std::string>();
}

Gains parse_gains(const json& j, const std::string& where) {
    check_keys(j, where, {"Kp", "Kvp", "Kvi", "Kfv"});
    return Gains{required_number(j, where, "Kp"), required_number(j, where, "Kvp"),
                 required_number(j, where, "Kvi"), required_number(j, where, "Kfv")};
}

json gains_json(const Gains& g) {
    return {{"Kp", g.kp}, {"Kvp", g.kvp}, {"Kvi", g.kvi}, {"Kfv", g.kfv}};
}

std::pair<double, double> parse_interval(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(where + ": expected [lo, hi]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::size_t find_motor(const StudyConfig& cfg, const std::string& label) {
    for (std::size_t i = 0; i < cfg.motors.size(); ++i) {
        if (cfg.motors[i].label == label) return i;
    }
    throw ConfigError("motor: no motor labelled '" + label + "' in the catalog");
}

ScenarioFile parse_scenario(const json& j) {
    check_keys(j, "config",
               {"scenario", "seed", "repeats", "plant", "motors", "motor", "gains", "gain_sets",
                "bounds", "fwa", "ga", "algo", "motion", "motion_grid", "sim", "metrics"});
    ScenarioFile f;
    StudyConfig& s = f.study;

    if (j.contains("scenario")) f.scenario = text(j, "", "scenario", "");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
        s.master_seed = j["seed"].get<std::uint64_t>();
    }
    s.repeats = integer(j, "", "repeats", s.repeats);

    if (j.contains("plant")) {
        const auto& p = j["plant"];
        check_keys(p, "plant",
                   {"stiffness", "load_inertia_kgcm2", "damping", "lead_mm", "damping_placement"});
        s.mechanics.stiffness = number(p, "plant", "stiffness", s.mechanics.stiffness);
        s.mechanics.load_inertia =
            number(p, "plant", "load_inertia_kgcm2", s.mechanics.load_inertia / kKgCm2) * kKgCm2;
        s.mechanics.damping = number(p, "plant", "damping", s.mechanics.damping);
        const double lead_mm = number(p, "plant", "lead_mm", 10.0);
        s.mechanics.transmission = lead_mm * 1e-3 / (2.0 * std::numbers::pi);
        const auto placement = text(p, "plant", "damping_placement", "coupling");
        if (placement == "coupling") {
            s.sim.damping_placement = DampingPlacement::kCoupling;
        } else if (placement == "load") {
            s.sim.damping_placement = DampingPlacement::kLoad;
        } else {
            throw ConfigError("plant.damping_placement: expected 'coupling' or 'load'");
        }
    }

    if (j.contains("motors")) {
        const auto& ms = j["motors"];
        if (!ms.is_array()) throw ConfigError("motors: expected an array");
        s.motors.clear();
        for (std::size_t i = 0; i < ms.size(); ++i) {
            const std::string where = "motors[" + std::to_string(i) + "]";
            check_keys(ms[i], where, {"label", "max_torque", "rotor_inertia_kgcm2"});
            if (!ms[i].contains("label")) throw ConfigError("missing field '" + where + ".label'");
            s.motors.push_back({text(ms[i], where, "label", ""),
                                required_number(ms[i], where, "max_torque"),
                                required_number(ms[i], where, "rotor_inertia_kgcm2") * kKgCm2});
        }
    }
    if (j.contains("motor")) f.motor = text(j, "", "motor", "");
    if (j.contains("gains")) f.gains = parse_gains(j["gains"], "gains");

    if (j.contains("gain_sets")) {
        const auto& gs = j["gain_sets"];
        if (!gs.is_array()) throw ConfigError("gain_sets: expected an array");
        s.gain_sets.clear();
        for (std::size_t i = 0; i < gs.size(); ++i) {
            s.gain_sets.push_back(parse_gains(gs[i], "gain_sets[" + std::to_string(i) + "]"));
        }
    }

    if (j.contains("bounds")) {
        const auto& b = j["bounds"];
        check_keys(b, "bounds", {"Kp", "Kvp", "Kvi", "Kfv"});
        const char* names[] = {"Kp", "Kvp", "Kvi", "Kfv"};
        for (int k = 0; k < 4; ++k) {
            if (!b.contains(names[k])) continue;
            const auto [lo, hi] = parse_interval(b[names[k]], std::string("bounds.") + names[k]);
            s.bounds.lo(k) = lo;
            s.bounds.hi(k) = hi;
        }
    }

    if (j.contains("fwa")) {
        const auto& w = j["fwa"];
        check_keys(w, "fwa",
                   {"generations", "fireworks", "sparks", "mutation_sparks", "amplitude",
                    "spark_floor_frac", "spark_ceil_frac", "epsilon", "selection"});
        auto& c = s.fwa;
        c.generations = integer(w, "fwa", "generations", c.generations);
        c.n_fireworks = integer(w, "fwa", "fireworks", c.n_fireworks);
        c.total_sparks = integer(w, "fwa", "sparks", c.total_sparks);
        c.gauss_sparks = integer(w, "fwa", "mutation_sparks", c.gauss_sparks);
        c.amplitude_max = number(w, "fwa", "amplitude", c.amplitude_max);
        c.spark_floor_frac = number(w, "fwa", "spark_floor_frac", c.spark_floor_frac);
        c.spark_ceil_frac = number(w, "fwa", "spark_ceil_frac", c.spark_ceil_frac);
        c.epsilon = number(w, "fwa", "epsilon", c.epsilon);
        const auto sel = text(w, "fwa", "selection", "elite-random");
        if (sel == "elite-random") {
            c.selection = FwaSelection::kEliteRandom;
        } else if (sel == "distance") {
            c.selection = FwaSelection::kDistance;
        } else {
            throw ConfigError("fwa.selection: expected 'elite-random' or 'distance'");
        }
    }

    if (j.contains("ga")) {
        const auto& g = j["ga"];
        check_keys(g, "ga",
                   {"generations", "population", "gene_length_bits", "crossover_rate",
                    "mutation_rate"});
        auto& c = s.ga;
        c.generations = integer(g, "ga", "generations", c.generations);
        c.population = integer(g, "ga", "population", c.population);
        c.gene_length_bits = integer(g, "ga", "gene_length_bits", c.gene_length_bits);
        c.crossover_rate = number(g, "ga", "crossover_rate", c.crossover_rate);
        c.mutation_rate = number(g, "ga", "mutation_rate", c.mutation_rate);
    }

    if (j.contains("algo")) {
        const auto a = text(j, "", "algo", "fwa");
        if (a == "fwa") {
            f.algo = Algo::kFwa;
        } else if (a == "ga") {
            f.algo = Algo::kGa;
        } else {
            throw ConfigError("algo: expected 'fwa' or 'ga'");
        }
    }

    if (j.contains("motion")) {
        const auto& m = j["motion"];
        check_keys(m, "motion", {"distance_mm", "speed_mm_s", "acceleration_m_s2"});
        s.motion = ProfileSpec::from_mm(required_number(m, "motion", "distance_mm"),
                                        required_number(m, "motion", "speed_mm_s"),
                                        required_number(m, "motion", "acceleration_m_s2"));
        f.has_motion = true;
    }

    if (j.contains("motion_grid")) {
        const auto& g = j["motion_grid"];
        check_keys(g, "motion_grid", {"accelerations_m_s2", "speeds_mm_s"});
        if (g.size() != 1) {
            throw ConfigError("motion_grid: give exactly one of accelerations_m_s2, speeds_mm_s");
        }
        MotionGrid grid;
        const std::string key = g.contains("accelerations_m_s2") ? "accelerations_m_s2" : "speeds_mm_s";
        grid.axis = key == "speeds_mm_s" ? MotionAxis::kSpeed : MotionAxis::kAcceleration;
        if (!g[key].is_array()) throw ConfigError("motion_grid." + key + ": expected an array");
        for (const auto& v : g[key]) {
            if (!v.is_number()) throw ConfigError("motion_grid." + key + ": expected numbers");
            grid.values.push_back(v.get<double>());
        }
        f.motion_grid = grid;
    }

    if (j.contains("sim")) {
        const auto& m = j["sim"];
        check_keys(m, "sim", {"Ts", "substeps", "duration", "velocity_feedback", "error_units"});
        s.sim.ts = number(m, "sim", "Ts", s.sim.ts);
        s.sim.substeps = integer(m, "sim", "substeps", s.sim.substeps);
        if (m.contains("duration") && !m["duration"].is_null()) {
            s.sim.duration = number(m, "sim", "duration", 0.0);
        }
        const auto fb = text(m, "sim", "velocity_feedback", "motor");
        if (fb == "motor") {
            s.sim.velocity_feedback = VelocityFeedback::kMotor;
        } else if (fb == "table") {
            s.sim.velocity_feedback = VelocityFeedback::kTable;
        } else {
            throw ConfigError("sim.velocity_feedback: expected 'motor' or 'table'");
        }
        const auto units = text(m, "sim", "error_units", "mm");
        if (units == "mm") {
            s.sim.error_units = ErrorUnits::kMillimetres;
        } else if (units == "m") {
            s.sim.error_units = ErrorUnits::kMetres;
        } else {
            throw ConfigError("sim.error_units: expected 'mm' or 'm'");
        }
    }

    if (j.contains("metrics")) {
        const auto& m = j["metrics"];
        check_keys(m, "metrics", {"std"});
        const auto kind = text(m, "metrics", "std", "population");
        if (kind == "population") {
            s.std_kind = StdKind::kPopulation;
        } else if (kind == "sample") {
            s.std_kind = StdKind::kSample;
        } else {
            throw ConfigError("metrics.std: expected 'population' or 'sample'");
        }
    }
    return f;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_scenario(j);
}

json to_json(const ScenarioFile& f) {
    const StudyConfig& s = f.study;
    json j;
    if (f.scenario) j["scenario"] = *f.scenario;
    j["seed"] = s.master_seed;
    j["repeats"] = s.repeats;
    j["plant"] = {{"stiffness", s.mechanics.stiffness},
                  {"load_inertia_kgcm2", s.mechanics.load_inertia / kKgCm2},
                  {"damping", s.mechanics.damping},
                  {"lead_mm", s.mechanics.transmission * 2.0 * std::numbers::pi * 1e3},
                  {"damping_placement",
                   s.sim.damping_placement == DampingPlacement::kCoupling ? "coupling" : "load"}};
    j["motors"] = json::array();
    for (const auto& m : s.motors) {
        j["motors"].push_back({{"label", m.label},
                               {"max_torque", m.torque_limit},
                               {"rotor_inertia_kgcm2", m.rotor_inertia / kKgCm2}});
    }
    if (f.motor) j["motor"] = *f.motor;
    if (f.gains) j["gains"] = gains_json(*f.gains);
    j["gain_sets"] = json::array();
    for (const auto& g : s.gain_sets) j["gain_sets"].push_back(gains_json(g));
    j["bounds"] = {{"Kp", {s.bounds.lo(0), s.bounds.hi(0)}},
                   {"Kvp", {s.bounds.lo(1), s.bounds.hi(1)}},
                   {"Kvi", {s.bounds.lo(2), s.bounds.hi(2)}},
                   {"Kfv", {s.bounds.lo(3), s.bounds.hi(3)}}};
    j["fwa"] = {{"generations", s.fwa.generations},
                {"fireworks", s.fwa.n_fireworks},
                {"sparks", s.fwa.total_sparks},
                {"mutation_sparks", s.fwa.gauss_sparks},
                {"amplitude", s.fwa.amplitude_max},
                {"spark_floor_frac", s.fwa.spark_floor_frac},
                {"spark_ceil_frac", s.fwa.spark_ceil_frac},
                {"epsilon", s.fwa.epsilon},
                {"selection",
                 s.fwa.selection == FwaSelection::kEliteRandom ? "elite-random" : "distance"}};
    j["ga"] = {{"generations", s.ga.generations},
               {"population", s.ga.population},
               {"gene_length_bits", s.ga.gene_length_bits},
               {"crossover_rate", s.ga.crossover_rate},
               {"mutation_rate", s.ga.mutation_rate}};
    j["algo"] = f.algo == Algo::kFwa ? "fwa" : "ga";
    j["motion"] = {{"distance_mm", s.motion.distance * 1e3},
                   {"speed_mm_s", s.motion.v_max * 1e3},
                   {"acceleration_m_s2", s.motion.a_max}};
    if (f.motion_grid) {
        const bool accel = f.motion_grid->axis == MotionAxis::kAcceleration;
        j["motion_grid"] = {{accel ? "accelerations_m_s2" : "speeds_mm_s", f.motion_grid->values}};
    }
    j["sim"] = {{"Ts", s.sim.ts},
                {"substeps", s.sim.substeps},
                {"velocity_feedback",
                 s.sim.velocity_feedback == VelocityFeedback::kMotor ? "motor" : "table"},
                {"error_units", s.sim.error_units == ErrorUnits::kMillimetres ? "mm" : "m"}};
    if (s.sim.duration) j["sim"]["duration"] = *s.sim.duration;
    j["metrics"] = {{"std", s.std_kind == StdKind::kPopulation ? "population" : "sample"}};
    return j;
}

std::vector<std::string> diagnose(const ScenarioFile& f) {
    std::vector<std::string> problems;
    const auto check = [&problems](const std::string& what, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            problems.push_back(what + ": " + e.what());
        }
    };
    const StudyConfig& s = f.study;
    check("plant", [&] { (void)s.mechanics.with(MotorSpec{"probe", 1.0, 1.0}); });
    if (s.motors.empty()) problems.push_back("motors: catalog is empty");
    for (const auto& m : s.motors) check("motors", [&] { validate(m); });
    for (std::size_t i = 0; i < s.gain_sets.size(); ++i) {
        check("gain_sets[" + std::to_string(i) + "]", [&] { validate(s.gain_sets[i]); });
    }
    check("bounds", [&] { validate(s.bounds); });
    check("fwa", [&] { validate(s.fwa); });
    check("ga", [&] { validate(s.ga); });
    check("sim", [&] { validate(s.sim); });
    check("motion", [&] { (void)reciprocate(plan(s.motion), s.sim.ts); });
    if (s.repeats < 1) problems.push_back("repeats: must be >= 1");
    if (f.motor) check("motor", [&] { (void)find_motor(s, *f.motor); });
    if (f.gains) check("gains", [&] { validate(*f.gains); });
    if (f.motion_grid) {
        for (double v : f.motion_grid->values) {
            check("motion_grid", [&] {
                ProfileSpec p = s.motion;
                if (f.motion_grid->axis == MotionAxis::kAcceleration) {
                    p.a_max = v;
                } else {
                    p.v_max = v * 1e-3;
                }
                (void)reciprocate(plan(p), s.sim.ts);
            });
        }
    }
    if (f.scenario) {
        static const std::set<std::string> known{"fixed", "decoupled", "motion", "stability"};
        if (!known.contains(*f.scenario)) {
            problems.push_back("scenario: unknown '" + *f.scenario +
                               "' (expected fixed, decoupled, motion, stability)");
        }
    }
    return problems;
}

}  // namespace feedsim
