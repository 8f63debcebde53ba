#pragma once

#include "feedsim/controller.hpp"
#include "feedsim/metrics.hpp"
#include "feedsim/motion_profile.hpp"
#include "feedsim/optimizer.hpp"
#include "feedsim/plant.hpp"
#include "feedsim/simulation.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace feedsim {

/// Motor-independent part of the mechanics.
struct AxisMechanics {
    double stiffness = 612.0;              // [N·m/rad]
    double load_inertia = 45.5 * kKgCm2;   // [kg·m^2]
    double damping = 0.0288;               // [N·m·s/rad]
    double transmission = kScrewTransmission;

    PlantParams with(const MotorSpec& motor) const {
        return make_plant(motor, load_inertia, stiffness, damping, transmission);
    }
};

/// The six catalog servo motors, largest first.
std::vector<MotorSpec> default_catalog();

/// The three fixed gain sets (Kp, Kvp, Kvi, Kfv) used for the non-optimized sweep.
std::vector<Gains> fixed_gain_sets();

/// Mid-range in-bounds reference gains.
inline Gains mid_range_baseline() { return Gains{100.0, 2.5, 10.0, 0.75}; }

/// Everything a scenario needs. Defaults are the reference axis and tuning setup.
struct StudyConfig {
    AxisMechanics mechanics;
    std::vector<MotorSpec> motors = default_catalog();
    std::vector<Gains> gain_sets = fixed_gain_sets();
    GainBounds bounds;
    FwaConfig fwa;
    GaConfig ga;
    ProfileSpec motion = ProfileSpec::from_mm(200.0, 100.0, 5.0);
    SimConfig sim;
    StdKind std_kind = StdKind::kPopulation;
    std::uint64_t master_seed = 0;
    int repeats = 3;
    int jobs = 1;
};

void validate(const StudyConfig& cfg);

struct SweepRow {
    std::string scenario;
    std::string motor;
    double inertia_ratio = 0.0;
    std::string gain_source;
    Gains gains;
    PerformanceIndex index;
    std::uint64_t seed = 0;
};

struct SweepResult {
    std::string scenario;
    std::vector<SweepRow> rows;
    /// Expected-outcome checks and spread statistics, written into summary.json.
    nlohmann::json report = nlohmann::json::object();

    bool any_diverged() const;
};

/// Simulates one configuration on the reciprocating cycle of `motion`.
PerformanceIndex evaluate_gains(const PlantParams& plant, const Gains& gains,
                                const ProfileSpec& motion, const SimConfig& sim,
                                StdKind kind = StdKind::kPopulation);

/// Objective over packed gain vectors for one plant and command stream.
Objective make_objective(const PlantParams& plant, const CommandStream& cmds, const SimConfig& sim,
                         StdKind kind = StdKind::kPopulation);

/// Every motor with every fixed gain set.
SweepResult fixed_gain_sweep(const StudyConfig& cfg, const std::string& scenario = "fixed");

/// Per motor, `cfg.repeats` FWA runs with seeds master_seed + i.
SweepResult decoupled_sweep(const StudyConfig& cfg, const std::string& scenario = "decoupled");

enum class MotionAxis { kAcceleration, kSpeed };

struct MotionGrid {
    MotionAxis axis = MotionAxis::kAcceleration;
    std::vector<double> values;  // m/s^2 for acceleration, mm/s for speed
};

/// Decoupled optimization at every motion point for every motor.
SweepResult motion_sweep(const StudyConfig& cfg, const MotionGrid& grid,
                         const std::string& scenario = "motion");

/// Repeated FWA and GA tuning of one motor (6 trials each by default).
SweepResult stability_study(const StudyConfig& cfg, std::size_t motor_index, int repeats = 6,
                            const std::string& scenario = "stability");

/// sweep.csv header and rows.
void write_sweep_csv(std::ostream& os, const SweepResult& result);

/// Per-motor best rows plus the scenario report.
nlohmann::json summarize(const SweepResult& result);

/// Writes sweep.csv, summary.json and one W_vs_ratio_<series>.dat per series.
void write_bundle(const std::filesystem::path& dir, const SweepResult& result);

}  // namespace feedsim
