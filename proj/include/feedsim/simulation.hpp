#pragma once

#include "feedsim/controller.hpp"
#include "feedsim/motion_profile.hpp"
#include "feedsim/plant.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace feedsim {

/// Which measured speed closes the velocity loop.
enum class VelocityFeedback { kMotor, kTable };

struct SimConfig {
    double ts = 1e-3;    // control period [s]
    int substeps = 10;   // RK4 steps per control period
    /// Simulated time; the command stream length when unset. Longer runs hold
    /// the final command.
    std::optional<double> duration;
    DampingPlacement damping_placement = DampingPlacement::kCoupling;
    VelocityFeedback velocity_feedback = VelocityFeedback::kMotor;
    ErrorUnits error_units = ErrorUnits::kMillimetres;
};

void validate(const SimConfig& cfg);

struct Trace {
    double dt = 0.0;
    std::vector<double> t;
    std::vector<double> pos_cmd;
    std::vector<double> pos_act;
    std::vector<double> vel_cmd;
    std::vector<double> vel_act;
    std::vector<double> torque;
    std::vector<SegmentMark> segment_marks;
    std::size_t planned_samples = 0;  // length had the run not diverged
    bool diverged = false;

    std::size_t size() const { return t.size(); }
    /// Fraction of the planned run that was simulated.
    double completed_fraction() const;
};

/// Closed loop: per tick read table feedback, run the controller, hold the
/// saturated torque for `substeps` RK4 steps. Divergence truncates the trace
/// and sets `diverged`; it is not an error.
Trace run(const PlantParams& plant, const Gains& gains, const CommandStream& cmds,
          const SimConfig& cfg = {});

/// Re-evaluates the stream's plan at a new period.
CommandStream resample(const CommandStream& cmds, double ts);

/// CSV with header t,pos_cmd,pos_act,vel_cmd,vel_act,torque (SI, 9 significant digits).
void write_trace_csv(std::ostream& os, const Trace& trace);

}  // namespace feedsim
