#pragma once

#include <Eigen/Core>

namespace feedsim {

/// Servo tuning parameters. Position gain in 1/s; the velocity-loop gains are
/// per unit of the controller's error length (see ErrorUnits).
struct Gains {
    double kp = 0.0;   // position loop proportional
    double kvp = 0.0;  // velocity loop proportional
    double kvi = 0.0;  // velocity loop integral
    double kfv = 0.0;  // velocity feedforward ratio

    /// Packed as (kp, kvp, kvi, kfv); the optimizers search this vector.
    Eigen::Vector4d as_vector() const { return {kp, kvp, kvi, kfv}; }
    static Gains from_vector(const Eigen::Ref<const Eigen::VectorXd>& v);

    bool operator==(const Gains&) const = default;
};

void validate(const Gains& g);

/// Box constraints over the packed gain vector.
struct GainBounds {
    Eigen::Vector4d lo{0.0, 0.0, 0.0, 0.5};
    Eigen::Vector4d hi{200.0, 5.0, 20.0, 1.0};

    bool contains(const Gains& g) const;
};

void validate(const GainBounds& b);

/// Length unit the velocity-loop errors are expressed in before the gains act.
enum class ErrorUnits { kMillimetres, kMetres };

inline double error_scale(ErrorUnits u) { return u == ErrorUnits::kMillimetres ? 1e3 : 1.0; }

struct ControllerState {
    double integ = 0.0;        // velocity-error integral, in error units times seconds
    double last_torque = 0.0;  // [N·m]
};

/// Measured and commanded signals for one control tick, all SI.
struct ControlInputs {
    double pos_cmd = 0.0;
    double vel_cmd = 0.0;
    double pos_fb = 0.0;
    double vel_fb = 0.0;
};

struct ControlOutput {
    double torque = 0.0;
    ControllerState state;
};

ControllerState reset();

/// One tick of the cascade: P position loop with velocity feedforward, PI
/// velocity loop, clamp to +-torque_limit with conditional-integration
/// anti-windup.
ControlOutput control_step(const Gains& g, const ControlInputs& in, const ControllerState& st,
                           double torque_limit, double ts,
                           ErrorUnits units = ErrorUnits::kMillimetres);

}  // namespace feedsim
