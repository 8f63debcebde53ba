#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace feedsim {

/// Where the viscous damping acts: across the motor-screw coupling, or from
/// the load to ground.
enum class DampingPlacement { kCoupling, kLoad };

/// Lumped two-inertia constants in SI units.
template <typename Scalar>
struct PlantParamsT {
    Scalar stiffness;      // [N·m/rad]
    Scalar motor_inertia;  // [kg·m^2]
    Scalar load_inertia;   // [kg·m^2]
    Scalar damping;        // [N·m·s/rad]
    Scalar transmission;   // table travel per screw radian [m/rad]
    Scalar torque_limit;   // [N·m]

    Scalar inertia_ratio() const { return load_inertia / motor_inertia; }
};

using PlantParams = PlantParamsT<double>;

/// State ordering for PlantStateT: motor angle, motor speed, load angle, load speed.
enum StateIndex : Eigen::Index { kMotorAngle = 0, kMotorSpeed = 1, kLoadAngle = 2, kLoadSpeed = 3 };

template <typename Scalar>
using PlantStateT = Eigen::Matrix<Scalar, 4, 1>;

using PlantState = PlantStateT<double>;

struct MotorSpec {
    std::string label;
    double torque_limit = 0.0;   // [N·m]
    double rotor_inertia = 0.0;  // [kg·m^2]
};

/// Ball-screw lead of 10 mm per turn.
inline constexpr double kScrewTransmission = 0.010 / (2.0 * std::numbers::pi);
inline constexpr double kKgCm2 = 1e-4;

/// Mechanical constants of the feed axis with the load as specified; the
/// motor-dependent fields come from `motor`.
PlantParams make_plant(const MotorSpec& motor, double load_inertia = 45.5 * kKgCm2,
                       double stiffness = 612.0, double damping = 0.0288,
                       double transmission = kScrewTransmission);

void validate(const PlantParams& p);
void validate(const MotorSpec& m);

/// Raised by step() when the state leaves the finite envelope.
class PlantDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDivergenceLimit = 1e9;

/// Continuous-time state equations x' = A x + b_torque u + b_load d.
template <typename Scalar>
struct PlantMatrices {
    Eigen::Matrix<Scalar, 4, 4> A;
    Eigen::Matrix<Scalar, 4, 1> b_torque;
    Eigen::Matrix<Scalar, 4, 1> b_load;
};

template <typename Scalar>
PlantMatrices<Scalar> system_matrices(const PlantParamsT<Scalar>& p,
                                      DampingPlacement placement = DampingPlacement::kCoupling) {
    const Scalar k = p.stiffness;
    const Scalar c = p.damping;
    const Scalar jm = p.motor_inertia;
    const Scalar jl = p.load_inertia;

    PlantMatrices<Scalar> m;
    m.A.setZero();
    m.A(kMotorAngle, kMotorSpeed) = Scalar(1);
    m.A(kLoadAngle, kLoadSpeed) = Scalar(1);
    m.A(kMotorSpeed, kMotorAngle) = -k / jm;
    m.A(kMotorSpeed, kLoadAngle) = k / jm;
    m.A(kLoadSpeed, kMotorAngle) = k / jl;
    m.A(kLoadSpeed, kLoadAngle) = -k / jl;
    if (placement == DampingPlacement::kCoupling) {
        m.A(kMotorSpeed, kMotorSpeed) = -c / jm;
        m.A(kMotorSpeed, kLoadSpeed) = c / jm;
        m.A(kLoadSpeed, kMotorSpeed) = c / jl;
        m.A(kLoadSpeed, kLoadSpeed) = -c / jl;
    } else {
        m.A(kLoadSpeed, kLoadSpeed) = -c / jl;
    }
    m.b_torque.setZero();
    m.b_torque(kMotorSpeed) = Scalar(1) / jm;
    m.b_load.setZero();
    m.b_load(kLoadSpeed) = Scalar(-1) / jl;
    return m;
}

/// State rate for an already saturated motor torque and a load disturbance torque.
template <typename Scalar>
PlantStateT<Scalar> derivative(const PlantParamsT<Scalar>& p, const PlantStateT<Scalar>& s,
                               Scalar torque, Scalar load_disturbance,
                               DampingPlacement placement = DampingPlacement::kCoupling) {
    const Scalar twist = s(kMotorAngle) - s(kLoadAngle);
    const Scalar slip = s(kMotorSpeed) - s(kLoadSpeed);
    const Scalar spring = p.stiffness * twist;

    PlantStateT<Scalar> rate;
    rate(kMotorAngle) = s(kMotorSpeed);
    rate(kLoadAngle) = s(kLoadSpeed);
    if (placement == DampingPlacement::kCoupling) {
        const Scalar coupling = spring + p.damping * slip;
        rate(kMotorSpeed) = (torque - coupling) / p.motor_inertia;
        rate(kLoadSpeed) = (coupling - load_disturbance) / p.load_inertia;
    } else {
        rate(kMotorSpeed) = (torque - spring) / p.motor_inertia;
        rate(kLoadSpeed) =
            (spring - p.damping * s(kLoadSpeed) - load_disturbance) / p.load_inertia;
    }
    return rate;
}

template <typename Scalar>
Scalar saturate(const PlantParamsT<Scalar>& p, Scalar torque_cmd) {
    if (torque_cmd > p.torque_limit) return p.torque_limit;
    if (torque_cmd < -p.torque_limit) return -p.torque_limit;
    return torque_cmd;
}

/// One classical RK4 step with the torque held over dt.
/// Throws PlantDiverged when any state leaves [-1e9, 1e9] or turns non-finite.
template <typename Scalar>
PlantStateT<Scalar> step(const PlantParamsT<Scalar>& p, const PlantStateT<Scalar>& s, Scalar torque,
                         Scalar disturbance, Scalar dt,
                         DampingPlacement placement = DampingPlacement::kCoupling) {
    const Scalar half = dt / Scalar(2);
    const PlantStateT<Scalar> k1 = derivative(p, s, torque, disturbance, placement);
    const PlantStateT<Scalar> k2 =
        derivative(p, PlantStateT<Scalar>(s + half * k1), torque, disturbance, placement);
    const PlantStateT<Scalar> k3 =
        derivative(p, PlantStateT<Scalar>(s + half * k2), torque, disturbance, placement);
    const PlantStateT<Scalar> k4 =
        derivative(p, PlantStateT<Scalar>(s + dt * k3), torque, disturbance, placement);
    PlantStateT<Scalar> next = s + (dt / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);

    // NaN fails the comparison and is caught as well.
    if (!(next.cwiseAbs().maxCoeff() <= Scalar(kDivergenceLimit))) {
        throw PlantDiverged("plant state diverged");
    }
    return next;
}

template <typename Scalar>
Scalar table_position(const PlantParamsT<Scalar>& p, const PlantStateT<Scalar>& s) {
    return p.transmission * s(kLoadAngle);
}

template <typename Scalar>
Scalar table_velocity(const PlantParamsT<Scalar>& p, const PlantStateT<Scalar>& s) {
    return p.transmission * s(kLoadSpeed);
}

/// Motor shaft speed expressed as the table speed a rigid screw would give.
template <typename Scalar>
Scalar motor_linear_velocity(const PlantParamsT<Scalar>& p, const PlantStateT<Scalar>& s) {
    return p.transmission * s(kMotorSpeed);
}

/// Kinetic plus spring energy [J].
template <typename Scalar>
Scalar stored_energy(const PlantParamsT<Scalar>& p, const PlantStateT<Scalar>& s) {
    const Scalar twist = s(kMotorAngle) - s(kLoadAngle);
    return Scalar(0.5) * (p.motor_inertia * s(kMotorSpeed) * s(kMotorSpeed) +
                          p.load_inertia * s(kLoadSpeed) * s(kLoadSpeed) +
                          p.stiffness * twist * twist);
}

/// Undamped anti-phase mode of the two-inertia chain [rad/s].
template <typename Scalar>
Scalar natural_frequency(const PlantParamsT<Scalar>& p) {
    using std::sqrt;
    return sqrt(p.stiffness * (p.motor_inertia + p.load_inertia) /
                (p.motor_inertia * p.load_inertia));
}

}  // namespace feedsim
