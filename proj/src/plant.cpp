#include "feedsim/plant.hpp"

namespace feedsim {

namespace {

void require_positive(double v, const std::string& what) {
    if (!std::isfinite(v) || v <= 0.0) {
        throw std::invalid_argument(what + " must be positive and finite");
    }
}

}  // namespace

PlantParams make_plant(const MotorSpec& motor, double load_inertia, double stiffness,
                       double damping, double transmission) {
    PlantParams p{stiffness, motor.rotor_inertia, load_inertia, damping, transmission,
                  motor.torque_limit};
    validate(p);
    return p;
}

void validate(const PlantParams& p) {
    require_positive(p.stiffness, "stiffness");
    require_positive(p.motor_inertia, "motor_inertia");
    require_positive(p.load_inertia, "load_inertia");
    require_positive(p.damping, "damping");
    require_positive(p.transmission, "transmission");
    require_positive(p.torque_limit, "torque_limit");
}

void validate(const MotorSpec& m) {
    require_positive(m.torque_limit, "motor '" + m.label + "' torque_limit");
    require_positive(m.rotor_inertia, "motor '" + m.label + "' rotor_inertia");
}

}  // namespace feedsim
