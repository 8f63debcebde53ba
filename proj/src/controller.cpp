#include "feedsim/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace feedsim {

Gains Gains::from_vector(const Eigen::Ref<const Eigen::VectorXd>& v) {
    if (v.size() != 4) throw std::invalid_argument("gain vector must have 4 entries");
    return Gains{v(0), v(1), v(2), v(3)};
}

void validate(const Gains& g) {
    const double values[] = {g.kp, g.kvp, g.kvi, g.kfv};
    const char* names[] = {"Kp", "Kvp", "Kvi", "Kfv"};
    for (int i = 0; i < 4; ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            throw std::invalid_argument(std::string(names[i]) + " must be finite and >= 0");
        }
    }
}

bool GainBounds::contains(const Gains& g) const {
    const Eigen::Vector4d v = g.as_vector();
    return (v.array() >= lo.array()).all() && (v.array() <= hi.array()).all();
}

void validate(const GainBounds& b) {
    const char* names[] = {"Kp", "Kvp", "Kvi", "Kfv"};
    for (int i = 0; i < 4; ++i) {
        if (!std::isfinite(b.lo(i)) || !std::isfinite(b.hi(i))) {
            throw std::invalid_argument(std::string("bounds for ") + names[i] + " must be finite");
        }
        if (b.lo(i) > b.hi(i)) {
            throw std::invalid_argument(std::string("bounds for ") + names[i] + " have lo > hi");
        }
        if (b.lo(i) < 0.0) {
            throw std::invalid_argument(std::string("bounds for ") + names[i] + " must be >= 0");
        }
    }
}

ControllerState reset() { return ControllerState{}; }

ControlOutput control_step(const Gains& g, const ControlInputs& in, const ControllerState& st,
                           double torque_limit, double ts, ErrorUnits units) {
    const double scale = error_scale(units);
    const double vel_ref = g.kp * (in.pos_cmd - in.pos_fb) + g.kfv * in.vel_cmd;
    const double e_v = (vel_ref - in.vel_fb) * scale;

    double integ = st.integ + e_v * ts;
    const double raw = g.kvp * e_v + g.kvi * integ;
    const bool pushing_high = raw > torque_limit && e_v > 0.0;
    const bool pushing_low = raw < -torque_limit && e_v < 0.0;
    if (pushing_high || pushing_low) integ = st.integ;

    // Hard ceiling: the integral term alone never exceeds the torque limit.
    if (g.kvi > 0.0) {
        const double cap = torque_limit / g.kvi;
        integ = std::clamp(integ, -cap, cap);
    } else {
        integ = 0.0;
    }

    const double torque = std::clamp(g.kvp * e_v + g.kvi * integ, -torque_limit, torque_limit);
    return {torque, ControllerState{integ, torque}};
}

}  // namespace feedsim
