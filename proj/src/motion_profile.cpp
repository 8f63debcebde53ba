#include "feedsim/motion_profile.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace feedsim {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

}  // namespace

ProfileSpec ProfileSpec::from_mm(double distance_mm, double speed_mm_s, double accel_m_s2) {
    return ProfileSpec{distance_mm * 1e-3, speed_mm_s * 1e-3, accel_m_s2};
}

TrapezoidPlan plan(const ProfileSpec& spec) {
    require_finite(spec.distance, "distance");
    require_finite(spec.v_max, "v_max");
    require_finite(spec.a_max, "a_max");
    if (spec.distance < 0.0) throw std::invalid_argument("distance must be >= 0");
    if (spec.v_max <= 0.0) throw std::invalid_argument("v_max must be > 0");
    if (spec.a_max <= 0.0) throw std::invalid_argument("a_max must be > 0");

    TrapezoidPlan p;
    p.a = spec.a_max;
    p.distance = spec.distance;
    if (spec.distance == 0.0) return p;

    const double ramp_distance = spec.v_max * spec.v_max / spec.a_max;
    if (spec.distance >= ramp_distance) {
        p.v_peak = spec.v_max;
        p.t1 = spec.v_max / spec.a_max;
        p.t2 = p.t1 + (spec.distance - ramp_distance) / spec.v_max;
        p.t3 = p.t2 + p.t1;
    } else {
        p.v_peak = std::sqrt(spec.a_max * spec.distance);
        p.t1 = p.v_peak / spec.a_max;
        p.t2 = p.t1;
        p.t3 = 2.0 * p.t1;
    }
    return p;
}

ProfileSample sample(const TrapezoidPlan& p, double t) {
    require_finite(t, "t");
    if (t < 0.0) throw std::invalid_argument("t must be >= 0");

    if (t >= p.t3) return {p.distance, 0.0, 0.0};
    if (t <= p.t1) return {0.5 * p.a * t * t, p.a * t, p.a};
    if (t <= p.t2) return {p.accel_distance() + p.v_peak * (t - p.t1), p.v_peak, 0.0};
    // Deceleration measured back from the end of the stroke keeps closure exact.
    const double remaining = p.t3 - t;
    return {p.distance - 0.5 * p.a * remaining * remaining, p.a * remaining, -p.a};
}

CommandStream reciprocate(const TrapezoidPlan& p, double dt) {
    require_finite(dt, "dt");
    if (dt <= 0.0) throw std::invalid_argument("dt must be > 0");
    if (p.t3 <= 0.0) throw std::invalid_argument("cannot reciprocate a zero-length plan");
    if (dt > p.t1) {
        throw std::invalid_argument("dt " + std::to_string(dt) +
                                    " s is coarser than the shortest phase (" +
                                    std::to_string(p.t1) + " s)");
    }

    const auto half = static_cast<std::size_t>(std::llround(p.t3 / dt));
    const std::size_t n = 2 * half + 1;

    CommandStream cs;
    cs.dt = dt;
    cs.plan = p;
    cs.pos_cmd.resize(n);
    cs.vel_cmd.resize(n);
    cs.acc_cmd.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        if (i <= half) {
            const auto s = sample(p, t);
            cs.pos_cmd[i] = s.pos;
            cs.vel_cmd[i] = s.vel;
            cs.acc_cmd[i] = s.acc;
        } else {
            const auto s = sample(p, static_cast<double>(i - half) * dt);
            cs.pos_cmd[i] = p.distance - s.pos;
            cs.vel_cmd[i] = -s.vel;
            cs.acc_cmd[i] = -s.acc;
        }
    }

    // Phase boundaries in samples for one stroke, then mirrored for the return.
    const auto to_index = [dt](double t) { return static_cast<std::size_t>(std::llround(t / dt)); };
    const std::size_t b1 = to_index(p.t1);
    const std::size_t b2 = to_index(p.t2);
    const std::size_t stroke_bounds[] = {0, b1, b2, half};
    const Phase phases[] = {Phase::kAccel, Phase::kCruise, Phase::kDecel};

    int index = 0;
    for (std::size_t stroke = 0; stroke < 2; ++stroke) {
        const std::size_t offset = stroke * half;
        for (std::size_t k = 0; k < 3; ++k) {
            const std::size_t begin = offset + stroke_bounds[k];
            std::size_t end = offset + stroke_bounds[k + 1];
            if (stroke == 1 && k == 2) end = n;
            if (end <= begin) continue;
            cs.segment_marks.push_back({index++, phases[k], begin, end});
        }
    }
    return cs;
}

}  // namespace feedsim
