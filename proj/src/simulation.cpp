#include "feedsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace feedsim {

void validate(const SimConfig& cfg) {
    if (!std::isfinite(cfg.ts) || cfg.ts <= 0.0) throw std::invalid_argument("Ts must be > 0");
    if (cfg.substeps < 1) throw std::invalid_argument("substeps must be >= 1");
    if (cfg.duration && (!std::isfinite(*cfg.duration) || *cfg.duration < 0.0)) {
        throw std::invalid_argument("duration must be >= 0");
    }
}

double Trace::completed_fraction() const {
    if (planned_samples == 0) return 1.0;
    return static_cast<double>(size()) / static_cast<double>(planned_samples);
}

Trace run(const PlantParams& plant, const Gains& gains, const CommandStream& cmds,
          const SimConfig& cfg) {
    validate(cfg);
    validate(gains);
    if (cmds.size() == 0) throw std::invalid_argument("empty command stream");
    if (std::abs(cmds.dt - cfg.ts) > 1e-12 * cfg.ts) {
        throw std::invalid_argument("command period differs from Ts; resample first");
    }

    std::size_t n = cmds.size();
    if (cfg.duration) n = static_cast<std::size_t>(std::llround(*cfg.duration / cfg.ts)) + 1;

    Trace tr;
    tr.dt = cfg.ts;
    tr.planned_samples = n;
    for (auto* v : {&tr.t, &tr.pos_cmd, &tr.pos_act, &tr.vel_cmd, &tr.vel_act, &tr.torque}) {
        v->reserve(n);
    }

    for (const auto& m : cmds.segment_marks) {
        if (m.begin >= n) break;
        auto clipped = m;
        clipped.end = std::min(m.end, n);
        tr.segment_marks.push_back(clipped);
    }
    if (n > cmds.size()) {
        const int next = tr.segment_marks.empty() ? 0 : tr.segment_marks.back().index + 1;
        tr.segment_marks.push_back({next, Phase::kHold, cmds.size(), n});
    }

    const double h = cfg.ts / cfg.substeps;
    PlantState x = PlantState::Zero();
    ControllerState cs = reset();

    for (std::size_t i = 0; i < n; ++i) {
        const bool held = i >= cmds.size();
        const double pos_cmd = held ? cmds.pos_cmd.back() : cmds.pos_cmd[i];
        const double vel_cmd = held ? 0.0 : cmds.vel_cmd[i];

        const double pos_fb = table_position(plant, x);
        const double vel_act = table_velocity(plant, x);
        const double vel_fb = cfg.velocity_feedback == VelocityFeedback::kMotor
                                  ? motor_linear_velocity(plant, x)
                                  : vel_act;

        const auto out = control_step(gains, {pos_cmd, vel_cmd, pos_fb, vel_fb}, cs,
                                      plant.torque_limit, cfg.ts, cfg.error_units);
        cs = out.state;
        const double torque = saturate(plant, out.torque);

        tr.t.push_back(static_cast<double>(i) * cfg.ts);
        tr.pos_cmd.push_back(pos_cmd);
        tr.pos_act.push_back(pos_fb);
        tr.vel_cmd.push_back(vel_cmd);
        tr.vel_act.push_back(vel_act);
        tr.torque.push_back(torque);

        try {
            for (int k = 0; k < cfg.substeps; ++k) {
                x = step(plant, x, torque, 0.0, h, cfg.damping_placement);
            }
        } catch (const PlantDiverged&) {
            tr.diverged = true;
            break;
        }
    }

    if (tr.diverged) {
        const std::size_t len = tr.size();
        std::erase_if(tr.segment_marks, [len](const SegmentMark& m) { return m.begin >= len; });
        if (!tr.segment_marks.empty()) {
            tr.segment_marks.back().end = std::min(tr.segment_marks.back().end, len);
        }
    }
    return tr;
}

CommandStream resample(const CommandStream& cmds, double ts) {
    if (cmds.dt == ts) return cmds;
    return reciprocate(cmds.plan, ts);
}

void write_trace_csv(std::ostream& os, const Trace& tr) {
    os << "t,pos_cmd,pos_act,vel_cmd,vel_act,torque\n";
    char buf[256];
    for (std::size_t i = 0; i < tr.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", tr.t[i], tr.pos_cmd[i],
                      tr.pos_act[i], tr.vel_cmd[i], tr.vel_act[i], tr.torque[i]);
        os << buf;
    }
}

}  // namespace feedsim
