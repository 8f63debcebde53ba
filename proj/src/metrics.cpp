#include "feedsim/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace feedsim {

double composite(double max_pos_err, double max_vel_err, double vel_fluct) {
    return kWeightPosition * max_pos_err + kWeightVelocity * max_vel_err +
           kWeightFluctuation * vel_fluct;
}

ErrorSeries errors(const Trace& trace) {
    if (trace.size() == 0) throw std::invalid_argument("empty trace");
    const auto n = static_cast<Eigen::Index>(trace.size());
    using Map = Eigen::Map<const Eigen::ArrayXd>;
    ErrorSeries e;
    e.pos = (Map(trace.pos_cmd.data(), n) - Map(trace.pos_act.data(), n)).abs() * 1e3;
    e.vel = (Map(trace.vel_cmd.data(), n) - Map(trace.vel_act.data(), n)).abs() * 1e3;
    return e;
}

double velocity_fluctuation(const Eigen::Ref<const Eigen::ArrayXd>& vel_err,
                            std::span<const SegmentMark> marks, double dt, StdKind kind) {
    const auto total = static_cast<double>(vel_err.size());
    if (total == 0.0) return 0.0;
    (void)dt;  // durations are count*dt over total*dt; dt cancels

    double sum = 0.0;
    for (const auto& m : marks) {
        if (m.end > static_cast<std::size_t>(vel_err.size()) || m.begin > m.end) {
            throw std::invalid_argument("segment mark outside the error series");
        }
        const auto count = static_cast<Eigen::Index>(m.size());
        if (count < 2) continue;
        const auto seg = vel_err.segment(static_cast<Eigen::Index>(m.begin), count);
        const double mean = seg.mean();
        const double ss = (seg - mean).square().sum();
        const double denom = kind == StdKind::kPopulation ? count : count - 1;
        sum += std::sqrt(ss / denom) * static_cast<double>(count) / total;
    }
    return sum;
}

PerformanceIndex evaluate(const Trace& trace, StdKind kind) {
    PerformanceIndex idx;
    idx.diverged = trace.diverged;
    if (trace.size() > 0) {
        const auto e = errors(trace);
        idx.max_pos_err = e.pos.maxCoeff();
        idx.max_vel_err = e.vel.maxCoeff();
        idx.vel_fluct = velocity_fluctuation(e.vel, trace.segment_marks, trace.dt, kind);
    }
    if (trace.diverged) {
        idx.W = kDivergencePenalty + (1.0 - trace.completed_fraction()) * kDivergencePenalty;
    } else {
        idx.W = composite(idx.max_pos_err, idx.max_vel_err, idx.vel_fluct);
    }
    return idx;
}

void write_index_csv(std::ostream& os, const PerformanceIndex& idx) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g\n", idx.max_pos_err, idx.max_vel_err,
                  idx.vel_fluct, idx.W);
    os << "max_pos_err_mm,max_vel_err_mms,vel_fluct,W\n" << buf;
}

}  // namespace feedsim
