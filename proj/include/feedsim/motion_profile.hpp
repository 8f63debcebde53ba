#pragma once

#include <cstddef>
#include <vector>

namespace feedsim {

/// Requested move: stroke length [m], speed limit [m/s], acceleration limit [m/s^2].
struct ProfileSpec {
    double distance = 0.0;
    double v_max = 0.0;
    double a_max = 0.0;

    /// Builds a spec from the units used on machine data sheets (mm, mm/s, m/s^2).
    static ProfileSpec from_mm(double distance_mm, double speed_mm_s, double accel_m_s2);
};

/// Planned single stroke. Triangular plans have t1 == t2.
struct TrapezoidPlan {
    double t1 = 0.0;
    double t2 = 0.0;
    double t3 = 0.0;
    double v_peak = 0.0;
    double a = 0.0;
    double distance = 0.0;

    bool triangular() const { return t1 == t2; }
    double accel_distance() const { return 0.5 * a * t1 * t1; }
    double cruise_distance() const { return v_peak * (t2 - t1); }
    double decel_distance() const { return 0.5 * a * (t3 - t2) * (t3 - t2); }
};

struct ProfileSample {
    double pos = 0.0;
    double vel = 0.0;
    double acc = 0.0;
};

enum class Phase { kAccel, kCruise, kDecel, kHold };

/// Samples [begin, end) belonging to one motion phase.
struct SegmentMark {
    int index = 0;
    Phase phase = Phase::kAccel;
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
};

struct CommandStream {
    double dt = 0.0;
    TrapezoidPlan plan;
    std::vector<double> pos_cmd;
    std::vector<double> vel_cmd;
    std::vector<double> acc_cmd;
    std::vector<SegmentMark> segment_marks;

    std::size_t size() const { return pos_cmd.size(); }
};

TrapezoidPlan plan(const ProfileSpec& spec);

/// Analytic position/velocity/acceleration of a single forward stroke at time t.
/// Past t3 the stroke holds its terminal position at rest.
ProfileSample sample(const TrapezoidPlan& plan, double t);

/// Forward stroke 0 -> distance immediately followed by the return stroke,
/// sampled every dt. Sample count is round(2*t3/dt) + 1.
CommandStream reciprocate(const TrapezoidPlan& plan, double dt);

}  // namespace feedsim
