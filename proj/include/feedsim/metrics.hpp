#pragma once

#include "feedsim/motion_profile.hpp"
#include "feedsim/simulation.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <span>

namespace feedsim {

// Composite index weights: position error, velocity error, velocity fluctuation.
inline constexpr double kWeightPosition = 0.5;
inline constexpr double kWeightVelocity = 0.25;
inline constexpr double kWeightFluctuation = 0.25;

/// W assigned to a diverged run is kDivergencePenalty * (2 - completed fraction).
inline constexpr double kDivergencePenalty = 1e6;

enum class StdKind { kPopulation, kSample };

struct PerformanceIndex {
    double max_pos_err = 0.0;  // [mm]
    double max_vel_err = 0.0;  // [mm/s]
    double vel_fluct = 0.0;    // [mm/s]
    double W = 0.0;
    bool diverged = false;
};

/// 0.5*pos + 0.25*vel + 0.25*fluct. Heterogeneous units by construction.
double composite(double max_pos_err, double max_vel_err, double vel_fluct);

struct ErrorSeries {
    Eigen::ArrayXd pos;  // |pos_cmd - pos_act| [mm]
    Eigen::ArrayXd vel;  // |vel_cmd - vel_act| [mm/s]
};

ErrorSeries errors(const Trace& trace);

/// Duration-weighted sum of per-segment standard deviations of vel_err.
/// A segment's duration is its sample count times dt; T is the total.
double velocity_fluctuation(const Eigen::Ref<const Eigen::ArrayXd>& vel_err,
                            std::span<const SegmentMark> marks, double dt,
                            StdKind kind = StdKind::kPopulation);

PerformanceIndex evaluate(const Trace& trace, StdKind kind = StdKind::kPopulation);

/// One CSV row with header max_pos_err_mm,max_vel_err_mms,vel_fluct,W.
void write_index_csv(std::ostream& os, const PerformanceIndex& index);

}  // namespace feedsim
