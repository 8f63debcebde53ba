#pragma once

// Randomized invariant checks shared by the unit suites and the acceptance
// binary. Each returns how many generated cases violated the invariant.

#include "feedsim/controller.hpp"
#include "feedsim/metrics.hpp"
#include "feedsim/motion_profile.hpp"
#include "feedsim/optimizer.hpp"
#include "feedsim/plant.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace feedsim::props {

struct Outcome {
    int cases = 0;
    int failures = 0;
    std::string first_failure;

    void fail(const std::string& why) {
        if (failures++ == 0) first_failure = why;
    }
    bool ok() const { return failures == 0; }
};

inline double draw(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline ProfileSpec random_spec(std::mt19937_64& g) {
    return ProfileSpec{draw(g, 1e-4, 0.5), draw(g, 0.01, 0.5), draw(g, 0.1, 10.0)};
}

/// s_a + s_u + s_d == distance within 1e-12 m; 0 <= t1 <= t2 <= t3.
inline Outcome profile_closure(int cases, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    Outcome out;
    for (int c = 0; c < cases; ++c, ++out.cases) {
        const auto spec = random_spec(g);
        const auto p = plan(spec);
        const double sum = p.accel_distance() + p.cruise_distance() + p.decel_distance();
        if (std::abs(sum - spec.distance) > 1e-12 || !(0.0 <= p.t1 && p.t1 <= p.t2 && p.t2 <= p.t3)) {
            std::ostringstream os;
            os << "spec (" << spec.distance << ", " << spec.v_max << ", " << spec.a_max
               << ") closes to " << sum;
            out.fail(os.str());
        }
    }
    return out;
}

/// With zero input and positive damping, stored energy never grows from one
/// RK4 step to the next by more than 1e-9 of the initial energy.
inline Outcome energy_nonincreasing(int cases, std::uint64_t seed, int steps = 200) {
    std::mt19937_64 g(seed);
    Outcome out;
    for (int c = 0; c < cases; ++c, ++out.cases) {
        PlantParams p{draw(g, 50.0, 2000.0), draw(g, 5e-4, 1e-2), draw(g, 1e-3, 1e-2),
                      draw(g, 1e-3, 0.1), kScrewTransmission, 10.0};
        const auto placement = (c % 2 == 0) ? DampingPlacement::kCoupling : DampingPlacement::kLoad;
        PlantState x;
        x << draw(g, -1e-2, 1e-2), draw(g, -10.0, 10.0), draw(g, -1e-2, 1e-2), draw(g, -10.0, 10.0);
        const double e0 = stored_energy(p, x);
        const double h = 0.1 / natural_frequency(p);
        double prev = e0;
        for (int k = 0; k < steps; ++k) {
            x = step(p, x, 0.0, 0.0, h, placement);
            const double e = stored_energy(p, x);
            if (e > prev + 1e-9 * e0) {
                out.fail("energy rose at step " + std::to_string(k));
                break;
            }
            prev = e;
        }
    }
    return out;
}

/// |torque| <= torque limit for arbitrary gains, signals and integrator state.
inline Outcome controller_clamp(int cases, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    Outcome out;
    for (int c = 0; c < cases; ++c, ++out.cases) {
        const Gains gains{draw(g, 0, 500), draw(g, 0, 50), draw(g, 0, 100), draw(g, 0, 1.5)};
        const double limit = draw(g, 0.1, 100.0);
        ControllerState st{draw(g, -10, 10), 0.0};
        for (int k = 0; k < 20; ++k) {
            const ControlInputs in{draw(g, -1, 1), draw(g, -1, 1), draw(g, -1, 1), draw(g, -1, 1)};
            const auto o = control_step(gains, in, st, limit, 1e-3,
                                        k % 2 ? ErrorUnits::kMetres : ErrorUnits::kMillimetres);
            if (std::abs(o.torque) > limit) {
                out.fail("torque " + std::to_string(o.torque) + " exceeds " + std::to_string(limit));
                break;
            }
            st = o.state;
        }
    }
    return out;
}

/// Increasing any one component strictly increases W; scaling all by c scales W by c.
inline Outcome w_monotone(int cases, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    Outcome out;
    for (int c = 0; c < cases; ++c, ++out.cases) {
        const double a = draw(g, 0, 50), b = draw(g, 0, 200), f = draw(g, 0, 20);
        const double w = composite(a, b, f);
        const double d = draw(g, 1e-6, 10);
        const double s = draw(g, 0.01, 100);
        const bool mono = composite(a + d, b, f) > w && composite(a, b + d, f) > w &&
                          composite(a, b, f + d) > w;
        const bool scale = std::abs(composite(s * a, s * b, s * f) - s * w) <= 1e-12 * (1 + s * w);
        if (!mono || !scale) out.fail("W not monotone/homogeneous at case " + std::to_string(c));
    }
    return out;
}

struct OptimizerInvariants {
    Outcome containment;  // every evaluated candidate inside the box
    Outcome elitism;      // history never increases
    Outcome budget;       // evaluation count within bound
};

/// Short optimizer runs on random boxes and rugged objectives, FWA and GA alternating.
inline OptimizerInvariants optimizer_invariants(int cases, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    OptimizerInvariants out;
    for (int c = 0; c < cases; ++c) {
        const auto dim = static_cast<Eigen::Index>(1 + g() % 6);
        Box box{Eigen::VectorXd(dim), Eigen::VectorXd(dim)};
        for (Eigen::Index k = 0; k < dim; ++k) {
            box.lo(k) = draw(g, -100, 100);
            box.hi(k) = box.lo(k) + (g() % 10 == 0 ? 0.0 : draw(g, 1e-3, 300));
        }
        Eigen::VectorXd centre(dim);
        for (Eigen::Index k = 0; k < dim; ++k) centre(k) = draw(g, -50, 50);
        bool inside = true;
        const Objective f = [&](const Eigen::VectorXd& x) {
            if (!box.contains(x)) inside = false;
            const Eigen::ArrayXd d = (x - centre).array();
            return (d.square() - 10.0 * (0.5 * d).cos()).sum();
        };

        OptResult r;
        std::size_t bound = 0;
        if (c % 2 == 0) {
            FwaConfig cfg;
            cfg.generations = 1 + static_cast<int>(g() % 8);
            cfg.n_fireworks = 2 + static_cast<int>(g() % 6);
            cfg.total_sparks = cfg.n_fireworks + static_cast<int>(g() % 20);
            cfg.gauss_sparks = static_cast<int>(g() % 6);
            cfg.selection = g() % 3 == 0 ? FwaSelection::kDistance : FwaSelection::kEliteRandom;
            cfg.seed = g();
            r = fwa_minimize(f, box, cfg);
            bound = static_cast<std::size_t>(cfg.generations) *
                        (cfg.n_fireworks + cfg.total_sparks + cfg.gauss_sparks) +
                    cfg.n_fireworks;
        } else {
            GaConfig cfg;
            cfg.generations = 1 + static_cast<int>(g() % 8);
            cfg.population = 2 * (1 + static_cast<int>(g() % 8));
            cfg.gene_length_bits = 1 + static_cast<int>(g() % 12);
            cfg.seed = g();
            r = ga_minimize(f, box, cfg);
            bound = static_cast<std::size_t>(cfg.generations + 1) * cfg.population;
        }

        ++out.containment.cases;
        ++out.elitism.cases;
        ++out.budget.cases;
        if (!inside || !box.contains(r.best)) out.containment.fail("candidate left the box, case " + std::to_string(c));
        for (std::size_t k = 1; k < r.history.size(); ++k) {
            if (r.history[k] > r.history[k - 1]) {
                out.elitism.fail("history rose at generation " + std::to_string(k));
                break;
            }
        }
        if (r.evaluations > bound) out.budget.fail("evaluations " + std::to_string(r.evaluations));
    }
    return out;
}

}  // namespace feedsim::props
