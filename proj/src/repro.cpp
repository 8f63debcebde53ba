#include "feedsim/repro.hpp"

#include <algorithm>
#include <stdexcept>

namespace feedsim {

const std::vector<std::string>& repro_ids() {
    static const std::vector<std::string> ids{"fig4-1", "fig5-3", "fig5-4", "table6-2-sim",
                                              "table6-3-sim"};
    return ids;
}

StudyConfig hardware_comparison_config() {
    StudyConfig cfg;
    cfg.mechanics.load_inertia = 48.0 * kKgCm2;
    const auto all = default_catalog();
    cfg.motors = {all[1], all[2], all[4]};
    cfg.repeats = 1;
    return cfg;
}

StudyConfig repro_config(const std::string& id, std::uint64_t seed) {
    StudyConfig cfg;
    if (id == "table6-2-sim" || id == "table6-3-sim") cfg = hardware_comparison_config();
    if (id == "table6-3-sim") cfg.motion.a_max = 1.0;
    if (std::find(repro_ids().begin(), repro_ids().end(), id) == repro_ids().end()) {
        throw std::invalid_argument("unknown scenario id '" + id + "'");
    }
    cfg.master_seed = seed;
    return cfg;
}

SweepResult run_repro(const std::string& id, std::uint64_t seed, int jobs) {
    StudyConfig cfg = repro_config(id, seed);
    cfg.jobs = jobs;
    if (id == "fig4-1") return fixed_gain_sweep(cfg, id);
    if (id == "fig5-3") return stability_study(cfg, 2, 6, id);
    if (id == "fig5-4") return decoupled_sweep(cfg, id);
    if (id == "table6-2-sim") {
        return motion_sweep(cfg, {MotionAxis::kAcceleration, {0.5, 1.0, 2.0, 5.0}}, id);
    }
    return motion_sweep(cfg, {MotionAxis::kSpeed, {50.0, 100.0, 200.0, 400.0}}, id);
}

}  // namespace feedsim
