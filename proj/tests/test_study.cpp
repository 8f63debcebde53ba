#include "doctest.h"

#include "feedsim/repro.hpp"
#include "feedsim/study.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace feedsim;
namespace fs = std::filesystem;

namespace {

// Small optimizer budgets keep the harness tests quick.
StudyConfig quick() {
    StudyConfig cfg;
    cfg.fwa.generations = 2;
    cfg.fwa.n_fireworks = 3;
    cfg.fwa.total_sparks = 4;
    cfg.fwa.gauss_sparks = 1;
    cfg.ga.generations = 2;
    cfg.ga.population = 4;
    return cfg;
}

std::string csv(const SweepResult& r) {
    std::ostringstream os;
    write_sweep_csv(os, r);
    return os.str();
}

void check_rows(const SweepResult& r, const StudyConfig& cfg) {
    for (const auto& row : r.rows) {
        if (!row.index.diverged) {
            CHECK(row.index.W == composite(row.index.max_pos_err, row.index.max_vel_err,
                                           row.index.vel_fluct));
        }
        bool matched = false;
        for (const auto& m : cfg.motors) {
            if (m.label == row.motor) {
                CHECK(row.inertia_ratio == cfg.mechanics.load_inertia / m.rotor_inertia);
                matched = true;
            }
        }
        CHECK(matched);
    }
}

}  // namespace

TEST_CASE("catalog inertia ratios round to one decimal as catalogued") {
    const auto cat = default_catalog();
    REQUIRE(cat.size() == 6);
    const double expected[] = {0.5, 0.8, 1.8, 2.4, 3.5, 4.1};
    const double exact[] = {0.512, 0.827, 1.784, 2.358, 3.500, 4.133};
    AxisMechanics mech;
    for (std::size_t i = 0; i < cat.size(); ++i) {
        const double r = mech.with(cat[i]).inertia_ratio();
        CHECK(std::round(r * 10) / 10 == doctest::Approx(expected[i]));
        CHECK(r == doctest::Approx(exact[i]).epsilon(1e-3));
    }
    CHECK(cat[0].torque_limit == 71.1);
    CHECK(cat[5].torque_limit == 9.6);
}

TEST_CASE("fixed gain sets") {
    const auto sets = fixed_gain_sets();
    REQUIRE(sets.size() == 3);
    CHECK(sets[0] == Gains{10, 20, 50, 1});
    CHECK(sets[1] == Gains{50, 20, 5, 0.5});
    CHECK(sets[2] == Gains{200, 20, 5, 1});
}

TEST_CASE("fixed-gain sweep covers the grid and is reproducible") {
    const StudyConfig cfg;
    const auto r = fixed_gain_sweep(cfg);
    CHECK(r.rows.size() == 18);
    check_rows(r, cfg);
    std::set<std::string> sources;
    for (const auto& row : r.rows) sources.insert(row.gain_source);
    CHECK(sources == std::set<std::string>{"set1", "set2", "set3"});
    CHECK(r.report.contains("argmin_ratio_by_gain_set"));
    CHECK(r.report["expected_outcome"].contains("observed"));
    CHECK(csv(r) == csv(fixed_gain_sweep(cfg)));
    CHECK(csv(r).rfind("scenario,motor,inertia_ratio,gain_source,Kp,Kvp,Kvi,Kfv,max_pos_err_mm,"
                       "max_vel_err_mms,vel_fluct,W,seed,diverged\n",
                       0) == 0);
}

TEST_CASE("decoupled sweep rows, seeds and report") {
    auto cfg = quick();
    cfg.master_seed = 10;
    const auto r = decoupled_sweep(cfg);
    CHECK(r.rows.size() == 18);
    check_rows(r, cfg);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        CHECK(r.rows[i].seed == 10 + i % 3);
        CHECK(r.rows[i].gain_source == "fwa-r" + std::to_string(i % 3));
        CHECK(cfg.bounds.contains(r.rows[i].gains));
    }
    CHECK(r.report.contains("repeat_spread"));
    CHECK(r.report["expected_outcome"].contains("margin"));
    CHECK(csv(r) == csv(decoupled_sweep(cfg)));
    cfg.repeats = 1;
    CHECK(decoupled_sweep(cfg).rows.size() == 6);
}

TEST_CASE("parallel cells give the same sweep") {
    auto cfg = quick();
    const auto serial = csv(decoupled_sweep(cfg));
    cfg.jobs = 3;
    CHECK(csv(decoupled_sweep(cfg)) == serial);
}

TEST_CASE("motion sweeps over the hardware-comparison motors") {
    auto cfg = hardware_comparison_config();
    const auto q = quick();
    cfg.fwa = q.fwa;
    CHECK(cfg.motors.size() == 3);
    CHECK(cfg.mechanics.load_inertia == doctest::Approx(48e-4));
    const auto acc = motion_sweep(cfg, MotionGrid{MotionAxis::kAcceleration, {0.5, 1, 2, 5}});
    CHECK(acc.rows.size() == 12);
    check_rows(acc, cfg);
    CHECK(acc.rows[0].scenario == "motion/a=0.5");
    const auto spd = motion_sweep(cfg, MotionGrid{MotionAxis::kSpeed, {50, 100, 200, 400}});
    CHECK(spd.rows.size() == 12);
    CHECK(spd.report["expected_outcome"].contains("per_motor"));
}

TEST_CASE("slow feed gives a trapezoid with t1 = 0.05 s") {
    const auto p = plan(ProfileSpec::from_mm(200, 50, 1));
    CHECK_FALSE(p.triangular());
    CHECK(p.t1 == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("stability study runs both algorithms") {
    auto cfg = quick();
    const auto r = stability_study(cfg, 2, 3);
    CHECK(r.rows.size() == 6);
    std::size_t fwa = 0, ga = 0;
    for (const auto& row : r.rows) {
        if (row.gain_source.rfind("fwa-r", 0) == 0) ++fwa;
        if (row.gain_source.rfind("ga-r", 0) == 0) ++ga;
    }
    CHECK(fwa == 3);
    CHECK(ga == 3);
    CHECK(r.report["fwa"].contains("relative_spread"));
    CHECK(r.report["ga"].contains("relative_spread"));
    CHECK_THROWS(stability_study(cfg, 17, 3));
}

TEST_CASE("bundle files are written into the output directory") {
    const auto dir = fs::temp_directory_path() / "feedsim_bundle_test";
    fs::remove_all(dir);
    const auto r = fixed_gain_sweep(StudyConfig{});
    write_bundle(dir, r);
    CHECK(fs::exists(dir / "sweep.csv"));
    CHECK(fs::exists(dir / "summary.json"));
    std::size_t dat = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.rfind("W_vs_ratio_", 0) == 0) {
            ++dat;
            std::ifstream in(e.path());
            std::size_t lines = 0;
            for (std::string l; std::getline(in, l);) ++lines;
            CHECK(lines >= 6);
        }
    }
    CHECK(dat == 3);
    const auto summary = nlohmann::json::parse(std::ifstream(dir / "summary.json"));
    CHECK(summary["best_per_motor"].size() == 6);
    fs::remove_all(dir);
}

TEST_CASE("invalid study configurations are rejected") {
    StudyConfig cfg;
    cfg.repeats = 0;
    CHECK_THROWS(decoupled_sweep(cfg));
    cfg = StudyConfig{};
    cfg.motors.clear();
    CHECK_THROWS(fixed_gain_sweep(cfg));
}
