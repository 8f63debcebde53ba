#include "doctest.h"

#include "feedsim/config.hpp"
#include "feedsim/repro.hpp"

#include <filesystem>
#include <string>

using namespace feedsim;
using nlohmann::json;

namespace {

std::filesystem::path data(const char* name) { return std::filesystem::path(FEEDSIM_DATA_DIR) / name; }

// Problems from parsing plus diagnosis, flattened to one string.
std::string problems(const json& j) {
    try {
        std::string all;
        for (const auto& p : diagnose(parse_scenario(j))) all += p + "\n";
        return all;
    } catch (const ConfigError& e) {
        return e.what();
    }
}

}  // namespace

TEST_CASE("shipped defaults equal the built-in defaults") {
    const auto file = load_scenario(data("defaults.json"));
    CHECK(to_json(file)["plant"] == to_json(ScenarioFile{})["plant"]);
    CHECK(to_json(file)["motors"] == to_json(ScenarioFile{})["motors"]);
    CHECK(to_json(file)["bounds"] == to_json(ScenarioFile{})["bounds"]);
    CHECK(to_json(file)["fwa"] == to_json(ScenarioFile{})["fwa"]);
    CHECK(to_json(file)["ga"] == to_json(ScenarioFile{})["ga"]);
    CHECK(to_json(file)["gain_sets"] == to_json(ScenarioFile{})["gain_sets"]);
    CHECK(diagnose(file).empty());
}

TEST_CASE("every shipped config is valid") {
    for (const auto& e : std::filesystem::directory_iterator(FEEDSIM_DATA_DIR)) {
        if (e.path().extension() != ".json") continue;
        CAPTURE(e.path().string());
        ScenarioFile f;
        REQUIRE_NOTHROW(f = load_scenario(e.path()));
        CHECK(diagnose(f).empty());
    }
}

TEST_CASE("round trip through the file schema") {
    const auto f = load_scenario(data("table6-2-sim.json"));
    const auto again = parse_scenario(to_json(f));
    CHECK(to_json(again) == to_json(f));
}

TEST_CASE("hardware comparison files match the built-in setup") {
    const auto hw = hardware_comparison_config();
    for (const char* name : {"table6-2-sim.json", "table6-3-sim.json"}) {
        const auto f = load_scenario(data(name));
        REQUIRE(f.study.motors.size() == hw.motors.size());
        for (std::size_t i = 0; i < hw.motors.size(); ++i) {
            CHECK(f.study.motors[i].label == hw.motors[i].label);
            CHECK(f.study.motors[i].rotor_inertia == doctest::Approx(hw.motors[i].rotor_inertia));
        }
        CHECK(f.study.mechanics.load_inertia == doctest::Approx(hw.mechanics.load_inertia));
        REQUIRE(f.motion_grid);
        CHECK(f.motion_grid->values.size() == 4);
    }
    CHECK(load_scenario(data("table6-2-sim.json")).motion_grid->axis == MotionAxis::kAcceleration);
    CHECK(load_scenario(data("table6-3-sim.json")).motion_grid->axis == MotionAxis::kSpeed);
}

TEST_CASE("feedforward bound defaults to [0.5, 1]") {
    const auto j = to_json(ScenarioFile{});
    CHECK(j["bounds"]["Kfv"] == json::array({0.5, 1.0}));
    CHECK(j["ga"]["generations"] == 50);
    CHECK(j["ga"]["population"] == 20);
    CHECK(j["ga"]["gene_length_bits"] == 10);
}

TEST_CASE("unit conversions from the file schema") {
    const auto f = parse_scenario(json::parse(R"({
        "plant": {"load_inertia_kgcm2": 48, "lead_mm": 5},
        "motion": {"distance_mm": 100, "speed_mm_s": 50, "acceleration_m_s2": 1}})"));
    CHECK(f.study.mechanics.load_inertia == doctest::Approx(48e-4));
    CHECK(f.study.mechanics.transmission == doctest::Approx(0.005 / (2 * 3.141592653589793)));
    CHECK(f.study.motion.distance == doctest::Approx(0.1));
    CHECK(f.study.motion.v_max == doctest::Approx(0.05));
    CHECK(f.has_motion);
}

TEST_CASE("configuration errors name the field") {
    CHECK(problems(json::parse(R"({"bogus": 1})")).find("bogus") != std::string::npos);
    CHECK(problems(json::parse(R"({"plant": {"stiffnes": 1}})")).find("stiffnes") != std::string::npos);
    CHECK(problems(json::parse(R"({"gains": {"Kp": 1, "Kvp": 1, "Kvi": 1}})")).find("Kfv") !=
          std::string::npos);
    CHECK(problems(json::parse(R"({"motors": [{"label": "m", "max_torque": 5}]})"))
              .find("rotor_inertia_kgcm2") != std::string::npos);
    CHECK(problems(json::parse(R"({"motors": [{"label": "m", "max_torque": 5, "rotor_inertia_kgcm2": -1}]})"))
              .find("motors") != std::string::npos);
    CHECK(problems(json::parse(R"({"bounds": {"Kp": [10, 1]}})")).find("bounds") != std::string::npos);
    CHECK(problems(json::parse(R"({"algo": "pso"})")).find("algo") != std::string::npos);
    CHECK(problems(json::parse(R"({"motor": "nope"})")).find("nope") != std::string::npos);
    CHECK(problems(json::parse(R"({"seed": -3})")).find("seed") != std::string::npos);
    CHECK(problems(json::parse(R"({"scenario": "weird"})")).find("scenario") != std::string::npos);
    CHECK(problems(json::parse(R"({"fwa": {"fireworks": 1}})")).find("fwa") != std::string::npos);
    CHECK(problems(json::parse(R"({"ga": {"population": 5}})")).find("ga") != std::string::npos);
    CHECK(problems(json::parse("{}")).empty());
}

TEST_CASE("loading reports unreadable files") {
    CHECK_THROWS_AS(load_scenario(data("does_not_exist.json")), ConfigError);
}
