#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "robopainter/error.hpp"
#include "robopainter/params.hpp"
#include "test_support.hpp"

using namespace robopainter;

namespace {
std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_SUITE("params") {

TEST_CASE("parameter file loads and validates cleanly") {
  const RobotParams& p = testsupport::params();
  const ValidationReport rep = validate_params(p);
  for (const auto& issue : rep.issues) INFO(issue.what);
  CHECK(rep.ok());
  CHECK(p.geometry.kk_table.size() == 7);  // six driven rows + fixed nozzle row
}

TEST_CASE("total platform mass is the frozen 20.668 kg and within the 21.5 kg budget") {
  const double m = total_mass(testsupport::params());
  CHECK(std::abs(m - 20.668) < 1e-9);
  CHECK(m <= 21.5);
}

TEST_CASE("named geometry symbols carry the frozen lengths") {
  const auto t = symbol_table(testsupport::params());
  const struct {
    const char* name;
    double value;
  } expected[] = {
      {"RL1", 1.094}, {"D1", 0.0784},  {"RL2", 0.0644}, {"D3", 0.700},
      {"RL4", 0.2024}, {"D4", 0.590},  {"RL5", 0.083},  {"RL7", 0.3075},
      {"a", 0.350},   {"b", 0.250},    {"r_c", 0.050},  {"r_f", 0.254},
      {"p", 0.204},   {"d", 0.022},
  };
  for (const auto& e : expected) {
    REQUIRE(t.count(e.name) == 1);
    CHECK(std::abs(t.at(e.name) - e.value) < 1e-12);
  }
  // per-joint motor constants are exposed too
  REQUIRE(t.count("Kt2") == 1);
  CHECK(std::abs(t.at("Kt2") - 12.283) < 1e-12);
  REQUIRE(t.count("Ia2") == 1);
  CHECK(std::abs(t.at("Ia2") - 6.402) < 1e-12);
}

TEST_CASE("spray and friction scalars match the design sheet") {
  const RobotParams& p = testsupport::params();
  CHECK(std::abs(p.spray.pattern_width - 0.26) < 1e-12);
  CHECK(std::abs(p.spray.pattern_height - 0.05) < 1e-12);
  CHECK(std::abs(p.spray.standoff - 0.175) < 1e-12);
  CHECK(std::abs(p.spray.standoff_min - 0.10) < 1e-12);
  CHECK(std::abs(p.spray.standoff_max - 0.25) < 1e-12);
  CHECK(std::abs(p.spray.vibration_band_lo - 2.5) < 1e-12);
  CHECK(std::abs(p.spray.vibration_band_hi - 10.0) < 1e-12);
  CHECK(std::abs(p.spray.reaction_force - 1.0) < 1e-12);
  CHECK(std::abs(p.friction.viscous - 0.1) < 1e-12);
  CHECK(std::abs(p.friction.coulomb - 0.05) < 1e-12);
}

TEST_CASE("serialization round-trips bit-exactly and matches the file on disk") {
  const std::string disk = read_file(testsupport::params_path());
  const RobotParams p = parse_robot_params(disk);
  const std::string once = serialize_robot_params(p);
  CHECK(once == disk);
  const RobotParams p2 = parse_robot_params(once);
  CHECK(serialize_robot_params(p2) == once);
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS_AS(parse_robot_params("{"), ParamsError);
  CHECK_THROWS_AS(parse_robot_params("{}"), ParamsError);
  CHECK_THROWS_AS(parse_robot_params("[1,2,3]"), ParamsError);
  CHECK_THROWS_AS(load_robot_params("/nonexistent/robot.json"), ParamsError);
}

TEST_CASE("validation flags physically inconsistent parameter sets") {
  RobotParams p = testsupport::params();

  SUBCASE("negative link mass") {
    p.arm_links[2].mass = -1.0;
    CHECK_FALSE(validate_params(p).ok());
  }
  SUBCASE("zero castor trail is a steering singularity") {
    p.geometry.castor_trail = 0.0;
    CHECK_FALSE(validate_params(p).ok());
  }
  SUBCASE("planar reach must stay 1.290 m") {
    p.geometry.d3 = 0.8;
    CHECK_FALSE(validate_params(p).ok());
  }
  SUBCASE("standoff outside the validated window") {
    p.spray.standoff = 0.05;
    CHECK_FALSE(validate_params(p).ok());
  }
  SUBCASE("mass budget is enforced") {
    p.base_body.mass += 5.0;
    CHECK_FALSE(validate_params(p).ok());
  }
  SUBCASE("vibration band must be increasing") {
    p.spray.vibration_band_lo = 11.0;
    CHECK_FALSE(validate_params(p).ok());
  }
}

}  // TEST_SUITE
