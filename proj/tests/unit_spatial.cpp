#include <doctest.h>

#include <cmath>
#include <random>

#include "iar/error.hpp"
#include "iar/spatial.hpp"

using namespace iar;
using namespace iar::spatial;

namespace {

// Boundaries re-derived by hand from the 52 degree diagonal at 16:9:
// H = 52 cos(atan(9/16)), V = 52 sin(atan(9/16)).
constexpr double kExpectedH = 45.32192793047656;
constexpr double kExpectedV = 25.493584460893068;

}  // namespace

TEST_CASE("field of view split matches the diagonal decomposition") {
  const SpatialConfig config;
  CHECK(horizontal_fov_deg(config) == doctest::Approx(kExpectedH).epsilon(1e-12));
  CHECK(vertical_fov_deg(config) == doctest::Approx(kExpectedV).epsilon(1e-12));
}

TEST_CASE("head sector binning: thirds of the field of view with clamping") {
  const SpatialConfig config;
  CHECK(bin_head_sector(0.0, 0.0, config) == HeadSector::Center);
  // Hand-checked against boundaries +-7.5537 (yaw) and +-4.2489 (pitch).
  CHECK(bin_head_sector(-20.0, 10.0, config) == HeadSector::TopLeft);
  // Outside the field of view clamps to the nearest edge third.
  CHECK(bin_head_sector(60.0, 0.0, config) == HeadSector::RightCenter);
  CHECK(bin_head_sector(-179.0, -89.0, config) == HeadSector::BottomLeft);

  // Boundary values stay in the center third (strict comparisons).
  const double yaw_boundary = kExpectedH / 6.0;
  const double pitch_boundary = kExpectedV / 6.0;
  CHECK(bin_head_sector(yaw_boundary, 0.0, config) == HeadSector::Center);
  CHECK(bin_head_sector(0.0, pitch_boundary, config) == HeadSector::Center);
  CHECK(bin_head_sector(std::nextafter(yaw_boundary, 90.0), 0.0, config) ==
        HeadSector::RightCenter);
  CHECK(bin_head_sector(0.0, std::nextafter(pitch_boundary, 90.0), config) ==
        HeadSector::TopCenter);
}

TEST_CASE("body sector binning: far flanks beyond 45 degrees, 3x3 inside") {
  const SpatialConfig config;
  CHECK(bin_body_sector(0.0, 0.0, config) == BodySector::Center);
  CHECK(bin_body_sector(50.0, 0.0, config) == BodySector::FarRight);
  CHECK(bin_body_sector(-50.0, 0.0, config) == BodySector::FarLeft);
  // Hand-checked against the +-15 degree thirds and the +-10 degree eye band.
  CHECK(bin_body_sector(-20.0, 15.0, config) == BodySector::TopLeft);
  CHECK(bin_body_sector(20.0, -15.0, config) == BodySector::BottomRight);
  // Exactly 45 is still a regular turn; the far sectors start strictly beyond.
  CHECK(bin_body_sector(45.0, 0.0, config) == BodySector::RightCenter);
  CHECK(bin_body_sector(std::nextafter(45.0, 90.0), 0.0, config) == BodySector::FarRight);
}

TEST_CASE("sector binning is total over random directions") {
  const SpatialConfig config;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> yaw(-180.0, 180.0);
  std::uniform_real_distribution<double> pitch(-90.0, 90.0);
  for (int i = 0; i < 2000; ++i) {
    const double y = yaw(rng);
    const double p = pitch(rng);
    CHECK(head_sector_from_string(to_string(bin_head_sector(y, p, config))).has_value());
    CHECK(body_sector_from_string(to_string(bin_body_sector(y, p, config))).has_value());
  }
}

TEST_CASE("body forward updates only on turns past the dot threshold") {
  const SpatialConfig config;
  const BodyPose pose;  // forward (0,0,1)

  SUBCASE("straight walk keeps the forward direction") {
    const auto out = update_body_forward(pose, {0.0, 0.0, 1.0}, {0.0, 0.0, 0.5}, config);
    CHECK(out.moved);
    CHECK(out.pose.forward == Vec3{0.0, 0.0, 1.0});
    CHECK(out.prev_move == Vec3{0.0, 0.0, 1.0});
  }

  SUBCASE("a hard turn rebinds forward to the new direction") {
    const auto out = update_body_forward(pose, {0.0, 0.0, 1.0}, {0.5, 0.0, 0.0}, config);
    CHECK(out.pose.forward == Vec3{1.0, 0.0, 0.0});
    CHECK(out.prev_move == Vec3{1.0, 0.0, 0.0});
  }

  SUBCASE("purely vertical motion is a no-op") {
    const auto out = update_body_forward(pose, {0.0, 0.0, 1.0}, {0.0, 1.0, 0.0}, config);
    CHECK_FALSE(out.moved);
    CHECK(out.pose.forward == Vec3{0.0, 0.0, 1.0});
    CHECK(out.prev_move == Vec3{0.0, 0.0, 1.0});
  }

  SUBCASE("sub-centimeter jitter is a no-op") {
    const auto out = update_body_forward(pose, {0.0, 0.0, 1.0}, {0.0, 0.0, 0.005}, config);
    CHECK_FALSE(out.moved);
  }
}

TEST_CASE("the dot threshold is strict at exactly 0.85") {
  const SpatialConfig config;
  // (sqrt(1 - 0.85^2), 0, 0.85) is unit length in double arithmetic, so the
  // normalization inside update_body_forward leaves the dot at exactly 0.85.
  const double x = std::sqrt(1.0 - 0.85 * 0.85);
  const Vec3 at_threshold{x, 0.0, 0.85};
  REQUIRE(norm(at_threshold) == 1.0);

  CHECK_FALSE(turn_detected({0.0, 0.0, 1.0}, at_threshold, config));
  const auto out = update_body_forward(BodyPose{}, {0.0, 0.0, 1.0}, at_threshold, config);
  CHECK(out.pose.forward == Vec3{0.0, 0.0, 1.0});  // not updated
  CHECK(out.prev_move == at_threshold);            // but motion was recorded

  const Vec3 below{x, 0.0, std::nextafter(0.85, 0.0)};
  CHECK(turn_detected({0.0, 0.0, 1.0}, below, config));
}

TEST_CASE("recenter projects the head gaze onto the floor plane") {
  const Vec3 at30 = recenter(30.0, 0.0);
  CHECK(at30.x == doctest::Approx(std::sin(30.0 * M_PI / 180.0)));
  CHECK(at30.y == 0.0);
  CHECK(at30.z == doctest::Approx(std::cos(30.0 * M_PI / 180.0)));

  CHECK(recenter(0.0, 0.0) == Vec3{0.0, 0.0, 1.0});

  // Looking with pitch still recenters onto the same compass heading.
  const Vec3 pitched = recenter(30.0, -40.0);
  CHECK(pitched.x == doctest::Approx(at30.x));
  CHECK(pitched.z == doctest::Approx(at30.z));

  CHECK_THROWS_AS(recenter(0.0, -90.0), Error);
}

TEST_CASE("forward stays unit-length and floor-planar over random walks") {
  const SpatialConfig config;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> step(-0.6, 0.6);
  BodyPose pose;
  Vec3 prev_move{0.0, 0.0, 1.0};
  for (int i = 0; i < 500; ++i) {
    const Vec3 move{step(rng), step(rng), step(rng)};
    const auto out = update_body_forward(pose, prev_move, move, config);
    pose = out.pose;
    prev_move = out.prev_move;
    CHECK(pose.forward.y == 0.0);
    CHECK(std::abs(norm(pose.forward) - 1.0) < 1e-9);
    CHECK(std::abs(norm(prev_move) - 1.0) < 1e-9);
  }
}

TEST_CASE("a 90 degree turn is recovered within three steps") {
  const SpatialConfig config;
  BodyPose pose;
  Vec3 prev_move{0.0, 0.0, 1.0};
  for (int i = 0; i < 5; ++i) {
    const auto out = update_body_forward(pose, prev_move, {0.0, 0.0, 0.5}, config);
    pose = out.pose;
    prev_move = out.prev_move;
  }
  int steps = 0;
  double error_deg = 180.0;
  for (int i = 0; i < 3; ++i) {
    const auto out = update_body_forward(pose, prev_move, {0.5, 0.0, 0.0}, config);
    pose = out.pose;
    prev_move = out.prev_move;
    ++steps;
    error_deg = std::acos(std::clamp(dot(pose.forward, {1.0, 0.0, 0.0}), -1.0, 1.0)) *
                180.0 / M_PI;
    if (error_deg <= 10.0) break;
  }
  CHECK(steps <= 3);
  CHECK(error_deg <= 10.0);
}

TEST_CASE("spatial config validation") {
  SpatialConfig config;
  config.orientation_dot_threshold = 1.5;
  CHECK_THROWS_AS(validate(config), Error);
}
