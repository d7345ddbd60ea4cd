#include "iar/spatial.hpp"

#include <cmath>

#include "iar/error.hpp"

namespace iar::spatial {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg_to_rad(double deg) { return deg * kPi / 180.0; }

}  // namespace

void validate(const SpatialConfig& config) {
  const bool ok = config.fov_diagonal_deg > 0.0 && config.display_aspect_w > 0.0 &&
                  config.display_aspect_h > 0.0 && config.far_turn_threshold_deg > 0.0 &&
                  config.vertical_eye_band_deg > 0.0 && config.motion_epsilon_m > 0.0 &&
                  config.orientation_dot_threshold > 0.0 &&
                  config.orientation_dot_threshold < 1.0;
  if (!ok) {
    throw Error(ErrorKind::ConfigError, "spatial config out of range");
  }
}

double horizontal_fov_deg(const SpatialConfig& config) {
  const double theta = std::atan2(config.display_aspect_h, config.display_aspect_w);
  return config.fov_diagonal_deg * std::cos(theta);
}

double vertical_fov_deg(const SpatialConfig& config) {
  const double theta = std::atan2(config.display_aspect_h, config.display_aspect_w);
  return config.fov_diagonal_deg * std::sin(theta);
}

const char* to_string(HeadSector s) noexcept {
  switch (s) {
    case HeadSector::TopLeft: return "TopLeft";
    case HeadSector::TopCenter: return "TopCenter";
    case HeadSector::TopRight: return "TopRight";
    case HeadSector::LeftCenter: return "LeftCenter";
    case HeadSector::Center: return "Center";
    case HeadSector::RightCenter: return "RightCenter";
    case HeadSector::BottomLeft: return "BottomLeft";
    case HeadSector::BottomCenter: return "BottomCenter";
    case HeadSector::BottomRight: return "BottomRight";
  }
  return "?";
}

const char* to_string(BodySector s) noexcept {
  switch (s) {
    case BodySector::TopLeft: return "TopLeft";
    case BodySector::TopCenter: return "TopCenter";
    case BodySector::TopRight: return "TopRight";
    case BodySector::LeftCenter: return "LeftCenter";
    case BodySector::Center: return "Center";
    case BodySector::RightCenter: return "RightCenter";
    case BodySector::BottomLeft: return "BottomLeft";
    case BodySector::BottomCenter: return "BottomCenter";
    case BodySector::BottomRight: return "BottomRight";
    case BodySector::FarLeft: return "FarLeft";
    case BodySector::FarRight: return "FarRight";
  }
  return "?";
}

std::optional<HeadSector> head_sector_from_string(std::string_view s) noexcept {
  for (int i = 0; i <= static_cast<int>(HeadSector::BottomRight); ++i) {
    const auto sector = static_cast<HeadSector>(i);
    if (s == to_string(sector)) return sector;
  }
  return std::nullopt;
}

std::optional<BodySector> body_sector_from_string(std::string_view s) noexcept {
  for (int i = 0; i <= static_cast<int>(BodySector::FarRight); ++i) {
    const auto sector = static_cast<BodySector>(i);
    if (s == to_string(sector)) return sector;
  }
  return std::nullopt;
}

bool turn_detected(const Vec3& prev_move, const Vec3& curr_move_normalized,
                   const SpatialConfig& config) {
  return dot(prev_move, curr_move_normalized) < config.orientation_dot_threshold;
}

ForwardUpdate update_body_forward(const BodyPose& pose, const Vec3& prev_move,
                                  const Vec3& curr_move, const SpatialConfig& config) {
  ForwardUpdate out{pose, prev_move, false};
  const Vec3 planar = floor_projected(curr_move);
  const double magnitude = norm(planar);
  if (magnitude < config.motion_epsilon_m) {
    return out;  // jitter or purely vertical motion
  }
  const Vec3 direction = {planar.x / magnitude, 0.0, planar.z / magnitude};
  if (turn_detected(prev_move, direction, config)) {
    out.pose.forward = direction;
  }
  out.pose.position = {pose.position.x + curr_move.x, pose.position.y + curr_move.y,
                       pose.position.z + curr_move.z};
  out.prev_move = direction;
  out.moved = true;
  return out;
}

Vec3 recenter(double head_yaw_deg, double head_pitch_deg) {
  const double yaw = deg_to_rad(head_yaw_deg);
  const double pitch = deg_to_rad(head_pitch_deg);
  const Vec3 gaze = {std::cos(pitch) * std::sin(yaw), std::sin(pitch),
                     std::cos(pitch) * std::cos(yaw)};
  const Vec3 planar = floor_projected(gaze);
  const double magnitude = norm(planar);
  if (magnitude < 1e-9) {
    throw Error(ErrorKind::GazeVertical,
                "head gaze is vertical; floor projection degenerates");
  }
  return {planar.x / magnitude, 0.0, planar.z / magnitude};
}

namespace {

// Index into {low, middle, high} thirds of [-half, +half] with clamping.
int third_of(double v, double boundary) {
  if (v < -boundary) return 0;
  if (v > boundary) return 2;
  return 1;
}

}  // namespace

HeadSector bin_head_sector(double yaw_deg, double pitch_deg, const SpatialConfig& config) {
  const double yaw_boundary = horizontal_fov_deg(config) / 6.0;
  const double pitch_boundary = vertical_fov_deg(config) / 6.0;
  const int col = third_of(yaw_deg, yaw_boundary);
  const int row = third_of(pitch_deg, pitch_boundary);  // 0 = bottom, 2 = top
  static constexpr HeadSector kGrid[3][3] = {
      {HeadSector::BottomLeft, HeadSector::BottomCenter, HeadSector::BottomRight},
      {HeadSector::LeftCenter, HeadSector::Center, HeadSector::RightCenter},
      {HeadSector::TopLeft, HeadSector::TopCenter, HeadSector::TopRight},
  };
  return kGrid[row][col];
}

BodySector bin_body_sector(double yaw_deg, double pitch_deg, const SpatialConfig& config) {
  if (yaw_deg > config.far_turn_threshold_deg) return BodySector::FarRight;
  if (yaw_deg < -config.far_turn_threshold_deg) return BodySector::FarLeft;
  const int col = third_of(yaw_deg, config.far_turn_threshold_deg / 3.0);
  const int row = third_of(pitch_deg, config.vertical_eye_band_deg);
  static constexpr BodySector kGrid[3][3] = {
      {BodySector::BottomLeft, BodySector::BottomCenter, BodySector::BottomRight},
      {BodySector::LeftCenter, BodySector::Center, BodySector::RightCenter},
      {BodySector::TopLeft, BodySector::TopCenter, BodySector::TopRight},
  };
  return kGrid[row][col];
}

}  // namespace iar::spatial
