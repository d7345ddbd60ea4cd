#pragma once

#include <optional>
#include <string_view>

#include "iar/value.hpp"

namespace iar::spatial {

// Geometry parameters of the study headset and the body-orientation
// heuristic. Defaults match the bundled study configuration.
struct SpatialConfig {
  double fov_diagonal_deg = 52.0;
  double display_aspect_w = 16.0;
  double display_aspect_h = 9.0;
  // Head turns beyond this yaw (relative to body forward) fall into the
  // FarLeft / FarRight sectors.
  double far_turn_threshold_deg = 45.0;
  // A movement-direction change counts as a body turn only when
  // dot(prev, curr) drops below this (strict comparison).
  double orientation_dot_threshold = 0.85;
  // Pitch band treated as "at eye level" in the body-fixed frame.
  double vertical_eye_band_deg = 10.0;
  // Per-frame translations below this are ignored as head jitter.
  double motion_epsilon_m = 0.01;
};

void validate(const SpatialConfig& config);  // throws ConfigError

// Horizontal/vertical field of view derived from the diagonal at the display
// aspect ratio (52 deg diagonal at 16:9 gives ~45.3 x ~25.5 deg).
double horizontal_fov_deg(const SpatialConfig& config);
double vertical_fov_deg(const SpatialConfig& config);

// Head-fixed frame: the field of view split into a 3x3 grid.
enum class HeadSector {
  TopLeft, TopCenter, TopRight,
  LeftCenter, Center, RightCenter,
  BottomLeft, BottomCenter, BottomRight,
};

// Body-fixed frame: the 3x3 grid in front of the body plus the far flanks
// reached only by extreme head turns.
enum class BodySector {
  TopLeft, TopCenter, TopRight,
  LeftCenter, Center, RightCenter,
  BottomLeft, BottomCenter, BottomRight,
  FarLeft, FarRight,
};

const char* to_string(HeadSector s) noexcept;
const char* to_string(BodySector s) noexcept;
std::optional<HeadSector> head_sector_from_string(std::string_view s) noexcept;
std::optional<BodySector> body_sector_from_string(std::string_view s) noexcept;

// Position and estimated forward direction of the user's body. `forward` is
// unit length and lies in the floor plane (y = 0).
struct BodyPose {
  Vec3 position{0.0, 0.0, 0.0};
  Vec3 forward{0.0, 0.0, 1.0};
};

struct ForwardUpdate {
  BodyPose pose;
  Vec3 prev_move;  // feeds the next frame; unchanged when no motion occurred
  bool moved = false;
};

// True when the (already normalized) current movement direction deviates from
// the previous one enough to count as a body turn: dot < threshold, strictly.
bool turn_detected(const Vec3& prev_move, const Vec3& curr_move_normalized,
                   const SpatialConfig& config);

// One frame of the body-orientation heuristic. `curr_move` is the raw
// translation since the previous frame; vertical motion is discarded before
// thresholding. Sub-epsilon motion leaves pose and prev_move untouched.
ForwardUpdate update_body_forward(const BodyPose& pose, const Vec3& prev_move,
                                  const Vec3& curr_move, const SpatialConfig& config);

// The "center" voice command: body forward becomes the floor projection of
// the current head gaze. Throws GazeVertical when the gaze is within epsilon
// of straight up/down and the projection degenerates.
Vec3 recenter(double head_yaw_deg, double head_pitch_deg);

// Yaw/pitch offsets are in degrees relative to the frame's reference axis,
// positive yaw to the right, positive pitch up. Inputs outside the field of
// view clamp to the nearest edge third; every finite input maps to a sector.
HeadSector bin_head_sector(double yaw_deg, double pitch_deg, const SpatialConfig& config);
BodySector bin_body_sector(double yaw_deg, double pitch_deg, const SpatialConfig& config);

}  // namespace iar::spatial
