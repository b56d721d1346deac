#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "swv/common.hpp"

namespace swv {

enum class Side { Left, Right };

enum class PitchOutcome {
  HitByPitch,
  CalledBall,
  CalledStrike,
  SwingingStrike,
  FoulBall,
  FairBall,
};

inline bool is_swing(PitchOutcome o) {
  return o == PitchOutcome::SwingingStrike || o == PitchOutcome::FoulBall ||
         o == PitchOutcome::FairBall;
}

inline const char* to_string(PitchOutcome o) {
  switch (o) {
    case PitchOutcome::HitByPitch: return "hit_by_pitch";
    case PitchOutcome::CalledBall: return "called_ball";
    case PitchOutcome::CalledStrike: return "called_strike";
    case PitchOutcome::SwingingStrike: return "swinging_strike";
    case PitchOutcome::FoulBall: return "foul_ball";
    case PitchOutcome::FairBall: return "fair_ball";
  }
  return "?";
}

inline std::optional<PitchOutcome> parse_pitch_outcome(const std::string& s) {
  if (s == "hit_by_pitch") return PitchOutcome::HitByPitch;
  if (s == "called_ball") return PitchOutcome::CalledBall;
  if (s == "called_strike") return PitchOutcome::CalledStrike;
  if (s == "swinging_strike") return PitchOutcome::SwingingStrike;
  if (s == "foul_ball") return PitchOutcome::FoulBall;
  if (s == "fair_ball") return PitchOutcome::FairBall;
  return std::nullopt;
}

struct PitchRecord {
  std::string game_id;
  std::string batter_id;
  std::string pitcher_id;
  Side batter_side = Side::Right;
  Side pitcher_side = Side::Right;
  int balls = 0;    // 0..3
  int strikes = 0;  // 0..2
  std::string pitch_type;
  double plate_x = 0.0;  // ft, catcher's view, positive = catcher's right
  double plate_z = 0.0;  // ft above ground
  std::array<double, 3> vel_at_plate{};  // ft/s
  std::array<double, 3> acc_at_plate{};  // ft/s^2
  double extension = 0.0;                // ft
  double sz_top = 0.0;                   // ft
  double sz_bot = 0.0;                   // ft
  PitchOutcome outcome = PitchOutcome::CalledBall;
  std::optional<double> bat_speed;     // mph, swings only
  std::optional<double> swing_length;  // ft, swings only
  std::optional<double> exit_speed;    // mph
  std::optional<double> launch_angle;  // deg
  std::optional<double> hit_x;
  std::optional<double> hit_y;

  // Pitch speed at the plate in mph, from the velocity vector (ft/s).
  double plate_speed_mph() const {
    const auto& v = vel_at_plate;
    const double fps = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return fps * 0.6818181818181818;  // ft/s -> mph
  }
};

// One squared-up swing against the pitcher's primary fastball; the unit of
// the intention model. loc_x is batter-relative (positive = away side).
struct IntentionObservation {
  std::string batter_id;
  std::string pitcher_id;
  double response = 0.0;  // bat speed (mph) or swing length (ft)
  int balls = 0;
  int strikes = 0;
  double loc_x = 0.0;
  double loc_z = 0.0;
};

}  // namespace swv
