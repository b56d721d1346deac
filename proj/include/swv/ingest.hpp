#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swv/csv.hpp"
#include "swv/records.hpp"

namespace swv::ingest {

// Bat speed cutoff separating full swings from bunts / check swings.
inline constexpr double kFullSwingMinBatSpeed = 50.0;  // mph

// Exit speed must beat this fraction of the collision-model maximum.
inline constexpr double kSquaredUpFraction = 0.8;
inline constexpr double kBatSpeedCoef = 1.23;
inline constexpr double kPitchSpeedCoef = 0.23;

struct DropReport {
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::vector<std::size_t> dropped_rows;           // 0-based data row indices
  std::vector<std::string> row_errors;             // per dropped row, aligned
};

// Canonical column dictionary. A mapping config may rename source columns:
// map key = canonical name, value = name used in the input file.
inline const std::vector<std::string>& canonical_columns() {
  static const std::vector<std::string> cols = {
      "game_id", "batter_id",  "pitcher_id",  "batter_side", "pitcher_side",
      "balls",   "strikes",    "pitch_type",  "plate_x",     "plate_z",
      "vx",      "vy",         "vz",          "ax",          "ay",
      "az",      "extension",  "sz_top",      "sz_bot",      "outcome",
      "bat_speed", "swing_length", "exit_speed", "launch_angle", "hit_x", "hit_y"};
  return cols;
}

namespace detail {

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty() || s == "NA" || s == "null") return std::nullopt;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

inline std::optional<int> parse_int(const std::string& s) {
  const auto v = parse_double(s);
  if (!v || *v != std::floor(*v)) return std::nullopt;
  return static_cast<int>(*v);
}

inline std::optional<Side> parse_side(const std::string& s) {
  if (s == "L" || s == "l") return Side::Left;
  if (s == "R" || s == "r") return Side::Right;
  return std::nullopt;
}

}  // namespace detail

inline std::vector<PitchRecord> parse_pitch_csv(
    const std::string& path, DropReport& report,
    const std::map<std::string, std::string>& column_mapping = {}) {
  const csv::Table table = csv::read_file(path);

  std::map<std::string, int> col;
  for (const auto& name : canonical_columns()) {
    auto it = column_mapping.find(name);
    col[name] = table.column(it == column_mapping.end() ? name : it->second);
  }

  auto field = [&](const std::vector<std::string>& row, const std::string& name) -> std::string {
    const int c = col.at(name);
    if (c < 0 || c >= static_cast<int>(row.size())) return {};
    return row[static_cast<std::size_t>(c)];
  };

  std::vector<PitchRecord> out;
  report = DropReport{};
  report.rows_read = table.rows.size();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    auto drop = [&](const std::string& why) {
      report.dropped_rows.push_back(i);
      report.row_errors.push_back(why);
    };

    PitchRecord r;
    r.game_id = field(row, "game_id");
    r.batter_id = field(row, "batter_id");
    r.pitcher_id = field(row, "pitcher_id");
    if (r.batter_id.empty() || r.pitcher_id.empty()) {
      drop("missing batter/pitcher id");
      continue;
    }
    const auto bside = detail::parse_side(field(row, "batter_side"));
    const auto pside = detail::parse_side(field(row, "pitcher_side"));
    const auto balls = detail::parse_int(field(row, "balls"));
    const auto strikes = detail::parse_int(field(row, "strikes"));
    if (!bside || !pside || !balls || !strikes) {
      drop("missing or malformed context field");
      continue;
    }
    if (*balls < 0 || *balls > 3 || *strikes < 0 || *strikes > 2) {
      drop("count out of range");
      continue;
    }
    r.batter_side = *bside;
    r.pitcher_side = *pside;
    r.balls = *balls;
    r.strikes = *strikes;
    r.pitch_type = field(row, "pitch_type");
    if (r.pitch_type.empty()) {
      drop("missing pitch_type");
      continue;
    }
    const auto outcome = parse_pitch_outcome(field(row, "outcome"));
    if (!outcome) {
      drop("unknown outcome code: " + field(row, "outcome"));
      continue;
    }
    r.outcome = *outcome;

    bool ok = true;
    auto req = [&](const char* name) -> double {
      const auto v = detail::parse_double(field(row, name));
      if (!v) ok = false;
      return v.value_or(0.0);
    };
    r.plate_x = req("plate_x");
    r.plate_z = req("plate_z");
    r.vel_at_plate = {req("vx"), req("vy"), req("vz")};
    r.acc_at_plate = {req("ax"), req("ay"), req("az")};
    r.extension = req("extension");
    r.sz_top = req("sz_top");
    r.sz_bot = req("sz_bot");
    if (!ok) {
      drop("missing or malformed trajectory field");
      continue;
    }
    if (!(r.sz_top > r.sz_bot && r.sz_bot > 0.0)) {
      drop("invalid strike zone bounds");
      continue;
    }

    r.bat_speed = detail::parse_double(field(row, "bat_speed"));
    r.swing_length = detail::parse_double(field(row, "swing_length"));
    r.exit_speed = detail::parse_double(field(row, "exit_speed"));
    r.launch_angle = detail::parse_double(field(row, "launch_angle"));
    r.hit_x = detail::parse_double(field(row, "hit_x"));
    r.hit_y = detail::parse_double(field(row, "hit_y"));

    out.push_back(std::move(r));
  }
  report.rows_kept = out.size();
  return out;
}

// Keep only full swings: bat speed tracked and >= 50 mph. Non-swing
// records are removed as well.
inline std::vector<PitchRecord> filter_full_swings(const std::vector<PitchRecord>& records) {
  std::vector<PitchRecord> out;
  for (const auto& r : records) {
    if (r.bat_speed && *r.bat_speed >= kFullSwingMinBatSpeed) out.push_back(r);
  }
  return out;
}

inline bool is_squared_up(double bat_speed, double pitch_speed_at_contact, double exit_speed) {
  if (!(bat_speed > 0.0) || !(pitch_speed_at_contact > 0.0) || !(exit_speed > 0.0)) {
    throw ArgumentError("is_squared_up: speeds must be positive");
  }
  const double max_exit = kBatSpeedCoef * bat_speed + kPitchSpeedCoef * pitch_speed_at_contact;
  return exit_speed > kSquaredUpFraction * max_exit;
}

// Fastball family rank; tie-break order four-seam < sinker < cutter.
inline std::optional<int> fastball_family_rank(const std::string& pitch_type) {
  if (pitch_type == "four_seam" || pitch_type == "FF" || pitch_type == "FA") return 0;
  if (pitch_type == "sinker" || pitch_type == "SI" || pitch_type == "FT") return 1;
  if (pitch_type == "cutter" || pitch_type == "FC") return 2;
  return std::nullopt;
}

// Most frequent fastball-family pitch type for one pitcher's pitches.
inline std::optional<std::string> primary_fastball_type(const std::vector<PitchRecord>& pitches) {
  std::map<int, std::pair<std::size_t, std::string>> counts;  // rank -> (count, name)
  for (const auto& p : pitches) {
    if (const auto rank = fastball_family_rank(p.pitch_type)) {
      auto& slot = counts[*rank];
      ++slot.first;
      slot.second = p.pitch_type;
    }
  }
  if (counts.empty()) return std::nullopt;
  const std::pair<const int, std::pair<std::size_t, std::string>>* best = nullptr;
  for (const auto& kv : counts) {
    if (!best || kv.second.first > best->second.first) best = &kv;
  }
  return best->second.second;
}

// Standardize horizontal location to batter-relative sign: positive = away
// side for both handednesses. plate_x uses the catcher's view (positive =
// catcher's right), which is the away side for a left-handed batter.
inline double mirror_loc_x(double plate_x, Side batter_side) {
  return batter_side == Side::Right ? -plate_x : plate_x;
}

inline bool record_is_squared_up(const PitchRecord& r) {
  if (!r.bat_speed || !r.exit_speed) return false;
  return is_squared_up(*r.bat_speed, r.plate_speed_mph(), *r.exit_speed);
}

struct IntentionDatasets {
  std::vector<IntentionObservation> bat_speed;
  std::vector<IntentionObservation> swing_length;
};

// Keep contacted swings (foul or fair) that are squared up against the
// pitcher's primary fastball; emit one observation per response variable.
// Records are expected to have passed filter_full_swings already.
inline IntentionDatasets build_intention_dataset(const std::vector<PitchRecord>& records) {
  std::map<std::string, std::vector<PitchRecord>> by_pitcher;
  for (const auto& r : records) by_pitcher[r.pitcher_id].push_back(r);
  std::map<std::string, std::string> primary;
  for (const auto& [pid, pitches] : by_pitcher) {
    if (const auto t = primary_fastball_type(pitches)) primary[pid] = *t;
  }

  IntentionDatasets out;
  for (const auto& r : records) {
    if (r.outcome != PitchOutcome::FoulBall && r.outcome != PitchOutcome::FairBall) continue;
    auto it = primary.find(r.pitcher_id);
    if (it == primary.end() || it->second != r.pitch_type) continue;
    if (!record_is_squared_up(r)) continue;

    IntentionObservation obs;
    obs.batter_id = r.batter_id;
    obs.pitcher_id = r.pitcher_id;
    obs.balls = r.balls;
    obs.strikes = r.strikes;
    obs.loc_x = mirror_loc_x(r.plate_x, r.batter_side);
    obs.loc_z = r.plate_z;
    if (r.bat_speed) {
      obs.response = *r.bat_speed;
      out.bat_speed.push_back(obs);
    }
    if (r.swing_length) {
      obs.response = *r.swing_length;
      out.swing_length.push_back(obs);
    }
  }
  return out;
}

}  // namespace swv::ingest
