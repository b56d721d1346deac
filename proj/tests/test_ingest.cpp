#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "swv/ingest.hpp"

using namespace swv;

namespace {

std::string write_fixture(const std::string& name, const std::string& body) {
  const auto path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << body;
  return path;
}

const char* kHeader =
    "game_id,batter_id,pitcher_id,batter_side,pitcher_side,balls,strikes,pitch_type,"
    "plate_x,plate_z,vx,vy,vz,ax,ay,az,extension,sz_top,sz_bot,outcome,"
    "bat_speed,swing_length,exit_speed,launch_angle,hit_x,hit_y\n";

std::string good_row(const std::string& outcome = "fair_ball",
                     const std::string& bat_speed = "72") {
  return "G1,B1,P1,R,L,1,2,four_seam,0.2,2.5,1,-130,-8,2,25,-18,6.4,3.4,1.6," + outcome + "," +
         bat_speed + ",7.1,95,12,10,200\n";
}

}  // namespace

TEST_CASE("parse_pitch_csv keeps good rows and reports drops with reasons") {
  std::string body = kHeader;
  body += good_row();
  body += "G1,,P1,R,L,1,2,four_seam,0.2,2.5,1,-130,-8,2,25,-18,6.4,3.4,1.6,fair_ball,,,,,,\n";  // no batter
  body += "G1,B1,P1,R,L,5,2,four_seam,0.2,2.5,1,-130,-8,2,25,-18,6.4,3.4,1.6,fair_ball,,,,,,\n";  // balls out of range
  body += "G1,B1,P1,X,L,1,2,four_seam,0.2,2.5,1,-130,-8,2,25,-18,6.4,3.4,1.6,fair_ball,,,,,,\n";  // bad side
  body += "G1,B1,P1,R,L,1,2,,0.2,2.5,1,-130,-8,2,25,-18,6.4,3.4,1.6,fair_ball,,,,,,\n";          // no pitch type
  body += "G1,B1,P1,R,L,1,2,four_seam,0.2,2.5,1,-130,-8,2,25,-18,6.4,3.4,1.6,bunt,,,,,,\n";      // unknown outcome
  body += "G1,B1,P1,R,L,1,2,four_seam,0.2,2.5,1,-130,NA,2,25,-18,6.4,3.4,1.6,fair_ball,,,,,,\n"; // missing vz
  body += "G1,B1,P1,R,L,1,2,four_seam,0.2,2.5,1,-130,-8,2,25,-18,6.4,1.6,3.4,fair_ball,,,,,,\n"; // sz inverted
  const auto path = write_fixture("swv_ingest_fixture.csv", body);

  ingest::DropReport report;
  const auto records = ingest::parse_pitch_csv(path, report);
  CHECK(report.rows_read == 8);
  CHECK(report.rows_kept == 1);
  REQUIRE(report.dropped_rows.size() == 7);
  REQUIRE(report.row_errors.size() == 7);
  CHECK(report.row_errors[0] == "missing batter/pitcher id");
  CHECK(report.row_errors[1] == "count out of range");
  CHECK(report.row_errors[2] == "missing or malformed context field");
  CHECK(report.row_errors[3] == "missing pitch_type");
  CHECK(report.row_errors[4] == "unknown outcome code: bunt");
  CHECK(report.row_errors[5] == "missing or malformed trajectory field");
  CHECK(report.row_errors[6] == "invalid strike zone bounds");

  REQUIRE(records.size() == 1);
  const auto& r = records[0];
  CHECK(r.batter_id == "B1");
  CHECK(r.batter_side == Side::Right);
  CHECK(r.pitcher_side == Side::Left);
  CHECK(r.balls == 1);
  CHECK(r.strikes == 2);
  CHECK(r.outcome == PitchOutcome::FairBall);
  REQUIRE(r.bat_speed.has_value());
  CHECK(*r.bat_speed == 72.0);
  CHECK(r.plate_speed_mph() == Catch::Approx(std::sqrt(1.0 + 130.0 * 130.0 + 64.0) *
                                             0.6818181818181818));
  std::remove(path.c_str());
}

TEST_CASE("column mapping renames source columns") {
  std::string body = kHeader;
  body.replace(body.find("bat_speed"), 9, "swing_mph");
  body += good_row();
  const auto path = write_fixture("swv_ingest_map.csv", body);
  ingest::DropReport report;
  const auto records =
      ingest::parse_pitch_csv(path, report, {{"bat_speed", "swing_mph"}});
  REQUIRE(records.size() == 1);
  CHECK(records[0].bat_speed.value() == 72.0);
  std::remove(path.c_str());
}

TEST_CASE("filter_full_swings keeps tracked swings at or above 50 mph") {
  PitchRecord slow, fast, untracked;
  slow.bat_speed = 49.9;
  fast.bat_speed = 50.0;
  const auto out = ingest::filter_full_swings({slow, fast, untracked});
  REQUIRE(out.size() == 1);
  CHECK(out[0].bat_speed.value() == 50.0);
}

TEST_CASE("squared-up rule follows the collision model") {
  // max exit = 1.23*70 + 0.23*90 = 106.8; threshold = 85.44
  CHECK(ingest::is_squared_up(70.0, 90.0, 85.5));
  CHECK_FALSE(ingest::is_squared_up(70.0, 90.0, 85.3));
  CHECK_THROWS_AS(ingest::is_squared_up(0.0, 90.0, 80.0), ArgumentError);
  CHECK_THROWS_AS(ingest::is_squared_up(70.0, -1.0, 80.0), ArgumentError);
  CHECK_THROWS_AS(ingest::is_squared_up(70.0, 90.0, 0.0), ArgumentError);
}

TEST_CASE("primary fastball picks the most frequent family member") {
  auto rec = [](const std::string& type) {
    PitchRecord r;
    r.pitch_type = type;
    return r;
  };
  CHECK(ingest::primary_fastball_type({rec("sinker"), rec("sinker"), rec("four_seam"),
                                       rec("slider"), rec("slider"), rec("slider")}) ==
        "sinker");
  // tie-break: four-seam < sinker < cutter
  CHECK(ingest::primary_fastball_type({rec("cutter"), rec("four_seam")}) == "four_seam");
  CHECK(ingest::primary_fastball_type({rec("cutter"), rec("sinker")}) == "sinker");
  CHECK_FALSE(ingest::primary_fastball_type({rec("slider"), rec("curveball")}).has_value());
  CHECK(ingest::fastball_family_rank("FF") == 0);
  CHECK(ingest::fastball_family_rank("SI") == 1);
  CHECK(ingest::fastball_family_rank("FC") == 2);
  CHECK_FALSE(ingest::fastball_family_rank("CH").has_value());
}

TEST_CASE("mirror_loc_x is batter-relative") {
  CHECK(ingest::mirror_loc_x(0.5, Side::Right) == -0.5);
  CHECK(ingest::mirror_loc_x(0.5, Side::Left) == 0.5);
  // applying the mirror twice for the same side is the identity
  CHECK(ingest::mirror_loc_x(ingest::mirror_loc_x(0.7, Side::Right), Side::Right) == 0.7);
}

TEST_CASE("build_intention_dataset keeps squared-up primary-fastball contact") {
  auto rec = [](const std::string& pid, const std::string& type, PitchOutcome o,
                double bat_speed, double exit_speed) {
    PitchRecord r;
    r.batter_id = "B1";
    r.pitcher_id = pid;
    r.pitch_type = type;
    r.outcome = o;
    r.bat_speed = bat_speed;
    r.swing_length = 7.0;
    r.exit_speed = exit_speed;
    r.vel_at_plate = {0.0, -130.0, 0.0};  // ~88.6 mph
    r.balls = 2;
    r.strikes = 1;
    r.plate_x = 0.4;
    r.batter_side = Side::Right;
    return r;
  };
  const double hot = 1.23 * 70.0 + 0.23 * 90.0;  // comfortably squared up
  std::vector<PitchRecord> recs = {
      rec("P1", "four_seam", PitchOutcome::FoulBall, 70.0, hot),   // kept
      rec("P1", "four_seam", PitchOutcome::FairBall, 70.0, hot),   // kept
      rec("P1", "four_seam", PitchOutcome::SwingingStrike, 70.0, hot),  // no contact
      rec("P1", "slider", PitchOutcome::FairBall, 70.0, hot),      // not primary type
      rec("P1", "four_seam", PitchOutcome::FairBall, 70.0, 60.0),  // not squared up
      rec("P2", "sinker", PitchOutcome::FairBall, 70.0, hot),      // P2's primary is sinker
  };
  // make four_seam P1's primary
  recs.push_back(rec("P1", "four_seam", PitchOutcome::CalledBall, 70.0, hot));

  const auto ds = ingest::build_intention_dataset(recs);
  CHECK(ds.bat_speed.size() == 3);
  CHECK(ds.swing_length.size() == 3);
  for (const auto& o : ds.bat_speed) {
    CHECK(o.loc_x == -0.4);  // mirrored for a right-handed batter
    CHECK(o.response == 70.0);
  }
  for (const auto& o : ds.swing_length) CHECK(o.response == 7.0);
}

TEST_CASE("observations missing one response enter only that dataset") {
  PitchRecord r;
  r.batter_id = "B1";
  r.pitcher_id = "P1";
  r.pitch_type = "four_seam";
  r.outcome = PitchOutcome::FoulBall;
  r.bat_speed = 71.0;
  r.exit_speed = 1.23 * 71.0 + 0.23 * 90.0;
  r.vel_at_plate = {0.0, -130.0, 0.0};
  // swing_length missing
  const auto ds = ingest::build_intention_dataset({r});
  CHECK(ds.bat_speed.size() == 1);
  CHECK(ds.swing_length.empty());
}
