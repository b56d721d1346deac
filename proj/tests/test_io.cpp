#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include "swv/io.hpp"
#include "swv/synth.hpp"

using namespace swv;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("swv_io_test_" + std::to_string(Catch::rngSeed()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("sha256 matches the published test vectors") {
  CHECK(io::sha256_hex(std::string("abc")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(io::sha256_hex(std::string()) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("file hashing sees exact bytes") {
  TempDir tmp;
  const auto p = tmp.file("abc.bin");
  std::ofstream(p, std::ios::binary) << "abc";
  CHECK(io::sha256_file(p) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_THROWS_AS(io::sha256_file(tmp.file("missing.bin")), ArgumentError);
}

TEST_CASE("posterior draws round-trip through json") {
  hier::PosteriorDraws d;
  d.chains = 2;
  d.draws_per_chain = 3;
  d.names = {"mu0", "beta_strikes"};
  d.values = {{{1.0, -0.5}, {1.25, -0.75}, {0.875, -1.0}},
              {{1.5, -0.25}, {1.0, -0.5}, {2.0, -1.5}}};
  d.divergences = {0, 2};
  d.step_sizes = {0.125, 0.25};
  d.flagged = true;
  d.warning = "2 divergences in chain 1";
  const auto back = io::draws_from_json(io::draws_to_json(d));
  CHECK(back.chains == d.chains);
  CHECK(back.draws_per_chain == d.draws_per_chain);
  CHECK(back.names == d.names);
  CHECK(back.values == d.values);  // dyadic rationals: exact through json
  CHECK(back.divergences == d.divergences);
  CHECK(back.step_sizes == d.step_sizes);
  CHECK(back.flagged == d.flagged);
  CHECK(back.warning == d.warning);
}

TEST_CASE("linear weights round-trip and reject unknown outcomes") {
  const auto lw = runexp::default_linear_weights();
  const auto back = io::linear_weights_from_json(io::linear_weights_to_json(lw));
  CHECK(back == lw);
  CHECK_THROWS_AS(io::linear_weights_from_json({{"balk", 0.1}}), ArgumentError);
}

TEST_CASE("causal suites round-trip through json") {
  const auto world = synth::gen_pa_world(synth::PaWorldSpec{});
  const auto suite = causal::fit_causal_suite(world.swings);
  const auto back = io::causal_suite_from_json(io::causal_suite_to_json(suite));
  CHECK(back.contact.beta_bs == suite.contact.beta_bs);
  CHECK(back.contact.se_bs == suite.contact.se_bs);
  CHECK(back.fair.intercept == suite.fair.intercept);
  CHECK(back.xlw.sigma2 == suite.xlw.sigma2);
  CHECK(back.xlw.n == suite.xlw.n);
  CHECK(back.contact.tag == causal::ModelTag::Contact);
  CHECK(back.xlw.tag == causal::ModelTag::Xlw);
}

TEST_CASE("transition models round-trip through json") {
  const auto world = synth::gen_pa_world(synth::PaWorldSpec{});
  const auto pool = pa::precompute_pool(world.pool, world.models);
  const auto model =
      pa::build_transition_model({0.3, -0.02}, pool, synth::exact_suite(world), world.lws);
  const auto back = io::transition_from_json(io::transition_to_json(model));
  CHECK(back.q == model.q);
  CHECK(back.fair_reward == model.fair_reward);
  CHECK(back.lw_strikeout == model.lw_strikeout);
  CHECK(back.lw_walk == model.lw_walk);
  CHECK(back.lw_hbp == model.lw_hbp);
}

TEST_CASE("intention observations round-trip through csv") {
  TempDir tmp;
  synth::IntentionSpec spec;
  spec.n_batters = 4;
  spec.n_pitchers = 2;
  spec.swings_per_batter = 10;
  const auto w = synth::gen_intention_data(spec);
  const auto p = tmp.file("intention.csv");
  io::write_intention_csv(p, w.bat_speed_obs);
  const auto back = io::read_intention_csv(p);
  REQUIRE(back.size() == w.bat_speed_obs.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].batter_id == w.bat_speed_obs[i].batter_id);
    CHECK(back[i].pitcher_id == w.bat_speed_obs[i].pitcher_id);
    CHECK(back[i].balls == w.bat_speed_obs[i].balls);
    CHECK(back[i].strikes == w.bat_speed_obs[i].strikes);
    CHECK(back[i].response == w.bat_speed_obs[i].response);  // format_double is exact
    CHECK(back[i].loc_x == w.bat_speed_obs[i].loc_x);
    CHECK(back[i].loc_z == w.bat_speed_obs[i].loc_z);
  }
  CHECK_THROWS_AS(io::read_intention_csv(tmp.file("nope.csv")), ArgumentError);
}

TEST_CASE("play-by-play events round-trip through csv") {
  TempDir tmp;
  synth::LeagueSpec spec;
  spec.n_innings = 25;
  spec.seed = 7;
  const auto events = synth::gen_playbyplay(spec);
  const auto p = tmp.file("pbp.csv");
  io::write_playbyplay_csv(p, events);
  const auto back = io::read_playbyplay_csv(p);
  REQUIRE(back.size() == events.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].inning_id == events[i].inning_id);
    CHECK(back[i].pre == events[i].pre);
    CHECK(back[i].post == events[i].post);
    CHECK(back[i].runs_scored == events[i].runs_scored);
    CHECK(back[i].outcome == events[i].outcome);
  }
}

TEST_CASE("batter approaches round-trip through csv") {
  TempDir tmp;
  std::vector<hier::BatterApproach> aps = {{"B0001", 1.5, -0.25}, {"B0002", -0.375, 0.0625}};
  const auto p = tmp.file("approaches.csv");
  io::write_approaches_csv(p, aps);
  const auto back = io::read_approaches_csv(p);
  REQUIRE(back.size() == 2);
  CHECK(back[0].batter_id == "B0001");
  CHECK(back[0].gamma_bs == 1.5);
  CHECK(back[1].gamma_sl == 0.0625);
}

TEST_CASE("pitch records round-trip through the ingest parser") {
  TempDir tmp;
  synth::IntentionSpec spec;
  spec.n_batters = 3;
  spec.n_pitchers = 2;
  spec.swings_per_batter = 8;
  const auto w = synth::gen_intention_data(spec);
  const auto records = synth::to_pitch_records(w);
  const auto p = tmp.file("pitches.csv");
  io::write_pitch_csv(p, records);
  ingest::DropReport rep;
  const auto back = ingest::parse_pitch_csv(p, rep);
  CHECK(rep.rows_read == records.size());
  CHECK(rep.rows_kept == records.size());
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].batter_id == records[i].batter_id);
    CHECK(back[i].outcome == records[i].outcome);
    CHECK(back[i].plate_x == records[i].plate_x);
    REQUIRE(back[i].bat_speed.has_value());
    CHECK(*back[i].bat_speed == *records[i].bat_speed);
    CHECK_FALSE(back[i].launch_angle.has_value());  // empty stays missing
  }
}

TEST_CASE("manifests track file content and config hashes") {
  TempDir tmp;
  const auto art = tmp.file("artifact.json");
  io::write_json_file(art, {{"x", 1}});
  const std::string cfg = io::sha256_hex(std::string("stage config"));

  io::Manifest m;
  m.stages["synth"].push_back({art, io::sha256_file(art), cfg, 42});
  const auto mpath = tmp.file("manifest.json");
  m.save(mpath);

  auto loaded = io::Manifest::load(mpath);
  REQUIRE(loaded.stages.count("synth") == 1);
  CHECK(loaded.stages["synth"][0].seed == 42);
  CHECK(loaded.stage_current("synth", cfg));
  CHECK_FALSE(loaded.stage_current("synth", "different-config-hash"));
  CHECK_FALSE(loaded.stage_current("unknown-stage", cfg));

  // artifact lookup by filename suffix
  CHECK(loaded.artifact("synth", "artifact.json").sha256 == m.stages["synth"][0].sha256);
  CHECK_THROWS_WITH(loaded.artifact("fit", "draws.json"),
                    Catch::Matchers::ContainsSubstring("requires stage fit"));
  CHECK_THROWS_AS(loaded.artifact("synth", "other.json"), ArgumentError);

  // editing the file makes the stage stale
  io::write_json_file(art, {{"x", 2}});
  CHECK_FALSE(loaded.stage_current("synth", cfg));
  // deleting it too
  fs::remove(art);
  CHECK_FALSE(loaded.stage_current("synth", cfg));

  // a missing manifest loads as empty
  const auto empty = io::Manifest::load(tmp.file("no-such-manifest.json"));
  CHECK(empty.stages.empty());
}
