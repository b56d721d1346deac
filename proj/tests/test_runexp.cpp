#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "swv/runexp.hpp"
#include "swv/synth.hpp"

using namespace swv;
using runexp::BaseOutState;
using runexp::PaOutcome;
using runexp::PlayEvent;

TEST_CASE("base-out state indexing round-trips") {
  for (int i = 0; i < runexp::kNumStates; ++i) {
    const auto s = BaseOutState::from_index(i);
    CHECK(s.index() == i);
    CHECK_FALSE(s.terminal());
  }
  CHECK(BaseOutState{false, false, false, 3}.terminal());
}

TEST_CASE("RE24 on a hand-traced inning") {
  // Inning: HR (empty,0 -> empty,0, 1 run), K, K, K.
  const BaseOutState e0{false, false, false, 0};
  const BaseOutState e1{false, false, false, 1};
  const BaseOutState e2{false, false, false, 2};
  const BaseOutState e3{false, false, false, 3};
  const std::vector<PlayEvent> events = {
      {"I0", e0, e0, 1, PaOutcome::HomeRun},
      {"I0", e0, e1, 0, PaOutcome::Strikeout},
      {"I0", e1, e2, 0, PaOutcome::Strikeout},
      {"I0", e2, e3, 0, PaOutcome::Strikeout},
  };
  const auto re = runexp::compute_re24(events);
  CHECK(re.innings_used == 1);
  // (empty,0) observed twice with runs-to-end 1 and 0 -> mean 0.5
  CHECK(re.at(e0) == Catch::Approx(0.5));
  CHECK(re.at(e1) == 0.0);
  CHECK(re.at(e2) == 0.0);
  CHECK(re.at(e3) == 0.0);  // terminal states are 0 by definition
  CHECK_THROWS_AS(re.at(BaseOutState{true, false, false, 0}), ArgumentError);

  // delta_re: the HR gains RE(e0) - RE(e0) + 1 = 1; each K loses expectancy
  CHECK(runexp::delta_re(events[0], re) == Catch::Approx(1.0));
  CHECK(runexp::delta_re(events[1], re) == Catch::Approx(-0.5));

  const auto lw = runexp::linear_weights(events, re);
  CHECK(lw.at(PaOutcome::HomeRun) == Catch::Approx(1.0));
  CHECK(lw.at(PaOutcome::Strikeout) == Catch::Approx((-0.5 + 0.0 + 0.0) / 3.0));
}

TEST_CASE("partial innings are dropped and counted") {
  const BaseOutState e0{false, false, false, 0};
  const BaseOutState e1{false, false, false, 1};
  const BaseOutState e3{false, false, false, 3};
  const std::vector<PlayEvent> events = {
      {"I0", e0, e1, 0, PaOutcome::Strikeout},  // never reaches 3 outs
      {"I1", e0, e3, 0, PaOutcome::OutInPlay},  // well, 1 PA with 3 outs is fine here
  };
  // make I1 complete properly
  std::vector<PlayEvent> ev = {
      events[0],
      {"I1", e0, e1, 0, PaOutcome::Strikeout},
      {"I1", e1, {false, false, false, 2}, 0, PaOutcome::Strikeout},
      {"I1", {false, false, false, 2}, e3, 0, PaOutcome::Strikeout},
  };
  const auto re = runexp::compute_re24(ev);
  CHECK(re.innings_used == 1);
  CHECK(re.partial_innings_dropped == 1);
}

TEST_CASE("telescoping conservation holds on every synthetic inning") {
  synth::LeagueSpec spec;
  spec.n_innings = 400;
  spec.seed = 21;
  const auto events = synth::gen_playbyplay(spec);
  const auto re = runexp::compute_re24(events);
  CHECK(re.partial_innings_dropped == 0);

  // Per inning: sum of delta_re telescopes to runs_in_inning - RE(empty, 0).
  // (No aggregate zero-sum claim: RE(empty,0) averages over every visit to
  // the bases-empty no-out state, including mid-inning revisits after a home
  // run, so it is not the mean of runs per inning.)
  const BaseOutState e0{false, false, false, 0};
  std::size_t i = 0;
  while (i < events.size()) {
    std::size_t j = i;
    double inning_delta = 0.0, inning_runs = 0.0;
    while (j < events.size() && events[j].inning_id == events[i].inning_id) {
      inning_delta += runexp::delta_re(events[j], re);
      inning_runs += events[j].runs_scored;
      ++j;
    }
    CHECK(inning_delta == Catch::Approx(inning_runs - re.at(e0)).margin(1e-9));
    i = j;
  }
}

TEST_CASE("two-outcome league approaches the closed form") {
  const double p = 0.12;
  const auto events = synth::gen_two_outcome_innings(p, 20000, 5);
  const auto re = runexp::compute_re24(events);
  for (int outs = 0; outs < 3; ++outs) {
    CHECK(re.at(BaseOutState{false, false, false, outs}) ==
          Catch::Approx(synth::two_outcome_re(p, outs)).margin(0.02));
  }
}

TEST_CASE("linear weights exclude non-PA events and defaults match the constants") {
  const BaseOutState e0{false, false, false, 0};
  const BaseOutState e3{false, false, false, 3};
  std::vector<PlayEvent> ev = {
      {"I0", e0, e0, 0, PaOutcome::Other},  // e.g. a wild pitch, no PA
      {"I0", e0, e3, 0, PaOutcome::OutInPlay},
      {"I0", e0, e3, 0, PaOutcome::OutInPlay},
      {"I0", e0, e3, 0, PaOutcome::OutInPlay},
  };
  const auto re = runexp::compute_re24(ev);
  const auto lw = runexp::linear_weights(ev, re);
  CHECK(lw.find(PaOutcome::Other) == lw.end());
  CHECK(lw.count(PaOutcome::OutInPlay) == 1);

  const auto d = runexp::default_linear_weights();
  CHECK(d.at(PaOutcome::Strikeout) == -0.27);
  CHECK(d.at(PaOutcome::Walk) == 0.33);
  CHECK(d.at(PaOutcome::HitByPitch) == 0.36);
}
