#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "swv/pa_chain.hpp"
#include "swv/synth.hpp"

using namespace swv;
using pa::CountState;
using pa::Terminal;

TEST_CASE("count state indexing round-trips") {
  for (int i = 0; i < pa::kNumCounts; ++i) {
    const auto s = CountState::from_index(i);
    CHECK(s.index() == i);
  }
  CHECK(CountState{3, 2}.index() == 11);
}

TEST_CASE("count transitions follow the rules of the count") {
  using O = PitchOutcome;
  auto succ = [](CountState s, O o) { return pa::count_transition(s, o); };
  CHECK(std::get<CountState>(succ({1, 1}, O::CalledBall)) == CountState{2, 1});
  CHECK(std::get<Terminal>(succ({3, 1}, O::CalledBall)) == Terminal::Walk);
  CHECK(std::get<CountState>(succ({0, 1}, O::CalledStrike)) == CountState{0, 2});
  CHECK(std::get<Terminal>(succ({0, 2}, O::SwingingStrike)) == Terminal::Strikeout);
  CHECK(std::get<CountState>(succ({2, 1}, O::FoulBall)) == CountState{2, 2});
  CHECK(std::get<CountState>(succ({2, 2}, O::FoulBall)) == CountState{2, 2});  // self-loop
  CHECK(std::get<Terminal>(succ({1, 0}, O::FairBall)) == Terminal::FairBall);
  CHECK(std::get<Terminal>(succ({0, 0}, O::HitByPitch)) == Terminal::HitByPitch);
  CHECK(pa::successor_index(succ({2, 2}, O::FoulBall)) == CountState{2, 2}.index());
  CHECK(pa::successor_index(succ({0, 2}, O::CalledStrike)) ==
        pa::terminal_index(Terminal::Strikeout));
}

TEST_CASE("pitch transitions are proper distributions") {
  const auto world = synth::gen_pa_world(synth::PaWorldSpec{});
  const auto suite = synth::exact_suite(world);
  const auto pool = pa::precompute_pool(world.pool, world.models);
  const pa::ApproachVector ap{0.8, -0.1};
  for (const auto& p : pool) {
    const auto tr = pa::pitch_transition(p, ap, suite);
    double sum = 0.0;
    for (double v : tr.prob) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));
  }
  const auto model = pa::build_transition_model(ap, pool, suite, world.lws);
  for (int i = 0; i < pa::kNumCounts; ++i) {
    double sum = 0.0;
    for (double v : model.q[static_cast<std::size_t>(i)]) sum += v;
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("hand-built chains solve exactly") {
  pa::TransitionModel m;
  // every count: strikeout with probability 1
  for (auto& row : m.q) {
    row.fill(0.0);
    row[static_cast<std::size_t>(pa::terminal_index(Terminal::Strikeout))] = 1.0;
  }
  auto vf = pa::solve_bellman(m);
  for (double v : vf.value) CHECK(v == Catch::Approx(m.lw_strikeout).margin(1e-12));

  // two-strike foul self-loop with a fair-ball exit: geometric series
  const int i22 = CountState{2, 2}.index();
  m.q[static_cast<std::size_t>(i22)].fill(0.0);
  m.q[static_cast<std::size_t>(i22)][static_cast<std::size_t>(i22)] = 0.6;
  m.q[static_cast<std::size_t>(i22)][static_cast<std::size_t>(pa::terminal_index(Terminal::FairBall))] = 0.4;
  m.fair_reward[static_cast<std::size_t>(i22)] = 0.25;
  vf = pa::solve_bellman(m);
  // V = 0.6 V + 0.4 * 0.25  =>  V = 0.25
  CHECK(vf.value[static_cast<std::size_t>(i22)] == Catch::Approx(0.25).margin(1e-10));

  // 0-0 -> 50/50 walk or strikeout via one pitch
  const int i00 = CountState{0, 0}.index();
  m.q[static_cast<std::size_t>(i00)].fill(0.0);
  m.q[static_cast<std::size_t>(i00)][static_cast<std::size_t>(pa::terminal_index(Terminal::Walk))] = 0.5;
  m.q[static_cast<std::size_t>(i00)][static_cast<std::size_t>(pa::terminal_index(Terminal::Strikeout))] = 0.5;
  vf = pa::solve_bellman(m);
  CHECK(vf.value[static_cast<std::size_t>(i00)] ==
        Catch::Approx(0.5 * (m.lw_walk + m.lw_strikeout)).margin(1e-10));
}

TEST_CASE("a saturated self-loop is rejected") {
  pa::TransitionModel m;
  for (auto& row : m.q) {
    row.fill(0.0);
    row[static_cast<std::size_t>(pa::terminal_index(Terminal::Strikeout))] = 1.0;
  }
  const int i22 = CountState{2, 2}.index();
  m.q[static_cast<std::size_t>(i22)].fill(0.0);
  m.q[static_cast<std::size_t>(i22)][static_cast<std::size_t>(i22)] = 1.0;
  CHECK_THROWS_AS(pa::solve_bellman(m), ArgumentError);
}

TEST_CASE("value iteration agrees with the direct linear solve") {
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    synth::PaWorldSpec spec;
    spec.seed = seed;
    const auto world = synth::gen_pa_world(spec);
    const auto suite = synth::exact_suite(world);
    const auto pool = pa::precompute_pool(world.pool, world.models);
    const auto model = pa::build_transition_model({0.5, -0.05}, pool, suite, world.lws);
    const auto vi = pa::solve_bellman(model);
    const auto lin = pa::solve_linear(model);
    CHECK(vi.iterations <= 500);
    for (int i = 0; i < pa::kNumCounts; ++i) {
      CHECK(vi.value[static_cast<std::size_t>(i)] ==
            Catch::Approx(lin.value[static_cast<std::size_t>(i)]).margin(1e-9));
    }
  }
}

TEST_CASE("monte carlo simulation brackets the solved value") {
  synth::PaWorldSpec spec;
  spec.seed = 21;
  const auto world = synth::gen_pa_world(spec);
  const auto suite = synth::exact_suite(world);
  const auto pool = pa::precompute_pool(world.pool, world.models);
  const pa::ApproachVector ap{1.0, 0.1};
  const auto vf = pa::solve_bellman(pa::build_transition_model(ap, pool, suite, world.lws));
  const auto sim = pa::simulate_pa(ap, pool, suite, world.lws, 200000, 99);
  CHECK(std::fabs(sim.mean_reward - vf.at({0, 0})) < 5.0 * sim.std_error);
  CHECK(sim.mean_pitches > 1.0);
  CHECK(sim.std_error > 0.0);
  CHECK_THROWS_AS(pa::simulate_pa(ap, pool, suite, world.lws, 0, 1), ArgumentError);
}

TEST_CASE("approach value is reported relative to the baseline per 500 PA") {
  const auto world = synth::gen_pa_world(synth::PaWorldSpec{});
  const auto suite = synth::exact_suite(world);
  const auto pool = pa::precompute_pool(world.pool, world.models);
  const pa::ApproachVector base{0.0, 0.0}, ap{1.0, 0.0};
  const auto av = pa::approach_value(ap, base, pool, suite, world.lws);
  CHECK(av.relative_per_500 ==
        Catch::Approx((av.runs_per_pa - av.baseline_runs_per_pa) * 500.0).margin(1e-12));
  // the same approach as the baseline is exactly zero
  const auto self = pa::approach_value(base, base, pool, suite, world.lws);
  CHECK(self.relative_per_500 == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("approach grid spans the requested box") {
  const auto world = synth::gen_pa_world(synth::PaWorldSpec{});
  const auto suite = synth::exact_suite(world);
  const auto pool = pa::precompute_pool(world.pool, world.models);
  const auto grid = pa::approach_grid(-1.0, 1.0, -0.2, 0.2, 3, {0, 0}, pool, suite, world.lws);
  REQUIRE(grid.size() == 9);
  CHECK(grid.front().gamma_bs == -1.0);
  CHECK(grid.back().gamma_bs == 1.0);
  CHECK(grid.front().gamma_sl == -0.2);
  CHECK(grid.back().gamma_sl == 0.2);
  CHECK_THROWS_AS(pa::approach_grid(0, 1, 0, 1, 0, {0, 0}, pool, suite, world.lws),
                  ArgumentError);

  // zero causal coefficients: the surface is exactly flat
  causal::CausalSuite zero;
  const auto flat = pa::approach_grid(-2.0, 2.0, -0.4, 0.4, 3, {0, 0}, pool, zero, world.lws);
  for (const auto& g : flat) CHECK(std::fabs(g.runs_per_500) < 1e-10);
}
