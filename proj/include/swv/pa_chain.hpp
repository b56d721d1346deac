#pragma once

#include <array>
#include <cmath>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "swv/causal.hpp"
#include "swv/common.hpp"
#include "swv/outcome_models.hpp"
#include "swv/runexp.hpp"

// Plate-appearance Markov reward process: ball-strike counts as
// nonterminal states, pitch-outcome probabilities (approach-adjusted via
// the causal fits) aggregated over an empirical pitch pool, solved by
// Bellman iteration. A Monte Carlo simulator provides an independent
// oracle for the solver.

namespace swv::pa {

struct CountState {
  int balls = 0;    // 0..3
  int strikes = 0;  // 0..2

  int index() const { return balls * 3 + strikes; }
  static CountState from_index(int i) { return {i / 3, i % 3}; }
  bool operator==(const CountState&) const = default;
};

inline constexpr int kNumCounts = 12;

enum class Terminal { Strikeout, Walk, HitByPitch, FairBall };
inline constexpr int kNumTerminals = 4;

// successor indices: 0..11 counts, 12..15 terminals
inline constexpr int kNumSuccessors = kNumCounts + kNumTerminals;
inline int terminal_index(Terminal t) { return kNumCounts + static_cast<int>(t); }

struct ApproachVector {
  double gamma_bs = 0.0;  // mph per strike
  double gamma_sl = 0.0;  // feet per strike
};

using Successor = std::variant<CountState, Terminal>;

// Deterministic count transition given a pitch outcome.
inline Successor count_transition(CountState s, PitchOutcome outcome) {
  switch (outcome) {
    case PitchOutcome::HitByPitch:
      return Terminal::HitByPitch;
    case PitchOutcome::CalledBall:
      if (s.balls == 3) return Terminal::Walk;
      return CountState{s.balls + 1, s.strikes};
    case PitchOutcome::CalledStrike:
    case PitchOutcome::SwingingStrike:
      if (s.strikes == 2) return Terminal::Strikeout;
      return CountState{s.balls, s.strikes + 1};
    case PitchOutcome::FoulBall:
      if (s.strikes == 2) return s;  // the two-strike foul self-loop
      return CountState{s.balls, s.strikes + 1};
    case PitchOutcome::FairBall:
      return Terminal::FairBall;
  }
  throw ArgumentError("bad outcome");
}

inline int successor_index(const Successor& s) {
  if (std::holds_alternative<CountState>(s)) return std::get<CountState>(s).index();
  return terminal_index(std::get<Terminal>(s));
}

// One pool pitch pushed through the raw component models; everything the
// chain needs that does not depend on the approach.
struct PitchProbs {
  CountState count;
  double p_swing = 0.0;      // {A}
  double p_hbp = 0.0;        // {B}, given take
  double p_strike = 0.0;     // {D}, given called
  double raw_contact = 0.5;  // {C}, before adjustment, clipped
  double raw_fair = 0.5;     // {E}, before adjustment, clipped
  double raw_xlw = 0.0;      // {F}, before adjustment
};

struct PoolPitch {
  CountState count;
  std::array<double, outcome::kNumPitchFeatures> features;
};

inline PitchProbs precompute_pitch(const PoolPitch& p, const outcome::PitchModelSet& models) {
  std::array<double, outcome::kNumPitchFeatures> x = p.features;
  x[0] = p.count.balls;
  x[1] = p.count.strikes;
  PitchProbs out;
  out.count = p.count;
  out.p_swing = models.a(x);
  out.p_hbp = models.b(x);
  out.p_strike = models.d(x);
  out.raw_contact = clip(models.c(x), gbm::kProbClip, 1.0 - gbm::kProbClip);
  out.raw_fair = clip(models.e(x), gbm::kProbClip, 1.0 - gbm::kProbClip);
  out.raw_xlw = models.f(x);
  return out;
}

inline std::vector<PitchProbs> precompute_pool(const std::vector<PoolPitch>& pool,
                                               const outcome::PitchModelSet& models) {
  std::vector<PitchProbs> out;
  out.reserve(pool.size());
  for (const auto& p : pool) out.push_back(precompute_pitch(p, models));
  return out;
}

struct PitchTransition {
  std::array<double, kNumSuccessors> prob{};
  double fair_reward = 0.0;  // E[xLW | fair ball] for this pitch, adjusted
};

// Outcome distribution of one pitch under an approach: the Eq. (3)-(5)
// adjustments move {C}, {E}, {F}; {A}, {B}, {D} are approach-free.
inline PitchTransition pitch_transition(const PitchProbs& p, const ApproachVector& approach,
                                        const causal::CausalSuite& fits) {
  const auto adjust = [&](double p_raw, const causal::CausalFit& fit) {
    return sigmoid(logit(p_raw) + fit.intercept + fit.beta_bs * approach.gamma_bs +
                   fit.beta_sl * approach.gamma_sl);
  };
  const double p_contact = adjust(p.raw_contact, fits.contact);
  const double p_fair = adjust(p.raw_fair, fits.fair);

  PitchTransition out;
  out.fair_reward = p.raw_xlw + fits.xlw.intercept + fits.xlw.beta_bs * approach.gamma_bs +
                    fits.xlw.beta_sl * approach.gamma_sl;

  const CountState s = p.count;
  const auto add = [&](PitchOutcome o, double prob) {
    out.prob[static_cast<std::size_t>(successor_index(count_transition(s, o)))] += prob;
  };
  add(PitchOutcome::HitByPitch, (1.0 - p.p_swing) * p.p_hbp);
  add(PitchOutcome::CalledStrike, (1.0 - p.p_swing) * (1.0 - p.p_hbp) * p.p_strike);
  add(PitchOutcome::CalledBall, (1.0 - p.p_swing) * (1.0 - p.p_hbp) * (1.0 - p.p_strike));
  add(PitchOutcome::SwingingStrike, p.p_swing * (1.0 - p_contact));
  add(PitchOutcome::FoulBall, p.p_swing * p_contact * (1.0 - p_fair));
  add(PitchOutcome::FairBall, p.p_swing * p_contact * p_fair);
  return out;
}

// Feature-level convenience overload.
inline PitchTransition pitch_transition(CountState s, std::span<const double> features,
                                        const ApproachVector& approach,
                                        const outcome::PitchModelSet& models,
                                        const causal::CausalSuite& fits) {
  if (features.size() != outcome::kNumPitchFeatures) {
    throw ArgumentError("pitch_transition: need 14 features");
  }
  PoolPitch p;
  p.count = s;
  std::copy(features.begin(), features.end(), p.features.begin());
  return pitch_transition(precompute_pitch(p, models), approach, fits);
}

struct TransitionModel {
  // row-stochastic: [count][successor]
  std::array<std::array<double, kNumSuccessors>, kNumCounts> q{};
  std::array<double, kNumCounts> fair_reward{};  // LW(FairBall | s, approach)
  double lw_strikeout = -0.27;
  double lw_walk = 0.33;
  double lw_hbp = 0.36;

  double terminal_reward(CountState s, Terminal t) const {
    switch (t) {
      case Terminal::Strikeout: return lw_strikeout;
      case Terminal::Walk: return lw_walk;
      case Terminal::HitByPitch: return lw_hbp;
      case Terminal::FairBall: return fair_reward[static_cast<std::size_t>(s.index())];
    }
    throw ArgumentError("bad terminal");
  }
};

// Empirical mean of per-pitch transitions and fair rewards over the
// pitches thrown in count s (fixed-order pairwise reduction).
inline void aggregate_transition(CountState s, const ApproachVector& approach,
                                 const std::vector<PitchProbs>& pool,
                                 const causal::CausalSuite& fits, TransitionModel& model) {
  std::array<std::vector<double>, kNumSuccessors> probs;
  std::vector<double> rewards;
  for (const auto& p : pool) {
    if (!(p.count == s)) continue;
    const auto tr = pitch_transition(p, approach, fits);
    for (int k = 0; k < kNumSuccessors; ++k) {
      probs[static_cast<std::size_t>(k)].push_back(tr.prob[static_cast<std::size_t>(k)]);
    }
    rewards.push_back(tr.fair_reward);
  }
  if (rewards.empty()) {
    throw ArgumentError("aggregate_transition: no pitches in count " + std::to_string(s.balls) +
                        "-" + std::to_string(s.strikes));
  }
  auto& row = model.q[static_cast<std::size_t>(s.index())];
  for (int k = 0; k < kNumSuccessors; ++k) {
    row[static_cast<std::size_t>(k)] = mean(probs[static_cast<std::size_t>(k)]);
  }
  model.fair_reward[static_cast<std::size_t>(s.index())] = mean(rewards);
}

inline TransitionModel build_transition_model(const ApproachVector& approach,
                                              const std::vector<PitchProbs>& pool,
                                              const causal::CausalSuite& fits,
                                              const runexp::LinearWeights& lws) {
  TransitionModel model;
  model.lw_strikeout = lws.at(runexp::PaOutcome::Strikeout);
  model.lw_walk = lws.at(runexp::PaOutcome::Walk);
  model.lw_hbp = lws.at(runexp::PaOutcome::HitByPitch);
  for (int i = 0; i < kNumCounts; ++i) {
    aggregate_transition(CountState::from_index(i), approach, pool, fits, model);
  }
  return model;
}

struct ValueFunction {
  std::array<double, kNumCounts> value{};
  int iterations = 0;

  double at(CountState s) const { return value[static_cast<std::size_t>(s.index())]; }
};

// Value iteration from V = 0 until max |dV| < 1e-10. The two-strike foul
// self-loop is the only cycle; its probability must stay below 1.
inline ValueFunction solve_bellman(const TransitionModel& model, double tol = 1e-10,
                                   int max_iter = 500) {
  for (int i = 0; i < kNumCounts; ++i) {
    if (model.q[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] >= 1.0 - 1e-9) {
      throw ArgumentError("solve_bellman: self-loop probability too close to 1");
    }
  }
  ValueFunction vf;
  std::array<double, kNumCounts> next{};
  for (int iter = 0; iter < max_iter; ++iter) {
    double max_delta = 0.0;
    for (int i = 0; i < kNumCounts; ++i) {
      const CountState s = CountState::from_index(i);
      const auto& row = model.q[static_cast<std::size_t>(i)];
      double v = 0.0;
      for (int k = 0; k < kNumCounts; ++k) {
        v += row[static_cast<std::size_t>(k)] * vf.value[static_cast<std::size_t>(k)];
      }
      for (int t = 0; t < kNumTerminals; ++t) {
        v += row[static_cast<std::size_t>(kNumCounts + t)] *
             model.terminal_reward(s, static_cast<Terminal>(t));
      }
      next[static_cast<std::size_t>(i)] = v;
      max_delta = std::max(max_delta, std::fabs(v - vf.value[static_cast<std::size_t>(i)]));
    }
    vf.value = next;
    vf.iterations = iter + 1;
    if (max_delta < tol) return vf;
  }
  throw ArgumentError("solve_bellman: no convergence within iteration limit");
}

// Direct linear solve (I - Q) V = R; oracle for value iteration.
inline ValueFunction solve_linear(const TransitionModel& model) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(kNumCounts, kNumCounts);
  Eigen::VectorXd r(kNumCounts);
  for (int i = 0; i < kNumCounts; ++i) {
    const CountState s = CountState::from_index(i);
    const auto& row = model.q[static_cast<std::size_t>(i)];
    for (int k = 0; k < kNumCounts; ++k) a(i, k) -= row[static_cast<std::size_t>(k)];
    double rew = 0.0;
    for (int t = 0; t < kNumTerminals; ++t) {
      rew += row[static_cast<std::size_t>(kNumCounts + t)] *
             model.terminal_reward(s, static_cast<Terminal>(t));
    }
    r(i) = rew;
  }
  const Eigen::VectorXd v = a.partialPivLu().solve(r);
  ValueFunction vf;
  for (int i = 0; i < kNumCounts; ++i) vf.value[static_cast<std::size_t>(i)] = v(i);
  return vf;
}

struct ApproachValue {
  double runs_per_pa = 0.0;           // V(0,0) under the approach
  double baseline_runs_per_pa = 0.0;  // V(0,0) under the baseline approach
  double relative_per_500 = 0.0;      // (V - V_baseline) * 500
};

// Run value of an approach: V(0-0) under the approach-adjusted transition
// model, reported relative to the baseline (average) approach per 500 PA.
inline ApproachValue approach_value(const ApproachVector& approach,
                                    const ApproachVector& baseline,
                                    const std::vector<PitchProbs>& pool,
                                    const causal::CausalSuite& fits,
                                    const runexp::LinearWeights& lws) {
  const auto vf = solve_bellman(build_transition_model(approach, pool, fits, lws));
  const auto vf0 = solve_bellman(build_transition_model(baseline, pool, fits, lws));
  ApproachValue out;
  out.runs_per_pa = vf.at({0, 0});
  out.baseline_runs_per_pa = vf0.at({0, 0});
  out.relative_per_500 = (out.runs_per_pa - out.baseline_runs_per_pa) * 500.0;
  return out;
}

struct GridPoint {
  double gamma_bs = 0.0;
  double gamma_sl = 0.0;
  double runs_per_500 = 0.0;  // relative to baseline
};

inline std::vector<GridPoint> approach_grid(double bs_lo, double bs_hi, double sl_lo,
                                            double sl_hi, int resolution,
                                            const ApproachVector& baseline,
                                            const std::vector<PitchProbs>& pool,
                                            const causal::CausalSuite& fits,
                                            const runexp::LinearWeights& lws) {
  if (resolution < 1) throw ArgumentError("approach_grid: resolution >= 1");
  const auto vf0 = solve_bellman(build_transition_model(baseline, pool, fits, lws));
  const double v0 = vf0.at({0, 0});
  std::vector<GridPoint> out;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      GridPoint g;
      g.gamma_bs = resolution == 1 ? bs_lo : bs_lo + (bs_hi - bs_lo) * i / (resolution - 1);
      g.gamma_sl = resolution == 1 ? sl_lo : sl_lo + (sl_hi - sl_lo) * j / (resolution - 1);
      const auto vf =
          solve_bellman(build_transition_model({g.gamma_bs, g.gamma_sl}, pool, fits, lws));
      g.runs_per_500 = (vf.at({0, 0}) - v0) * 500.0;
      out.push_back(g);
    }
  }
  return out;
}

struct SimResult {
  double mean_reward = 0.0;
  double std_error = 0.0;
  double mean_pitches = 0.0;
};

// Monte Carlo oracle: draw a pitch uniformly from the count-matched pool,
// sample the outcome from its adjusted probabilities, and on a fair ball
// award the count-level reward LW(FairBall | s, approach) so the simulated
// process is exactly the Markov reward process being solved.
inline SimResult simulate_pa(const ApproachVector& approach, const std::vector<PitchProbs>& pool,
                             const causal::CausalSuite& fits, const runexp::LinearWeights& lws,
                             std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("simulate_pa: n >= 1");
  const TransitionModel model = build_transition_model(approach, pool, fits, lws);

  // count-indexed pools with precomputed transitions
  std::array<std::vector<PitchTransition>, kNumCounts> by_count;
  for (const auto& p : pool) {
    by_count[static_cast<std::size_t>(p.count.index())].push_back(
        pitch_transition(p, approach, fits));
  }

  Rng rng(seed);
  double sum = 0.0, sumsq = 0.0;
  std::size_t total_pitches = 0;
  for (std::size_t pa = 0; pa < n; ++pa) {
    CountState s{0, 0};
    double reward = 0.0;
    for (;;) {
      const auto& cell = by_count[static_cast<std::size_t>(s.index())];
      const PitchTransition& tr = cell[rng.uniform_int(cell.size())];
      ++total_pitches;
      double u = rng.uniform();
      int succ = kNumSuccessors - 1;
      for (int k = 0; k < kNumSuccessors; ++k) {
        u -= tr.prob[static_cast<std::size_t>(k)];
        if (u < 0.0) {
          succ = k;
          break;
        }
      }
      if (succ < kNumCounts) {
        s = CountState::from_index(succ);
        continue;
      }
      reward = model.terminal_reward(s, static_cast<Terminal>(succ - kNumCounts));
      break;
    }
    sum += reward;
    sumsq += reward * reward;
  }
  SimResult out;
  out.mean_reward = sum / static_cast<double>(n);
  const double var =
      std::max(sumsq / static_cast<double>(n) - out.mean_reward * out.mean_reward, 0.0);
  out.std_error = std::sqrt(var / static_cast<double>(n));
  out.mean_pitches = static_cast<double>(total_pitches) / static_cast<double>(n);
  return out;
}

}  // namespace swv::pa
