#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "swv/causal.hpp"
#include "swv/common.hpp"
#include "swv/hier/fit.hpp"
#include "swv/ingest.hpp"
#include "swv/outcome_models.hpp"
#include "swv/pa_chain.hpp"
#include "swv/records.hpp"
#include "swv/runexp.hpp"
#include "swv/skew_normal.hpp"

// Synthetic worlds with known ground truth. Every generator is a pure
// function of (spec, seed); the realized latent truth is returned alongside
// the data so recovery can be scored without re-deriving anything.

namespace swv::synth {

inline std::string padded_id(const char* prefix, int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s%04d", prefix, i);
  return buf;
}

// ---------------------------------------------------------------------------
// Intention-model worlds (generative direction of the hierarchical model)

struct ResponseTruth {
  double mu0 = 70.0;
  double beta_balls = 0.3;
  double beta_strikes = -1.0;
  double beta_loc_x = 0.5;
  double beta_loc_z = 0.8;
  double sigma = 4.0;                       // skew-normal scale
  double alpha0 = 0.0;                      // 0 => Gaussian residuals
  double sigma_p = 1.0;                     // pitcher intercept sd
  std::array<double, 4> sd_b = {3.0, 0.5, 0.3, 0.3};  // intercept, strikes, loc_x, loc_z
  double tau = 0.0;                         // batter shape-effect sd

  void validate() const {
    if (!(sigma > 0.0)) throw ArgumentError("ResponseTruth: sigma must be > 0");
    if (sigma_p < 0.0 || tau < 0.0) throw ArgumentError("ResponseTruth: sds must be >= 0");
    for (double s : sd_b) {
      if (s < 0.0) throw ArgumentError("ResponseTruth: sds must be >= 0");
    }
  }
};

struct IntentionSpec {
  int n_batters = 50;
  int n_pitchers = 20;
  int swings_per_batter = 100;
  ResponseTruth bat_speed;
  ResponseTruth swing_length{2.4, 0.02, 0.25, 0.05, 0.08, 0.4, 0.0,
                             0.15, {0.35, 0.12, 0.05, 0.05}, 0.0};
  std::uint64_t seed = 1;

  void validate() const {
    if (n_batters < 1 || n_pitchers < 1 || swings_per_batter < 1) {
      throw ArgumentError("IntentionSpec: league sizes must be positive");
    }
    bat_speed.validate();
    swing_length.validate();
  }
};

// Realized latent effects, keyed by entity id.
struct RealizedEffects {
  std::map<std::string, double> gamma_p;
  std::map<std::string, std::array<double, 4>> u_b;  // intercept, strikes, loc_x, loc_z
  std::map<std::string, double> nu_b;
};

struct IntentionWorld {
  // paired per swing: same covariates, independent responses
  std::vector<IntentionObservation> bat_speed_obs;
  std::vector<IntentionObservation> swing_length_obs;
  RealizedEffects bat_speed_truth;
  RealizedEffects swing_length_truth;
};

namespace detail {

inline RealizedEffects draw_effects(const ResponseTruth& t, int n_batters, int n_pitchers,
                                    Rng& rng) {
  RealizedEffects e;
  for (int p = 0; p < n_pitchers; ++p) {
    e.gamma_p[padded_id("P", p)] = t.sigma_p * rng.normal();
  }
  for (int b = 0; b < n_batters; ++b) {
    const std::string id = padded_id("B", b);
    std::array<double, 4> u{};
    for (int k = 0; k < 4; ++k) u[static_cast<std::size_t>(k)] = t.sd_b[static_cast<std::size_t>(k)] * rng.normal();
    e.u_b[id] = u;
    e.nu_b[id] = t.tau * rng.normal();
  }
  return e;
}

inline double draw_response(const ResponseTruth& t, const RealizedEffects& e,
                            const IntentionObservation& o, Rng& rng) {
  const auto& u = e.u_b.at(o.batter_id);
  const double mu = t.mu0 + e.gamma_p.at(o.pitcher_id) + u[0] + t.beta_balls * o.balls +
                    (t.beta_strikes + u[1]) * o.strikes + (t.beta_loc_x + u[2]) * o.loc_x +
                    (t.beta_loc_z + u[3]) * o.loc_z;
  const double alpha = t.alpha0 + e.nu_b.at(o.batter_id);
  return sn::sample_one(sn::from_mean(mu, t.sigma, alpha), rng);
}

}  // namespace detail

// Eq.-(2) generative direction: uniform counts, Gaussian locations,
// round-robin pitcher assignment, skew-normal responses about the
// intended mean.
inline IntentionWorld gen_intention_data(const IntentionSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  IntentionWorld w;
  w.bat_speed_truth = detail::draw_effects(spec.bat_speed, spec.n_batters, spec.n_pitchers, rng);
  w.swing_length_truth =
      detail::draw_effects(spec.swing_length, spec.n_batters, spec.n_pitchers, rng);

  for (int b = 0; b < spec.n_batters; ++b) {
    const std::string batter = padded_id("B", b);
    for (int s = 0; s < spec.swings_per_batter; ++s) {
      IntentionObservation o;
      o.batter_id = batter;
      o.pitcher_id = padded_id("P", static_cast<int>(rng.uniform_int(
                                        static_cast<std::size_t>(spec.n_pitchers))));
      o.balls = static_cast<int>(rng.uniform_int(4));
      o.strikes = static_cast<int>(rng.uniform_int(3));
      o.loc_x = 0.6 * rng.normal();
      o.loc_z = 2.5 + 0.5 * rng.normal();
      o.response = detail::draw_response(spec.bat_speed, w.bat_speed_truth, o, rng);
      w.bat_speed_obs.push_back(o);
      o.response = detail::draw_response(spec.swing_length, w.swing_length_truth, o, rng);
      w.swing_length_obs.push_back(o);
    }
  }
  return w;
}

// Render an intention world as pitch records the ingest module accepts
// unchanged: squared-up fouls against every pitcher's primary fastball.
inline std::vector<PitchRecord> to_pitch_records(const IntentionWorld& w) {
  std::vector<PitchRecord> out;
  out.reserve(w.bat_speed_obs.size());
  for (std::size_t i = 0; i < w.bat_speed_obs.size(); ++i) {
    const auto& bs = w.bat_speed_obs[i];
    const auto& sl = w.swing_length_obs[i];
    PitchRecord r;
    r.game_id = "G0001";
    r.batter_id = bs.batter_id;
    r.pitcher_id = bs.pitcher_id;
    r.batter_side = Side::Right;
    r.pitcher_side = Side::Right;
    r.balls = bs.balls;
    r.strikes = bs.strikes;
    r.pitch_type = "four_seam";
    r.plate_x = ingest::mirror_loc_x(bs.loc_x, r.batter_side);  // involution
    r.plate_z = bs.loc_z;
    r.vel_at_plate = {0.0, -130.0, -10.0};  // ~89 mph at the plate
    r.acc_at_plate = {0.0, 25.0, -20.0};
    r.extension = 6.5;
    r.sz_top = 3.4;
    r.sz_bot = 1.6;
    r.outcome = PitchOutcome::FoulBall;
    r.bat_speed = bs.response;
    r.swing_length = sl.response;
    // comfortably above the squared-up threshold for any plausible bat speed
    r.exit_speed = ingest::kBatSpeedCoef * bs.response + ingest::kPitchSpeedCoef * 88.7;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stub plate-appearance worlds (closed-form {A..F}, planted causal truths)

// Logistic (or affine, for {F}) surface over balls, strikes, plate_x,
// plate_z; the closed-form stand-in for a trained ensemble.
struct StubSurface {
  double c0 = 0.0;
  double w_balls = 0.0;
  double w_strikes = 0.0;
  double w_x = 0.0;
  double w_z = 0.0;
  bool logistic = true;
  double floor = 0.05;  // probability floor/ceiling keeps the chain mixing
  double ceil = 0.95;

  double operator()(std::span<const double> x) const {
    const double eta = c0 + w_balls * x[0] + w_strikes * x[1] + w_x * x[5] + w_z * x[6];
    if (!logistic) return eta;
    return floor + (ceil - floor) * sigmoid(eta);
  }
};

struct PlantedCausal {
  double intercept = 0.0;
  double beta_bs = 0.0;  // per mph
  double beta_sl = 0.0;  // per foot
};

struct PaWorldSpec {
  int pool_per_count = 40;
  int n_batters = 60;
  int swings_per_batter = 200;
  PlantedCausal contact{0.1, -0.18, -0.048};  // -0.004 per inch
  PlantedCausal fair{0.05, -0.02, -0.01};
  PlantedCausal xlw{0.01, 0.022, 0.0};
  double xlw_noise_sd = 0.15;
  double gamma_bs_sd = 1.5;   // instrument spread across batters, mph
  double gamma_sl_sd = 0.25;  // feet
  std::uint64_t seed = 1;

  void validate() const {
    if (pool_per_count < 1 || n_batters < 2 || swings_per_batter < 1) {
      throw ArgumentError("PaWorldSpec: sizes must be positive");
    }
    if (xlw_noise_sd < 0.0 || gamma_bs_sd < 0.0 || gamma_sl_sd < 0.0) {
      throw ArgumentError("PaWorldSpec: sds must be >= 0");
    }
  }
};

struct PaWorld {
  outcome::PitchModelSet models;  // closed-form {A..F}
  std::vector<pa::PoolPitch> pool;
  std::vector<hier::BatterApproach> approaches;  // instruments, known exactly
  std::vector<causal::SwingRow> swings;          // outcomes from Eqs. (3)-(5)
  PlantedCausal contact_truth, fair_truth, xlw_truth;
  runexp::LinearWeights lws = runexp::default_linear_weights();
};

namespace detail {

inline StubSurface random_surface(Rng& rng, double c0_center, bool logistic = true) {
  StubSurface s;
  s.c0 = c0_center + rng.uniform(-0.5, 0.5);
  s.w_balls = rng.uniform(-0.3, 0.3);
  s.w_strikes = rng.uniform(-0.3, 0.3);
  s.w_x = rng.uniform(-0.4, 0.4);
  s.w_z = rng.uniform(-0.3, 0.3);
  s.logistic = logistic;
  return s;
}

inline std::array<double, outcome::kNumPitchFeatures> random_pitch_features(int balls, int strikes,
                                                                            Rng& rng) {
  std::array<double, outcome::kNumPitchFeatures> x{};
  x[0] = balls;
  x[1] = strikes;
  x[2] = rng.uniform() < 0.5 ? 0.0 : 1.0;  // batter side
  x[3] = 3.4 + 0.1 * rng.normal();         // sz_top
  x[4] = 1.6 + 0.1 * rng.normal();         // sz_bot
  x[5] = 0.7 * rng.normal();               // plate_x
  x[6] = 2.4 + 0.6 * rng.normal();         // plate_z
  x[7] = 5.0 * rng.normal();               // vx
  x[8] = -130.0 + 8.0 * rng.normal();      // vy
  x[9] = -8.0 + 3.0 * rng.normal();        // vz
  x[10] = 8.0 * rng.normal();              // ax
  x[11] = 25.0 + 3.0 * rng.normal();       // ay
  x[12] = -18.0 + 6.0 * rng.normal();      // az
  x[13] = 6.4 + 0.3 * rng.normal();        // extension
  return x;
}

}  // namespace detail

// Random smooth stub world: closed-form components, a count-stratified
// pitch pool, per-batter instruments, and swing outcomes simulated from
// Eqs. (3)-(5) with the planted coefficients.
inline PaWorld gen_pa_world(const PaWorldSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  PaWorld w;
  w.contact_truth = spec.contact;
  w.fair_truth = spec.fair;
  w.xlw_truth = spec.xlw;

  const StubSurface a = detail::random_surface(rng, 0.0);
  const StubSurface b = detail::random_surface(rng, -4.5);  // HBP is rare
  const StubSurface c = detail::random_surface(rng, 1.2);
  const StubSurface d = detail::random_surface(rng, 0.0);
  const StubSurface e = detail::random_surface(rng, 0.4);
  StubSurface f = detail::random_surface(rng, 0.0, /*logistic=*/false);
  f.c0 = rng.uniform(-0.1, 0.1);
  f.w_balls = rng.uniform(-0.02, 0.02);
  f.w_strikes = rng.uniform(-0.02, 0.02);
  f.w_x = rng.uniform(-0.05, 0.05);
  f.w_z = rng.uniform(-0.05, 0.05);
  w.models = outcome::PitchModelSet{a, b, c, d, e, f};

  for (int count = 0; count < pa::kNumCounts; ++count) {
    const auto s = pa::CountState::from_index(count);
    for (int i = 0; i < spec.pool_per_count; ++i) {
      w.pool.push_back({s, detail::random_pitch_features(s.balls, s.strikes, rng)});
    }
  }

  for (int bi = 0; bi < spec.n_batters; ++bi) {
    hier::BatterApproach ap;
    ap.batter_id = padded_id("B", bi);
    ap.gamma_bs = spec.gamma_bs_sd * rng.normal();
    ap.gamma_sl = spec.gamma_sl_sd * rng.normal();
    w.approaches.push_back(std::move(ap));
  }

  const auto adjust = [](double p_raw, const PlantedCausal& t, double gbs, double gsl) {
    return sigmoid(logit(clip(p_raw, gbm::kProbClip, 1.0 - gbm::kProbClip)) + t.intercept +
                   t.beta_bs * gbs + t.beta_sl * gsl);
  };
  for (const auto& ap : w.approaches) {
    for (int s = 0; s < spec.swings_per_batter; ++s) {
      const auto& pitch = w.pool[rng.uniform_int(w.pool.size())];
      causal::SwingRow row;
      row.instruments = {ap.gamma_bs, ap.gamma_sl};
      row.p_contact = clip(c(pitch.features), gbm::kProbClip, 1.0 - gbm::kProbClip);
      row.p_fair = clip(e(pitch.features), gbm::kProbClip, 1.0 - gbm::kProbClip);
      row.xlw_pred = f(pitch.features);
      row.contact =
          rng.uniform() < adjust(row.p_contact, spec.contact, ap.gamma_bs, ap.gamma_sl);
      if (row.contact) {
        row.fair = rng.uniform() < adjust(row.p_fair, spec.fair, ap.gamma_bs, ap.gamma_sl);
        if (row.fair) {
          row.xlw_label = row.xlw_pred + spec.xlw.intercept + spec.xlw.beta_bs * ap.gamma_bs +
                          spec.xlw.beta_sl * ap.gamma_sl + spec.xlw_noise_sd * rng.normal();
          row.has_xlw_label = true;
        }
      }
      w.swings.push_back(std::move(row));
    }
  }
  return w;
}

// The causal suite whose coefficients equal the planted truth exactly;
// lets pa_chain be exercised with no estimation error.
inline causal::CausalSuite exact_suite(const PaWorld& w) {
  causal::CausalSuite s;
  s.contact.tag = causal::ModelTag::Contact;
  s.contact.intercept = w.contact_truth.intercept;
  s.contact.beta_bs = w.contact_truth.beta_bs;
  s.contact.beta_sl = w.contact_truth.beta_sl;
  s.fair.tag = causal::ModelTag::Fair;
  s.fair.intercept = w.fair_truth.intercept;
  s.fair.beta_bs = w.fair_truth.beta_bs;
  s.fair.beta_sl = w.fair_truth.beta_sl;
  s.xlw.tag = causal::ModelTag::Xlw;
  s.xlw.intercept = w.xlw_truth.intercept;
  s.xlw.beta_bs = w.xlw_truth.beta_bs;
  s.xlw.beta_sl = w.xlw_truth.beta_sl;
  return s;
}

// ---------------------------------------------------------------------------
// Full outcome worlds: pitch records with sampled outcomes, suitable for
// training the {A..F} components and running the causal stage end-to-end.

struct OutcomeWorldSpec {
  int pitches_per_batter = 300;
  PlantedCausal contact{0.1, -0.18, -0.048};
  PlantedCausal fair{0.05, -0.02, -0.01};
  double exit_speed_per_mph = 1.2;  // xLW treatment path: approach -> exit speed
  std::uint64_t seed = 1;
};

// Pitch records for the given batters (whose true approaches drive the
// Eq. (3)-(4) adjustments), with outcomes sampled from the stub surfaces.
// pitch_type is a non-fastball so these rows never enter the intention
// dataset when concatenated with intention swings.
inline std::vector<PitchRecord> gen_outcome_pitches(const OutcomeWorldSpec& spec,
                                                    const outcome::PitchModelSet& models,
                                                    const std::vector<hier::BatterApproach>& batters) {
  if (spec.pitches_per_batter < 1) throw ArgumentError("OutcomeWorldSpec: sizes must be positive");
  Rng rng(spec.seed);
  const auto adjust = [](double p_raw, const PlantedCausal& t, double gbs, double gsl) {
    return sigmoid(logit(clip(p_raw, gbm::kProbClip, 1.0 - gbm::kProbClip)) + t.intercept +
                   t.beta_bs * gbs + t.beta_sl * gsl);
  };
  std::vector<PitchRecord> out;
  int pitcher = 0;
  for (const auto& ap : batters) {
    for (int i = 0; i < spec.pitches_per_batter; ++i) {
      const int balls = static_cast<int>(rng.uniform_int(4));
      const int strikes = static_cast<int>(rng.uniform_int(3));
      const auto x = detail::random_pitch_features(balls, strikes, rng);
      PitchRecord r;
      r.game_id = "G0002";
      r.batter_id = ap.batter_id;
      r.pitcher_id = padded_id("P", pitcher);
      pitcher = (pitcher + 1) % 16;
      r.batter_side = x[2] < 0.5 ? Side::Left : Side::Right;
      r.pitcher_side = Side::Right;
      r.balls = balls;
      r.strikes = strikes;
      r.pitch_type = "slider";
      r.plate_x = x[5];
      r.plate_z = x[6];
      r.sz_top = x[3];
      r.sz_bot = x[4];
      r.vel_at_plate = {x[7], x[8], x[9]};
      r.acc_at_plate = {x[10], x[11], x[12]};
      r.extension = x[13];

      const bool swing = rng.uniform() < models.a(x);
      if (!swing) {
        if (rng.uniform() < models.b(x)) {
          r.outcome = PitchOutcome::HitByPitch;
        } else {
          r.outcome = rng.uniform() < models.d(x) ? PitchOutcome::CalledStrike
                                                  : PitchOutcome::CalledBall;
        }
      } else {
        r.bat_speed = 70.0 + ap.gamma_bs * strikes + 2.0 * rng.normal();
        r.swing_length = 7.0 + ap.gamma_sl * strikes + 0.3 * rng.normal();
        const double p_con = adjust(models.c(x), spec.contact, ap.gamma_bs, ap.gamma_sl);
        if (rng.uniform() >= p_con) {
          r.outcome = PitchOutcome::SwingingStrike;
        } else {
          const double p_fair = adjust(models.e(x), spec.fair, ap.gamma_bs, ap.gamma_sl);
          if (rng.uniform() >= p_fair) {
            r.outcome = PitchOutcome::FoulBall;
          } else {
            r.outcome = PitchOutcome::FairBall;
            r.exit_speed = 88.0 + spec.exit_speed_per_mph * ap.gamma_bs + 6.0 * rng.normal();
            r.launch_angle = 14.0 + 22.0 * rng.normal();
            const double spray = 22.0 * rng.normal() * M_PI / 180.0;
            const double dist = 150.0 + 2.0 * (*r.exit_speed - 70.0) + 30.0 * rng.normal();
            double hx = dist * std::sin(spray);
            if (r.batter_side == Side::Right) hx = -hx;  // undo the mirror in spray_angle_deg
            r.hit_x = hx;
            r.hit_y = dist * std::cos(spray);
          }
        }
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

// Batted-ball category from hit properties: a deterministic rule so the
// hit outcome model has learnable structure and linear weights close the
// loop with the play-by-play generator.
inline runexp::PaOutcome hit_category(double exit_speed, double launch_angle, Rng& rng) {
  if (launch_angle < 0.0 || launch_angle > 50.0) return runexp::PaOutcome::OutInPlay;
  if (exit_speed > 100.0 && launch_angle > 20.0 && launch_angle < 35.0) {
    return runexp::PaOutcome::HomeRun;
  }
  if (exit_speed > 95.0 && launch_angle > 8.0 && launch_angle < 22.0) {
    return rng.uniform() < 0.5 ? runexp::PaOutcome::Double : runexp::PaOutcome::Single;
  }
  if (launch_angle < 12.0 && rng.uniform() < 0.35) return runexp::PaOutcome::Single;
  return runexp::PaOutcome::OutInPlay;
}

// ---------------------------------------------------------------------------
// Play-by-play generators (runexp oracles)

struct LeagueSpec {
  // PA outcome probabilities; must sum to <= 1 with the rest out-in-play.
  double p_strikeout = 0.22;
  double p_walk = 0.08;
  double p_hbp = 0.01;
  double p_single = 0.15;
  double p_double = 0.045;
  double p_triple = 0.004;
  double p_home_run = 0.03;
  std::size_t n_innings = 1000;
  std::uint64_t seed = 1;

  void validate() const {
    const double s = p_strikeout + p_walk + p_hbp + p_single + p_double + p_triple + p_home_run;
    for (double p : {p_strikeout, p_walk, p_hbp, p_single, p_double, p_triple, p_home_run}) {
      if (p < 0.0) throw ArgumentError("LeagueSpec: probabilities must be >= 0");
    }
    if (s > 1.0 + 1e-12) throw ArgumentError("LeagueSpec: probabilities exceed 1");
    if (n_innings < 1) throw ArgumentError("LeagueSpec: need at least one inning");
  }
};

namespace detail {

// Deterministic base advancement; returns the post state and runs scored.
inline std::pair<runexp::BaseOutState, int> advance(runexp::BaseOutState s,
                                                    runexp::PaOutcome o) {
  using runexp::PaOutcome;
  runexp::BaseOutState post = s;
  int runs = 0;
  switch (o) {
    case PaOutcome::Strikeout:
    case PaOutcome::OutInPlay:
      post.outs += 1;
      break;
    case PaOutcome::Walk:
    case PaOutcome::HitByPitch:
      if (s.first && s.second && s.third) runs = 1;
      post.third = s.third || (s.first && s.second);
      post.second = s.second || s.first;
      post.first = true;
      break;
    case PaOutcome::Single:
      runs = (s.third ? 1 : 0) + (s.second ? 1 : 0);
      post.third = false;
      post.second = s.first;
      post.first = true;
      break;
    case PaOutcome::Double:
      runs = (s.third ? 1 : 0) + (s.second ? 1 : 0) + (s.first ? 1 : 0);
      post.third = false;
      post.second = true;
      post.first = false;
      break;
    case PaOutcome::Triple:
      runs = (s.third ? 1 : 0) + (s.second ? 1 : 0) + (s.first ? 1 : 0);
      post.third = true;
      post.second = false;
      post.first = false;
      break;
    case PaOutcome::HomeRun:
      runs = 1 + (s.third ? 1 : 0) + (s.second ? 1 : 0) + (s.first ? 1 : 0);
      post.third = post.second = post.first = false;
      break;
    case PaOutcome::Other:
      break;
  }
  if (post.terminal()) post.first = post.second = post.third = false;
  return {post, runs};
}

}  // namespace detail

// Simulate complete innings from the outcome distribution with the
// documented deterministic advancement rules.
inline std::vector<runexp::PlayEvent> gen_playbyplay(const LeagueSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<runexp::PlayEvent> events;
  const std::array<std::pair<runexp::PaOutcome, double>, 7> dist = {{
      {runexp::PaOutcome::Strikeout, spec.p_strikeout},
      {runexp::PaOutcome::Walk, spec.p_walk},
      {runexp::PaOutcome::HitByPitch, spec.p_hbp},
      {runexp::PaOutcome::Single, spec.p_single},
      {runexp::PaOutcome::Double, spec.p_double},
      {runexp::PaOutcome::Triple, spec.p_triple},
      {runexp::PaOutcome::HomeRun, spec.p_home_run},
  }};
  for (std::size_t inning = 0; inning < spec.n_innings; ++inning) {
    runexp::BaseOutState s;
    const std::string id = "I" + std::to_string(inning);
    while (!s.terminal()) {
      double u = rng.uniform();
      runexp::PaOutcome o = runexp::PaOutcome::OutInPlay;
      for (const auto& [cand, p] : dist) {
        u -= p;
        if (u < 0.0) {
          o = cand;
          break;
        }
      }
      const auto [post, runs] = detail::advance(s, o);
      events.push_back({id, s, post, runs, o});
      s = post;
    }
  }
  return events;
}

// Two-outcome league: home run with probability p, strikeout otherwise.
// RE(any base state, k outs) = p/(1-p) * (3-k) + runners·p·(... ) has a
// simple closed form because every PA either scores everyone + batter or
// records an out while runners hold.
inline std::vector<runexp::PlayEvent> gen_two_outcome_innings(double p_hr, std::size_t n_innings,
                                                              std::uint64_t seed) {
  LeagueSpec spec;
  spec.p_strikeout = 1.0 - p_hr;
  spec.p_walk = spec.p_hbp = spec.p_single = spec.p_double = spec.p_triple = 0.0;
  spec.p_home_run = p_hr;
  spec.n_innings = n_innings;
  spec.seed = seed;
  return gen_playbyplay(spec);
}

// Closed-form RE(empty, outs) for the two-outcome league: expected HRs
// before (3 - outs) strikeouts, i.e. negative-binomial mean.
inline double two_outcome_re(double p_hr, int outs) {
  return p_hr / (1.0 - p_hr) * (3 - outs);
}

}  // namespace swv::synth
