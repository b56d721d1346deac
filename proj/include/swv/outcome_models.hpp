#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "swv/gbm.hpp"
#include "swv/records.hpp"
#include "swv/runexp.hpp"

// Hit outcome model (xLW) and the six pitch-outcome component models:
//   {A} P(swing)                     {B} P(HBP | take)
//   {C} P(contact | swing)           {D} P(strike | called pitch)
//   {E} P(fair | contact)            {F} E[xLW | fair]

namespace swv::outcome {

// Pitch feature vector: 5 contextual + 9 trajectory features, fixed order.
inline const std::vector<std::string>& pitch_feature_names() {
  static const std::vector<std::string> names = {
      "balls", "strikes", "batter_side", "sz_top", "sz_bot", "plate_x", "plate_z",
      "vx",    "vy",      "vz",          "ax",     "ay",     "az",      "extension"};
  return names;
}
inline constexpr std::size_t kNumPitchFeatures = 14;

inline std::array<double, kNumPitchFeatures> pitch_features(const PitchRecord& r) {
  return {static_cast<double>(r.balls),
          static_cast<double>(r.strikes),
          r.batter_side == Side::Right ? 1.0 : 0.0,
          r.sz_top,
          r.sz_bot,
          r.plate_x,
          r.plate_z,
          r.vel_at_plate[0],
          r.vel_at_plate[1],
          r.vel_at_plate[2],
          r.acc_at_plate[0],
          r.acc_at_plate[1],
          r.acc_at_plate[2],
          r.extension};
}

// Horizontal exit direction from hit coordinates: 0 = straight-away center
// field, positive toward the batter's pull side.
inline double spray_angle_deg(double hit_x, double hit_y, Side batter_side) {
  const double a = std::atan2(hit_x, hit_y) * 180.0 / M_PI;
  return batter_side == Side::Right ? -a : a;
}

inline const std::vector<std::string>& hit_feature_names() {
  static const std::vector<std::string> names = {"exit_speed", "launch_angle", "spray_angle"};
  return names;
}

struct HitTrainingRow {
  double exit_speed;
  double launch_angle;
  double spray_angle;
  double delta_re;  // label: change in base-out run expectancy
};

inline gbm::TrainConfig hit_outcome_config() {
  gbm::TrainConfig cfg;
  cfg.nrounds = 1000;
  cfg.eta = 0.05;
  cfg.max_depth = 9;
  cfg.min_child_weight = 100.0;
  cfg.loss = gbm::Loss::Squared;
  return cfg;
}

inline gbm::Ensemble train_hit_outcome(const std::vector<HitTrainingRow>& rows,
                                       gbm::TrainConfig cfg = hit_outcome_config()) {
  gbm::Matrix x;
  x.n_cols = 3;
  std::vector<double> y;
  for (const auto& r : rows) {
    x.data.insert(x.data.end(), {r.exit_speed, r.launch_angle, r.spray_angle});
    ++x.n_rows;
    y.push_back(r.delta_re);
  }
  return gbm::train(x, y, cfg, hit_feature_names());
}

enum class Component { A, B, C, D, E, F };

inline gbm::TrainConfig component_config(Component c) {
  gbm::TrainConfig cfg;
  cfg.loss = gbm::Loss::Logistic;
  switch (c) {
    case Component::A: cfg.nrounds = 1500; cfg.eta = 0.05; cfg.max_depth = 9; cfg.min_child_weight = 10; break;
    case Component::B: cfg.nrounds = 400;  cfg.eta = 0.05; cfg.max_depth = 6; cfg.min_child_weight = 10; break;
    case Component::C: cfg.nrounds = 1000; cfg.eta = 0.01; cfg.max_depth = 6; cfg.min_child_weight = 100; break;
    case Component::D: cfg.nrounds = 2000; cfg.eta = 0.01; cfg.max_depth = 9; cfg.min_child_weight = 10; break;
    case Component::E: cfg.nrounds = 1500; cfg.eta = 0.01; cfg.max_depth = 9; cfg.min_child_weight = 100; break;
    case Component::F:
      cfg.nrounds = 1000; cfg.eta = 0.01; cfg.max_depth = 6; cfg.min_child_weight = 100;
      cfg.loss = gbm::Loss::Squared;
      break;
  }
  return cfg;
}

// Six component predictors over the 14 pitch features. Backed by trained
// ensembles in production and by closed-form stubs in synthetic worlds.
struct PitchModelSet {
  using Predictor = std::function<double(std::span<const double>)>;
  Predictor a, b, c, d, e, f;

  double component(Component which, std::span<const double> x) const {
    switch (which) {
      case Component::A: return a(x);
      case Component::B: return b(x);
      case Component::C: return c(x);
      case Component::D: return d(x);
      case Component::E: return e(x);
      case Component::F: return f(x);
    }
    throw ArgumentError("bad component");
  }
};

struct TrainedPitchModels {
  gbm::Ensemble a, b, c, d, e, f;

  PitchModelSet as_model_set() const {
    auto wrap = [](const gbm::Ensemble& ens) {
      return [&ens](std::span<const double> x) { return ens.predict(x); };
    };
    return PitchModelSet{wrap(a), wrap(b), wrap(c), wrap(d), wrap(e), wrap(f)};
  }
};

// Per-pitch predictions consumed by the causal module.
struct PitchOutcomePredictions {
  double p_swing;
  double p_hbp_given_take;
  double p_contact_given_swing;
  double p_strike_given_called;
  double p_fair_given_contact;
  double xlw;
};

inline PitchOutcomePredictions predict_pitch(const PitchModelSet& models,
                                             std::span<const double> x) {
  return {models.a(x), models.b(x), models.c(x), models.d(x), models.e(x), models.f(x)};
}

// Train the six components on their Fig.-2 conditional subsets. The hit
// outcome model supplies xLW labels for fair balls ({F}).
inline TrainedPitchModels train_pitch_outcome(const std::vector<PitchRecord>& pitches,
                                              const gbm::Ensemble& hit_model,
                                              int nrounds_override = 0) {
  struct Subset {
    gbm::Matrix x;
    std::vector<double> y;
  };
  Subset sa, sb, sc, sd, se, sf;
  auto push = [](Subset& s, const std::array<double, kNumPitchFeatures>& feats, double label) {
    s.x.n_cols = kNumPitchFeatures;
    s.x.data.insert(s.x.data.end(), feats.begin(), feats.end());
    ++s.x.n_rows;
    s.y.push_back(label);
  };

  for (const auto& p : pitches) {
    const auto feats = pitch_features(p);
    const bool swing = is_swing(p.outcome);
    push(sa, feats, swing ? 1.0 : 0.0);
    if (!swing) {
      push(sb, feats, p.outcome == PitchOutcome::HitByPitch ? 1.0 : 0.0);
      if (p.outcome == PitchOutcome::CalledBall || p.outcome == PitchOutcome::CalledStrike) {
        push(sd, feats, p.outcome == PitchOutcome::CalledStrike ? 1.0 : 0.0);
      }
    } else {
      const bool contact =
          p.outcome == PitchOutcome::FoulBall || p.outcome == PitchOutcome::FairBall;
      push(sc, feats, contact ? 1.0 : 0.0);
      if (contact) push(se, feats, p.outcome == PitchOutcome::FairBall ? 1.0 : 0.0);
      if (p.outcome == PitchOutcome::FairBall && p.exit_speed && p.launch_angle && p.hit_x &&
          p.hit_y) {
        const double spray = spray_angle_deg(*p.hit_x, *p.hit_y, p.batter_side);
        const double label =
            hit_model.predict(std::array<double, 3>{*p.exit_speed, *p.launch_angle, spray});
        push(sf, feats, label);
      }
    }
  }

  auto fit = [&](Component c, Subset& s) {
    if (s.x.n_rows == 0) {
      throw ConfigError("train_pitch_outcome: empty training subset for component");
    }
    gbm::TrainConfig cfg = component_config(c);
    if (nrounds_override > 0) cfg.nrounds = nrounds_override;
    return gbm::train(s.x, s.y, cfg, pitch_feature_names());
  };
  TrainedPitchModels out;
  out.a = fit(Component::A, sa);
  out.b = fit(Component::B, sb);
  out.c = fit(Component::C, sc);
  out.d = fit(Component::D, sd);
  out.e = fit(Component::E, se);
  out.f = fit(Component::F, sf);
  return out;
}

}  // namespace swv::outcome
