#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "swv/hier/diagnostics.hpp"
#include "swv/hier/model.hpp"
#include "swv/hier/nuts.hpp"

namespace swv::hier {

// Posterior draws on the constrained scale, chain-major.
struct PosteriorDraws {
  int chains = 0;
  int draws_per_chain = 0;
  std::vector<std::string> names;
  // [chain][draw][param]
  std::vector<std::vector<std::vector<double>>> values;
  std::vector<int> divergences;   // per chain, post-warmup
  std::vector<double> step_sizes;  // per chain
  bool flagged = false;
  std::string warning;

  std::size_t dim() const { return names.size(); }
  std::size_t total_draws() const {
    return static_cast<std::size_t>(chains) * static_cast<std::size_t>(draws_per_chain);
  }

  double posterior_mean(std::size_t param) const {
    double s = 0.0;
    for (const auto& chain : values) {
      for (const auto& d : chain) s += d[param];
    }
    return s / static_cast<double>(total_draws());
  }

  std::vector<double> posterior_means() const {
    std::vector<double> out(dim());
    for (std::size_t k = 0; k < dim(); ++k) out[k] = posterior_mean(k);
    return out;
  }

  // Equal-tailed credible interval.
  std::pair<double, double> credible_interval(std::size_t param, double mass = 0.95) const {
    std::vector<double> v;
    v.reserve(total_draws());
    for (const auto& chain : values) {
      for (const auto& d : chain) v.push_back(d[param]);
    }
    std::sort(v.begin(), v.end());
    const double tail = 0.5 * (1.0 - mass);
    const auto lo = static_cast<std::size_t>(tail * (v.size() - 1));
    const auto hi = static_cast<std::size_t>((1.0 - tail) * (v.size() - 1));
    return {v[lo], v[hi]};
  }

  int name_index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

struct FitConfig {
  int chains = 4;
  int warmup = 1000;
  int draws = 1000;
  std::uint64_t seed = 1;
  double target_accept = 0.8;
  int max_depth = 10;
  double divergence_flag_fraction = 0.05;
};

// Dynamic HMC fit of the intention model on the unconstrained scale;
// divergent fits above the flag fraction are flagged, not fatal.
inline PosteriorDraws sample_posterior(const HierModel& model, const FitConfig& fit_cfg) {
  const auto& data = model.data();
  if (data.n_batters() < 2 || data.n_pitchers() < 2) {
    throw ArgumentError("sample_posterior: need at least 2 batters and 2 pitchers");
  }

  nuts::Config ncfg;
  ncfg.chains = fit_cfg.chains;
  ncfg.warmup = fit_cfg.warmup;
  ncfg.draws = fit_cfg.draws;
  ncfg.seed = fit_cfg.seed;
  ncfg.target_accept = fit_cfg.target_accept;
  ncfg.max_depth = fit_cfg.max_depth;

  const Layout& l = model.layout();
  const double y_mean = mean(data.y);
  const double y_sd = std::max(sd(data.y), 1e-6);

  nuts::LogpGrad f = [&model](std::span<const double> q, std::span<double> g) {
    return model.log_posterior_grad(q, g);
  };
  nuts::InitFn init = [&](int, Rng& rng) {
    std::vector<double> q(static_cast<std::size_t>(l.dim));
    q[static_cast<std::size_t>(l.i_mu0)] = y_mean + 0.1 * y_sd * rng.normal();
    for (int i : {l.i_bB, l.i_bS, l.i_bX, l.i_bZ}) {
      q[static_cast<std::size_t>(i)] = 0.1 * rng.uniform(-1.0, 1.0);
    }
    q[static_cast<std::size_t>(l.i_log_sigma)] = std::log(0.8 * y_sd) + 0.1 * rng.uniform(-1.0, 1.0);
    if (l.skew) q[static_cast<std::size_t>(l.i_alpha0)] = 0.2 * rng.uniform(-1.0, 1.0);
    q[static_cast<std::size_t>(l.i_log_sigma_p)] = std::log(0.2 * y_sd) + 0.2 * rng.uniform(-1.0, 1.0);
    for (int k = 0; k < kBatterDims; ++k) {
      q[static_cast<std::size_t>(l.i_log_s + k)] = std::log(0.3 * y_sd) + 0.2 * rng.uniform(-1.0, 1.0);
    }
    if (l.skew) q[static_cast<std::size_t>(l.i_log_tau)] = std::log(0.2) + 0.2 * rng.uniform(-1.0, 1.0);
    for (int k = 0; k < kNumCorr; ++k) {
      q[static_cast<std::size_t>(l.i_corr + k)] = 0.1 * rng.uniform(-1.0, 1.0);
    }
    for (int p = 0; p < l.n_pitchers; ++p) q[static_cast<std::size_t>(l.i_z_p + p)] = 0.5 * rng.normal();
    for (int b = 0; b < kBatterDims * l.n_batters; ++b) {
      q[static_cast<std::size_t>(l.i_z_b + b)] = 0.5 * rng.normal();
    }
    if (l.skew) {
      for (int b = 0; b < l.n_batters; ++b) q[static_cast<std::size_t>(l.i_z_nu + b)] = 0.5 * rng.normal();
    }
    return q;
  };

  const auto chains = nuts::sample(f, static_cast<std::size_t>(l.dim), ncfg, init);

  PosteriorDraws out;
  out.chains = fit_cfg.chains;
  out.draws_per_chain = fit_cfg.draws;
  out.names = model.parameter_names();
  int total_div = 0;
  for (const auto& cr : chains) {
    std::vector<std::vector<double>> cdraws;
    cdraws.reserve(cr.draws.size());
    for (const auto& q : cr.draws) cdraws.push_back(model.to_constrained(q));
    out.values.push_back(std::move(cdraws));
    out.divergences.push_back(cr.divergences);
    out.step_sizes.push_back(cr.step_size);
    total_div += cr.divergences;
  }
  const double frac = static_cast<double>(total_div) /
                      std::max<std::size_t>(1, out.total_draws());
  if (frac > fit_cfg.divergence_flag_fraction) {
    out.flagged = true;
    out.warning = "divergence fraction " + std::to_string(frac) + " exceeds threshold";
  }
  return out;
}

// Per-parameter split R-hat and rank-normalized bulk ESS.
inline std::map<std::string, diag::ParamDiagnostics> diagnostics(const PosteriorDraws& draws) {
  if (draws.chains < 2) throw ArgumentError("diagnostics: R-hat undefined for a single chain");
  std::map<std::string, diag::ParamDiagnostics> out;
  for (std::size_t k = 0; k < draws.dim(); ++k) {
    std::vector<std::vector<double>> per_chain;
    for (const auto& chain : draws.values) {
      std::vector<double> col;
      col.reserve(chain.size());
      for (const auto& d : chain) col.push_back(d[k]);
      per_chain.push_back(std::move(col));
    }
    out[draws.names[k]] = diag::diagnose_parameter(per_chain);
  }
  return out;
}

struct ElpdResult {
  double elpd = 0.0;
  double se = 0.0;
  std::vector<double> pointwise;
};

// Pointwise log-mean-exp over draws of the held-out log-likelihood.
// Held-out batters/pitchers not seen in training get population effects.
inline ElpdResult elpd_heldout(const HierModel& model, const PosteriorDraws& draws,
                               const std::vector<IntentionObservation>& heldout) {
  if (heldout.empty()) throw ArgumentError("elpd_heldout: empty held-out set");
  const auto& data = model.data();
  ElpdResult out;
  const double log_n_draws = std::log(static_cast<double>(draws.total_draws()));
  for (const auto& o : heldout) {
    const int b = data.batter_index(o.batter_id);
    const int p = data.pitcher_index(o.pitcher_id);
    double max_ll = -std::numeric_limits<double>::infinity();
    std::vector<double> lls;
    lls.reserve(draws.total_draws());
    for (const auto& chain : draws.values) {
      for (const auto& d : chain) {
        const double ll = model.loglik_obs(d, b, p, o.balls, o.strikes, o.loc_x, o.loc_z, o.response);
        lls.push_back(ll);
        max_ll = std::max(max_ll, ll);
      }
    }
    double s = 0.0;
    for (double ll : lls) s += std::exp(ll - max_ll);
    out.pointwise.push_back(max_ll + std::log(s) - log_n_draws);
  }
  out.elpd = pairwise_sum(out.pointwise);
  // se(elpd) = sqrt(n) * sd(pointwise)
  out.se = std::sqrt(static_cast<double>(out.pointwise.size())) * sd(out.pointwise);
  return out;
}

struct ElpdComparison {
  double delta_elpd = 0.0;  // A - B
  double se = 0.0;
};

inline ElpdComparison compare_elpd(const ElpdResult& a, const ElpdResult& b) {
  if (a.pointwise.size() != b.pointwise.size()) {
    throw ArgumentError("compare_elpd: pointwise vectors must align");
  }
  std::vector<double> diff(a.pointwise.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a.pointwise[i] - b.pointwise[i];
  ElpdComparison out;
  out.delta_elpd = pairwise_sum(diff);
  out.se = std::sqrt(static_cast<double>(diff.size())) * sd(diff);
  return out;
}

struct BatterApproach {
  std::string batter_id;
  double gamma_bs = 0.0;  // mph per strike
  double gamma_sl = 0.0;  // feet per strike
};

// Posterior means of the strike random slopes from both fitted models;
// batters absent from either fit are omitted.
inline std::vector<BatterApproach> batter_approaches(const HierModel& bat_speed_model,
                                                     const PosteriorDraws& bat_speed_draws,
                                                     const HierModel& swing_length_model,
                                                     const PosteriorDraws& swing_length_draws) {
  std::vector<BatterApproach> out;
  const auto& bs_data = bat_speed_model.data();
  const auto& sl_data = swing_length_model.data();
  const auto bs_means = bat_speed_draws.posterior_means();
  const auto sl_means = swing_length_draws.posterior_means();
  for (int b = 0; b < bs_data.n_batters(); ++b) {
    const std::string& id = bs_data.batter_ids[static_cast<std::size_t>(b)];
    const int b2 = sl_data.batter_index(id);
    if (b2 < 0) continue;
    BatterApproach ap;
    ap.batter_id = id;
    ap.gamma_bs = bs_means[static_cast<std::size_t>(bat_speed_model.layout().i_z_b + kBatterDims * b + 1)];
    ap.gamma_sl = sl_means[static_cast<std::size_t>(swing_length_model.layout().i_z_b + kBatterDims * b2 + 1)];
    out.push_back(std::move(ap));
  }
  return out;
}

}  // namespace swv::hier
