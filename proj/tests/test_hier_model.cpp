#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "swv/hier/model.hpp"
#include "swv/synth.hpp"

using namespace swv;

namespace {

hier::IntentionData small_data(bool skewed, std::uint64_t seed) {
  synth::IntentionSpec spec;
  spec.n_batters = 4;
  spec.n_pitchers = 3;
  spec.swings_per_batter = 15;
  spec.bat_speed.alpha0 = skewed ? -1.5 : 0.0;
  spec.bat_speed.tau = skewed ? 0.3 : 0.0;
  spec.seed = seed;
  const auto w = synth::gen_intention_data(spec);
  return hier::IntentionData::from_observations(w.bat_speed_obs);
}

std::vector<double> random_theta(const hier::Layout& l, Rng& rng, double y_scale) {
  std::vector<double> q(static_cast<std::size_t>(l.dim));
  for (auto& v : q) v = 0.3 * rng.normal();
  q[static_cast<std::size_t>(l.i_mu0)] = y_scale + rng.normal();
  q[static_cast<std::size_t>(l.i_log_sigma)] = std::log(3.5) + 0.1 * rng.normal();
  q[static_cast<std::size_t>(l.i_log_sigma_p)] = std::log(1.0) + 0.1 * rng.normal();
  for (int k = 0; k < hier::kBatterDims; ++k) {
    q[static_cast<std::size_t>(l.i_log_s + k)] = std::log(0.5) + 0.1 * rng.normal();
  }
  if (l.skew) q[static_cast<std::size_t>(l.i_log_tau)] = std::log(0.3) + 0.1 * rng.normal();
  return q;
}

}  // namespace

TEST_CASE("log posterior gradient matches finite differences") {
  for (const bool skew : {true, false}) {
    const auto data = small_data(skew, 31);
    hier::HierModel model(data, hier::ModelConfig::from_data(data, skew));
    const auto& l = model.layout();
    Rng rng(7);
    auto q = random_theta(l, rng, mean(data.y));

    std::vector<double> g(static_cast<std::size_t>(l.dim));
    const double lp = model.log_posterior_grad(q, g);
    CHECK(lp == Catch::Approx(model.log_posterior(q)).epsilon(1e-12));

    double worst = 0.0;
    const double h = 1e-5;
    for (int k = 0; k < l.dim; ++k) {
      auto qp = q, qm = q;
      qp[static_cast<std::size_t>(k)] += h;
      qm[static_cast<std::size_t>(k)] -= h;
      const double fd = (model.log_posterior(qp) - model.log_posterior(qm)) / (2.0 * h);
      const double rel = std::fabs(g[static_cast<std::size_t>(k)] - fd) /
                         std::max(1.0, std::fabs(fd));
      worst = std::max(worst, rel);
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("non-centered evaluation equals centered plus transform log-determinant") {
  for (const bool skew : {true, false}) {
    const auto data = small_data(skew, 57);
    hier::HierModel model(data, hier::ModelConfig::from_data(data, skew));
    const auto& l = model.layout();
    Rng rng(19);
    const auto q = random_theta(l, rng, mean(data.y));

    // centered theta: replace z blocks with the realized effects
    const auto con = model.to_constrained(q);
    auto centered = q;
    for (int p = 0; p < l.n_pitchers; ++p) {
      centered[static_cast<std::size_t>(l.i_z_p + p)] = con[static_cast<std::size_t>(l.i_z_p + p)];
    }
    for (int b = 0; b < hier::kBatterDims * l.n_batters; ++b) {
      centered[static_cast<std::size_t>(l.i_z_b + b)] = con[static_cast<std::size_t>(l.i_z_b + b)];
    }
    if (l.skew) {
      for (int b = 0; b < l.n_batters; ++b) {
        centered[static_cast<std::size_t>(l.i_z_nu + b)] = con[static_cast<std::size_t>(l.i_z_nu + b)];
      }
    }

    const double lhs = model.log_posterior(q);
    const double rhs = model.log_posterior_centered(centered) + model.effect_transform_logdet(q);
    CHECK(lhs == Catch::Approx(rhs).margin(1e-8 * std::fabs(lhs)));
  }
}

TEST_CASE("constrained view exposes valid scales and correlations") {
  const auto data = small_data(true, 3);
  hier::HierModel model(data, hier::ModelConfig::from_data(data, true));
  const auto& l = model.layout();
  Rng rng(23);
  const auto q = random_theta(l, rng, mean(data.y));
  const auto c = model.to_constrained(q);
  CHECK(c[static_cast<std::size_t>(l.i_log_sigma)] > 0.0);
  CHECK(c[static_cast<std::size_t>(l.i_log_sigma_p)] > 0.0);
  for (int k = 0; k < hier::kBatterDims; ++k) {
    CHECK(c[static_cast<std::size_t>(l.i_log_s + k)] > 0.0);
  }
  CHECK(c[static_cast<std::size_t>(l.i_log_tau)] > 0.0);
  for (int k = 0; k < hier::kNumCorr; ++k) {
    CHECK(std::fabs(c[static_cast<std::size_t>(l.i_corr + k)]) < 1.0);
  }
}

TEST_CASE("parameter names cover the layout") {
  const auto data = small_data(true, 3);
  hier::HierModel model(data, hier::ModelConfig::from_data(data, true));
  const auto& l = model.layout();
  const auto names = model.parameter_names();
  REQUIRE(static_cast<int>(names.size()) == l.dim);
  CHECK(names[static_cast<std::size_t>(l.i_mu0)] == "mu0");
  CHECK(names[static_cast<std::size_t>(l.i_bS)] == "beta_strikes");
  CHECK(names[static_cast<std::size_t>(l.i_log_sigma)] == "sigma");
  CHECK(names[static_cast<std::size_t>(l.i_alpha0)] == "alpha0");
  CHECK(names[static_cast<std::size_t>(l.i_log_tau)] == "tau_b");
  CHECK(names[static_cast<std::size_t>(l.i_z_b + 1)].find(".strikes") != std::string::npos);
}

TEST_CASE("per-observation likelihood agrees with the skew-normal kernel") {
  const auto data = small_data(true, 9);
  hier::HierModel model(data, hier::ModelConfig::from_data(data, true));
  const auto& l = model.layout();
  Rng rng(4);
  const auto q = random_theta(l, rng, mean(data.y));
  const auto c = model.to_constrained(q);

  // unseen batter and pitcher: population effects only
  const double ll = model.loglik_obs(c, -1, -1, 1.0, 2.0, 0.1, 2.4, 70.0);
  const double mu = c[static_cast<std::size_t>(l.i_mu0)] + c[static_cast<std::size_t>(l.i_bB)] * 1.0 +
                    c[static_cast<std::size_t>(l.i_bS)] * 2.0 + c[static_cast<std::size_t>(l.i_bX)] * 0.1 +
                    c[static_cast<std::size_t>(l.i_bZ)] * 2.4;
  const double ref = sn::logpdf(
      70.0, sn::from_mean(mu, c[static_cast<std::size_t>(l.i_log_sigma)],
                          c[static_cast<std::size_t>(l.i_alpha0)]));
  CHECK(ll == Catch::Approx(ref).epsilon(1e-12));

  // predict_intended returns the same distribution
  const auto p = model.predict_intended(c, -1, -1, 1.0, 2.0, 0.1, 2.4);
  CHECK(sn::analytic_mean(p) == Catch::Approx(mu).epsilon(1e-12));
}

TEST_CASE("gaussian reduction drops the shape block") {
  const auto data = small_data(false, 2);
  hier::HierModel model(data, hier::ModelConfig::from_data(data, false));
  const auto& l = model.layout();
  CHECK_FALSE(l.skew);
  CHECK(l.i_alpha0 == -1);
  CHECK(l.i_z_nu == -1);
  // likelihood equals a plain normal when alpha is absent
  Rng rng(5);
  const auto q = random_theta(l, rng, mean(data.y));
  const auto c = model.to_constrained(q);
  const double sigma = c[static_cast<std::size_t>(l.i_log_sigma)];
  const double ll = model.loglik_obs(c, -1, -1, 0.0, 0.0, 0.0, 0.0, 71.0);
  const double mu = c[static_cast<std::size_t>(l.i_mu0)];
  const double t = (71.0 - mu) / sigma;
  CHECK(ll == Catch::Approx(-0.5 * t * t - sn::kLogSqrt2Pi - std::log(sigma)).epsilon(1e-12));
}

TEST_CASE("empty dataset is rejected") {
  hier::IntentionData empty;
  CHECK_THROWS_AS(hier::HierModel(empty, hier::ModelConfig{}), ArgumentError);
}
