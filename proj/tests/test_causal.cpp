#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "swv/causal.hpp"
#include "swv/synth.hpp"

using namespace swv;

namespace {

struct LogisticWorld {
  std::vector<double> y, offsets;
  std::vector<causal::InstrumentRow> instruments;
};

LogisticWorld make_logistic(double intercept, double b_bs, double b_sl, int n,
                            std::uint64_t seed) {
  LogisticWorld w;
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    causal::InstrumentRow r{1.5 * rng.normal(), 0.25 * rng.normal()};
    const double off = rng.uniform(-1.0, 1.0);
    const double p = sigmoid(off + intercept + b_bs * r.gamma_bs + b_sl * r.gamma_sl);
    w.y.push_back(rng.uniform() < p ? 1.0 : 0.0);
    w.offsets.push_back(off);
    w.instruments.push_back(r);
  }
  return w;
}

}  // namespace

TEST_CASE("logistic offset regression recovers planted coefficients") {
  const auto w = make_logistic(0.1, -0.18, -0.048, 20000, 3);
  const auto fit = causal::fit_logistic_offset(w.y, w.offsets, w.instruments);
  CHECK(fit.converged);
  CHECK_FALSE(fit.separation_flag);
  CHECK(fit.intercept == Catch::Approx(0.1).margin(3.0 * fit.se_intercept));
  CHECK(fit.beta_bs == Catch::Approx(-0.18).margin(3.0 * fit.se_bs));
  CHECK(fit.beta_sl == Catch::Approx(-0.048).margin(3.0 * fit.se_sl));
  CHECK(fit.n == 20000);
}

TEST_CASE("constant offset shifts are absorbed by the intercept") {
  const auto w = make_logistic(0.2, -0.1, 0.05, 4000, 9);
  const auto base = causal::fit_logistic_offset(w.y, w.offsets, w.instruments);
  auto shifted = w.offsets;
  const double c = 0.7;
  for (auto& o : shifted) o += c;
  const auto fit = causal::fit_logistic_offset(w.y, shifted, w.instruments);
  CHECK(fit.intercept == Catch::Approx(base.intercept - c).margin(1e-8));
  CHECK(fit.beta_bs == Catch::Approx(base.beta_bs).margin(1e-8));
  CHECK(fit.beta_sl == Catch::Approx(base.beta_sl).margin(1e-8));
}

TEST_CASE("zero-variance instrument columns are dropped and flagged") {
  auto w = make_logistic(0.0, -0.1, 0.0, 2000, 4);
  for (auto& r : w.instruments) r.gamma_sl = 0.3;  // constant
  const auto fit = causal::fit_logistic_offset(w.y, w.offsets, w.instruments);
  CHECK(fit.beta_sl == 0.0);
  CHECK(fit.infinite_se_sl);
  CHECK(std::isinf(fit.se_sl));
  CHECK_FALSE(fit.infinite_se_bs);
}

TEST_CASE("complete separation is capped and flagged") {
  std::vector<double> y, off;
  std::vector<causal::InstrumentRow> ins;
  Rng rng(5);
  for (int i = 0; i < 400; ++i) {
    const double g = rng.normal();
    y.push_back(g > 0.0 ? 1.0 : 0.0);
    off.push_back(0.0);
    ins.push_back({g, 0.0});
  }
  const auto fit = causal::fit_logistic_offset(y, off, ins);
  CHECK(fit.separation_flag);
  CHECK(std::fabs(fit.beta_bs) <= 30.0 + 1e-9);
}

TEST_CASE("linear offset regression matches OLS on the residual") {
  Rng rng(7);
  std::vector<double> y, off;
  std::vector<causal::InstrumentRow> ins;
  for (int i = 0; i < 5000; ++i) {
    causal::InstrumentRow r{rng.normal(), rng.normal()};
    const double o = rng.uniform(-0.2, 0.2);
    y.push_back(o + 0.01 + 0.022 * r.gamma_bs + 0.0 * r.gamma_sl + 0.15 * rng.normal());
    off.push_back(o);
    ins.push_back(r);
  }
  const auto fit = causal::fit_linear_offset(y, off, ins);
  CHECK(fit.intercept == Catch::Approx(0.01).margin(3.0 * fit.se_intercept));
  CHECK(fit.beta_bs == Catch::Approx(0.022).margin(3.0 * fit.se_bs));
  CHECK(fit.beta_sl == Catch::Approx(0.0).margin(3.0 * fit.se_sl));
  CHECK(fit.sigma2 == Catch::Approx(0.15 * 0.15).epsilon(0.1));
  CHECK(fit.beta_sl_per_inch() == Catch::Approx(fit.beta_sl / 12.0));
  CHECK(fit.se_sl_per_inch() == Catch::Approx(fit.se_sl / 12.0));
}

TEST_CASE("rank-deficient designs are rejected with named columns") {
  std::vector<double> y, off;
  std::vector<causal::InstrumentRow> ins;
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const double g = rng.normal();
    y.push_back(rng.normal());
    off.push_back(0.0);
    ins.push_back({g, g});  // perfectly collinear instruments
  }
  try {
    causal::fit_linear_offset(y, off, ins);
    FAIL("expected ArgumentError");
  } catch (const ArgumentError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("rank-deficient") != std::string::npos);
    CHECK(msg.find("gamma_bs") != std::string::npos);
    CHECK(msg.find("gamma_sl") != std::string::npos);
  }
}

TEST_CASE("size and label validation") {
  CHECK_THROWS_AS(causal::fit_logistic_offset({1.0}, {0.0, 0.0}, {{0, 0}}), ArgumentError);
  CHECK_THROWS_AS(causal::fit_logistic_offset({0.5}, {0.0}, {{0, 0}}), ArgumentError);
  CHECK_THROWS_AS(
      causal::fit_logistic_offset({1.0}, {std::numeric_limits<double>::infinity()}, {{0, 0}}),
      ArgumentError);
  CHECK_THROWS_AS(causal::fit_linear_offset({1.0, 2.0}, {0.0, 0.0}, {{0, 0}, {1, 1}}),
                  ArgumentError);  // too few rows
}

TEST_CASE("the causal suite conditions each regression on the right subset") {
  const auto world = synth::gen_pa_world(synth::PaWorldSpec{});
  const auto suite = causal::fit_causal_suite(world.swings);
  std::size_t n_con = world.swings.size(), n_fair = 0, n_xlw = 0;
  for (const auto& s : world.swings) {
    if (s.contact) ++n_fair;
    if (s.contact && s.fair && s.has_xlw_label) ++n_xlw;
  }
  CHECK(suite.contact.n == n_con);
  CHECK(suite.fair.n == n_fair);
  CHECK(suite.xlw.n == n_xlw);
  CHECK(suite.contact.tag == causal::ModelTag::Contact);
  CHECK(suite.fair.tag == causal::ModelTag::Fair);
  CHECK(suite.xlw.tag == causal::ModelTag::Xlw);
  // one realized world: loose 4-SE agreement with the planted truth
  CHECK(suite.contact.beta_bs ==
        Catch::Approx(world.contact_truth.beta_bs).margin(4.0 * suite.contact.se_bs));
  CHECK(suite.xlw.beta_bs ==
        Catch::Approx(world.xlw_truth.beta_bs).margin(4.0 * suite.xlw.se_bs));
}
