#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swv/common.hpp"

// Instrumental-variables offset regressions: the effect of batter approach
// on contact, fair/foul, and power, with the pitch outcome model prediction
// entering as a fixed offset.

namespace swv::causal {

enum class ModelTag { Contact, Fair, Xlw };

struct CausalFit {
  ModelTag tag = ModelTag::Contact;
  double intercept = 0.0;
  double beta_bs = 0.0;       // per mph of approach
  double beta_sl = 0.0;       // per FOOT; divide by 12 for the per-inch report
  double se_intercept = 0.0;
  double se_bs = 0.0;
  double se_sl = 0.0;
  double sigma2 = 0.0;        // nuisance, xLW model only
  std::size_t n = 0;
  int iterations = 0;
  bool converged = true;
  bool separation_flag = false;
  bool infinite_se_bs = false;  // zero-variance instrument column
  bool infinite_se_sl = false;

  double beta_sl_per_inch() const { return beta_sl / 12.0; }
  double se_sl_per_inch() const { return se_sl / 12.0; }
};

struct InstrumentRow {
  double gamma_bs = 0.0;
  double gamma_sl = 0.0;
};

namespace detail {

inline void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ArgumentError(std::string("causal fit: non-finite ") + what);
}

}  // namespace detail

// Logistic regression of y on (1, gamma_bs, gamma_sl) with a fixed offset
// in the linear predictor. IRLS with SEs from the inverse observed
// information. Zero-variance instrument columns are dropped and reported
// with coefficient 0 and an infinite-SE flag.
inline CausalFit fit_logistic_offset(const std::vector<double>& y,
                                     const std::vector<double>& offset_logits,
                                     const std::vector<InstrumentRow>& instruments,
                                     ModelTag tag = ModelTag::Contact) {
  const std::size_t n = y.size();
  if (n == 0 || offset_logits.size() != n || instruments.size() != n) {
    throw ArgumentError("fit_logistic_offset: size mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) throw ArgumentError("logistic response must be 0/1");
    detail::check_finite(offset_logits[i], "offset");
    detail::check_finite(instruments[i].gamma_bs, "instrument");
    detail::check_finite(instruments[i].gamma_sl, "instrument");
  }

  // detect degenerate instrument columns
  auto col_var = [&](auto get) {
    double m = 0.0;
    for (const auto& r : instruments) m += get(r);
    m /= static_cast<double>(n);
    double v = 0.0;
    for (const auto& r : instruments) v += (get(r) - m) * (get(r) - m);
    return v / static_cast<double>(n);
  };
  const bool use_bs = col_var([](const InstrumentRow& r) { return r.gamma_bs; }) > 1e-12;
  const bool use_sl = col_var([](const InstrumentRow& r) { return r.gamma_sl; }) > 1e-12;

  std::vector<int> cols = {0};
  if (use_bs) cols.push_back(1);
  if (use_sl) cols.push_back(2);
  const int p = static_cast<int>(cols.size());

  Eigen::MatrixXd x(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      x(static_cast<Eigen::Index>(i), j) =
          cols[static_cast<std::size_t>(j)] == 0   ? 1.0
          : cols[static_cast<std::size_t>(j)] == 1 ? instruments[i].gamma_bs
                                                   : instruments[i].gamma_sl;
    }
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd info(p, p);
  CausalFit fit;
  fit.tag = tag;
  fit.n = n;

  constexpr double kScoreTol = 1e-10;
  constexpr int kMaxIter = 100;
  constexpr double kSeparationCap = 30.0;
  bool converged = false;
  int iter = 0;
  for (; iter < kMaxIter; ++iter) {
    Eigen::VectorXd score = Eigen::VectorXd::Zero(p);
    info.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      const double eta = offset_logits[i] + x.row(static_cast<Eigen::Index>(i)).dot(beta);
      const double mu = sigmoid(eta);
      const double w = std::max(mu * (1.0 - mu), 1e-12);
      score += (y[i] - mu) * x.row(static_cast<Eigen::Index>(i)).transpose();
      info += w * x.row(static_cast<Eigen::Index>(i)).transpose() * x.row(static_cast<Eigen::Index>(i));
    }
    if (score.lpNorm<Eigen::Infinity>() < kScoreTol) {
      converged = true;
      break;
    }
    beta += info.ldlt().solve(score);
    if (beta.lpNorm<Eigen::Infinity>() > kSeparationCap) {
      fit.separation_flag = true;
      for (int j = 0; j < p; ++j) beta(j) = clip(beta(j), -kSeparationCap, kSeparationCap);
      converged = true;  // flagged fit, capped coefficients
      break;
    }
  }
  fit.iterations = iter + 1;
  fit.converged = converged;
  if (!converged) throw ArgumentError("fit_logistic_offset: IRLS did not converge");

  const Eigen::MatrixXd cov = info.inverse();
  auto assign = [&](int raw_col, double& coef, double& se, bool& inf_flag) {
    for (int j = 0; j < p; ++j) {
      if (cols[static_cast<std::size_t>(j)] == raw_col) {
        coef = beta(j);
        se = std::sqrt(cov(j, j));
        return;
      }
    }
    coef = 0.0;
    se = std::numeric_limits<double>::infinity();
    inf_flag = true;
  };
  bool dummy = false;
  assign(0, fit.intercept, fit.se_intercept, dummy);
  assign(1, fit.beta_bs, fit.se_bs, fit.infinite_se_bs);
  assign(2, fit.beta_sl, fit.se_sl, fit.infinite_se_sl);
  return fit;
}

// OLS of (y - offset) on (1, gamma_bs, gamma_sl). The Gaussian assumption
// is known to be violated by the right-skewed xLW distribution; the
// reported SEs are therefore optimistic.
inline CausalFit fit_linear_offset(const std::vector<double>& y, const std::vector<double>& offset,
                                   const std::vector<InstrumentRow>& instruments,
                                   ModelTag tag = ModelTag::Xlw) {
  const std::size_t n = y.size();
  if (n == 0 || offset.size() != n || instruments.size() != n) {
    throw ArgumentError("fit_linear_offset: size mismatch");
  }
  constexpr int p = 3;
  if (n <= p) throw ArgumentError("fit_linear_offset: too few rows");
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd r(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(static_cast<Eigen::Index>(i), 0) = 1.0;
    x(static_cast<Eigen::Index>(i), 1) = instruments[i].gamma_bs;
    x(static_cast<Eigen::Index>(i), 2) = instruments[i].gamma_sl;
    r(static_cast<Eigen::Index>(i)) = y[i] - offset[i];
  }
  const Eigen::MatrixXd xtx = x.transpose() * x;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
  if (lu.rank() < p) {
    static const char* names[p] = {"intercept", "gamma_bs", "gamma_sl"};
    std::string cols;
    // name the collinear columns via the null space
    const Eigen::MatrixXd null_space = lu.kernel();
    for (int j = 0; j < p; ++j) {
      if (null_space.row(j).lpNorm<Eigen::Infinity>() > 1e-8) {
        if (!cols.empty()) cols += ", ";
        cols += names[j];
      }
    }
    throw ArgumentError("fit_linear_offset: rank-deficient design (" + cols + ")");
  }
  const Eigen::VectorXd beta = lu.solve(x.transpose() * r);
  const Eigen::VectorXd resid = r - x * beta;
  const double sigma2 = resid.squaredNorm() / static_cast<double>(n - p);
  const Eigen::MatrixXd cov = sigma2 * xtx.inverse();

  CausalFit fit;
  fit.tag = tag;
  fit.n = n;
  fit.converged = true;
  fit.intercept = beta(0);
  fit.beta_bs = beta(1);
  fit.beta_sl = beta(2);
  fit.se_intercept = std::sqrt(cov(0, 0));
  fit.se_bs = std::sqrt(cov(1, 1));
  fit.se_sl = std::sqrt(cov(2, 2));
  fit.sigma2 = sigma2;
  return fit;
}

// One swing row joined to its pitch-outcome predictions and instruments.
struct SwingRow {
  bool contact = false;
  bool fair = false;          // meaningful when contact
  double xlw_label = 0.0;     // meaningful when fair
  bool has_xlw_label = false;
  double p_contact = 0.5;     // {C} prediction, already clipped
  double p_fair = 0.5;        // {E} prediction
  double xlw_pred = 0.0;      // {F} prediction
  InstrumentRow instruments;
};

struct CausalSuite {
  CausalFit contact;
  CausalFit fair;
  CausalFit xlw;
};

// The three regressions: contact on all swings, fair on contacted balls,
// xLW on fair balls with labels. Offsets are logit(p_con), logit(p_fair),
// and the xLW prediction.
inline CausalSuite fit_causal_suite(const std::vector<SwingRow>& swings) {
  std::vector<double> y_con, off_con, y_fair, off_fair, y_xlw, off_xlw;
  std::vector<InstrumentRow> in_con, in_fair, in_xlw;
  for (const auto& s : swings) {
    y_con.push_back(s.contact ? 1.0 : 0.0);
    off_con.push_back(logit(s.p_contact));
    in_con.push_back(s.instruments);
    if (s.contact) {
      y_fair.push_back(s.fair ? 1.0 : 0.0);
      off_fair.push_back(logit(s.p_fair));
      in_fair.push_back(s.instruments);
      if (s.fair && s.has_xlw_label) {
        y_xlw.push_back(s.xlw_label);
        off_xlw.push_back(s.xlw_pred);
        in_xlw.push_back(s.instruments);
      }
    }
  }
  CausalSuite suite;
  suite.contact = fit_logistic_offset(y_con, off_con, in_con, ModelTag::Contact);
  suite.fair = fit_logistic_offset(y_fair, off_fair, in_fair, ModelTag::Fair);
  suite.xlw = fit_linear_offset(y_xlw, off_xlw, in_xlw, ModelTag::Xlw);
  return suite;
}

}  // namespace swv::causal
