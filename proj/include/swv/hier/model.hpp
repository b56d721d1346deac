#pragma once

#include <Eigen/Core>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "swv/hier/batch_math.hpp"
#include "swv/hier/data.hpp"
#include "swv/skew_normal.hpp"

// Hierarchical skew-normal intention model and its Gaussian reduction.
//
//   y_i ~ SK(mu_i, sigma, alpha_i)   (mu_i is the distribution MEAN)
//   mu_i = mu0 + gamma_{p_i} + u_{b_i,0}
//        + betaB*balls + (betaS + u_{b_i,1})*strikes
//        + (betaX + u_{b_i,2})*loc_x + (betaZ + u_{b_i,3})*loc_z
//   alpha_i = alpha0 + nu_{b_i}
//
// Sampling runs on an unconstrained parameterization: non-centered random
// effects, log standard deviations, and an unconstrained Cholesky factor
// of the batter-effect correlation matrix. The log posterior includes all
// transform Jacobians and normalization constants, so centered and
// non-centered evaluations agree exactly.

namespace swv::hier {

inline constexpr int kBatterDims = 4;  // intercept, strikes, loc_x, loc_z slopes
inline constexpr int kNumCorr = 6;     // strict lower triangle of a 4x4

struct ModelConfig {
  bool skew = true;
  double sd_prior_scale = 2.5;     // half-t3 scale for all sd parameters
  double fixed_prior_scale = 10.0; // Normal sd for fixed effects
  double shape_prior_scale = 5.0;  // Normal sd for alpha0

  static ModelConfig from_data(const IntentionData& data, bool skew) {
    ModelConfig cfg;
    cfg.skew = skew;
    const double s_y = std::max(sd(data.y), 1e-6);
    cfg.sd_prior_scale = 2.5 * s_y;
    cfg.fixed_prior_scale = 10.0 * s_y;
    return cfg;
  }
};

struct Layout {
  bool skew = true;
  int n_batters = 0;
  int n_pitchers = 0;
  int i_mu0 = 0, i_bB = 1, i_bS = 2, i_bX = 3, i_bZ = 4, i_log_sigma = 5;
  int i_alpha0 = -1;
  int i_log_sigma_p = -1;
  int i_log_s = -1;    // 4 entries
  int i_log_tau = -1;
  int i_corr = -1;     // 6 entries
  int i_z_p = -1;      // P entries
  int i_z_b = -1;      // 4*B entries, batter-major
  int i_z_nu = -1;     // B entries
  int dim = 0;

  static Layout make(bool skew, int n_batters, int n_pitchers) {
    Layout l;
    l.skew = skew;
    l.n_batters = n_batters;
    l.n_pitchers = n_pitchers;
    int next = 6;
    if (skew) l.i_alpha0 = next++;
    l.i_log_sigma_p = next++;
    l.i_log_s = next;
    next += kBatterDims;
    if (skew) l.i_log_tau = next++;
    l.i_corr = next;
    next += kNumCorr;
    l.i_z_p = next;
    next += n_pitchers;
    l.i_z_b = next;
    next += kBatterDims * n_batters;
    if (skew) {
      l.i_z_nu = next;
      next += n_batters;
    }
    l.dim = next;
    return l;
  }
};

namespace detail {

// Cholesky factor of a 4x4 correlation matrix from 6 unconstrained reals,
// with the tape needed for the reverse pass. Element order is row-major
// over the strict lower triangle: (1,0),(2,0),(2,1),(3,0),(3,1),(3,2).
struct CorrFactor {
  double L[kBatterDims][kBatterDims] = {};
  double z[kNumCorr] = {};
  double w[kNumCorr] = {};
  double log_jacobian = 0.0;

  static CorrFactor build(std::span<const double> raw) {
    CorrFactor c;
    c.L[0][0] = 1.0;
    int idx = 0;
    for (int i = 1; i < kBatterDims; ++i) {
      double sumsq = 0.0;
      for (int j = 0; j < i; ++j, ++idx) {
        c.z[idx] = std::tanh(raw[static_cast<std::size_t>(idx)]);
        c.w[idx] = std::sqrt(1.0 - sumsq);
        c.L[i][j] = c.z[idx] * c.w[idx];
        sumsq += c.L[i][j] * c.L[i][j];
        c.log_jacobian += std::log(c.w[idx]) + std::log1p(-c.z[idx] * c.z[idx]);
      }
      c.L[i][i] = std::sqrt(1.0 - sumsq);
    }
    return c;
  }

  // Reverse pass: dL (including diagonal entries) plus the Jacobian terms
  // already in log_jacobian, accumulated into d_raw.
  void backward(const double dL_in[kBatterDims][kBatterDims], std::span<double> d_raw) const {
    int idx = kNumCorr;
    for (int i = kBatterDims - 1; i >= 1; --i) {
      double dsumsq = -dL_in[i][i] / (2.0 * L[i][i]);
      for (int j = i - 1; j >= 0; --j) {
        --idx;
        const double dLij = dL_in[i][j] + dsumsq * 2.0 * L[i][j];
        double dz = dLij * w[idx];
        double dw = dLij * z[idx];
        // d/dw log(w) and d/dz log(1 - z^2) from the Jacobian
        dw += 1.0 / w[idx];
        dz += -2.0 * z[idx] / (1.0 - z[idx] * z[idx]);
        dsumsq += -0.5 * dw / w[idx];
        d_raw[static_cast<std::size_t>(idx)] += dz * (1.0 - z[idx] * z[idx]);
      }
    }
  }

  // R = L L^T
  double correlation(int i, int j) const {
    double r = 0.0;
    for (int k = 0; k <= std::min(i, j); ++k) r += L[i][k] * L[j][k];
    return r;
  }
};

inline constexpr double kHalfLog2Pi = 0.5 * 1.8378770664093454835606594;

// log density of half-t with 3 degrees of freedom and scale s, evaluated
// at v > 0, plus the log-Jacobian of the log transform (param is log v).
inline double half_t3_logpdf_logscale(double log_v, double s, double* d_log_v) {
  const double v = std::exp(log_v);
  const double r = v * v / (3.0 * s * s);
  const double lp = std::log(4.0 / (M_PI * std::sqrt(3.0) * s)) - 2.0 * std::log1p(r) + log_v;
  if (d_log_v) *d_log_v += -4.0 * r / (1.0 + r) + 1.0;
  return lp;
}

inline double normal_logpdf(double x, double sd_, double* dx) {
  if (dx) *dx += -x / (sd_ * sd_);
  return -0.5 * x * x / (sd_ * sd_) - std::log(sd_) - kHalfLog2Pi;
}

}  // namespace detail

class HierModel {
 public:
  HierModel(IntentionData data, ModelConfig cfg)
      : data_(std::move(data)),
        cfg_(cfg),
        layout_(Layout::make(cfg.skew, data_.n_batters(), data_.n_pitchers())) {
    if (data_.n_obs() == 0) throw ArgumentError("hier model: empty dataset");
  }

  const Layout& layout() const { return layout_; }
  const ModelConfig& config() const { return cfg_; }
  const IntentionData& data() const { return data_; }

  double log_posterior(std::span<const double> theta) const {
    return eval(theta, nullptr);
  }

  double log_posterior_grad(std::span<const double> theta, std::span<double> grad) const {
    return eval(theta, &grad);
  }

  // Constrained view of one draw: same layout, but sds exponentiated, the
  // corr block holding the 6 correlations of R, and effect blocks holding
  // actual effects (gamma_p, u_b, nu_b) rather than standardized z's.
  std::vector<double> to_constrained(std::span<const double> theta) const {
    const Layout& l = layout_;
    std::vector<double> c(theta.begin(), theta.end());
    c[static_cast<std::size_t>(l.i_log_sigma)] = std::exp(theta[static_cast<std::size_t>(l.i_log_sigma)]);
    const double sigma_p = std::exp(theta[static_cast<std::size_t>(l.i_log_sigma_p)]);
    c[static_cast<std::size_t>(l.i_log_sigma_p)] = sigma_p;
    double s[kBatterDims];
    for (int k = 0; k < kBatterDims; ++k) {
      s[k] = std::exp(theta[static_cast<std::size_t>(l.i_log_s + k)]);
      c[static_cast<std::size_t>(l.i_log_s + k)] = s[k];
    }
    double tau = 0.0;
    if (l.skew) {
      tau = std::exp(theta[static_cast<std::size_t>(l.i_log_tau)]);
      c[static_cast<std::size_t>(l.i_log_tau)] = tau;
    }
    const auto corr = detail::CorrFactor::build(theta.subspan(static_cast<std::size_t>(l.i_corr), kNumCorr));
    int idx = 0;
    for (int i = 1; i < kBatterDims; ++i) {
      for (int j = 0; j < i; ++j, ++idx) {
        c[static_cast<std::size_t>(l.i_corr + idx)] = corr.correlation(i, j);
      }
    }
    for (int p = 0; p < l.n_pitchers; ++p) {
      c[static_cast<std::size_t>(l.i_z_p + p)] = sigma_p * theta[static_cast<std::size_t>(l.i_z_p + p)];
    }
    for (int b = 0; b < l.n_batters; ++b) {
      const double* z = &theta[static_cast<std::size_t>(l.i_z_b + kBatterDims * b)];
      for (int i = 0; i < kBatterDims; ++i) {
        double u = 0.0;
        for (int j = 0; j <= i; ++j) u += corr.L[i][j] * z[j];
        c[static_cast<std::size_t>(l.i_z_b + kBatterDims * b + i)] = s[i] * u;
      }
      if (l.skew) {
        c[static_cast<std::size_t>(l.i_z_nu + b)] = tau * theta[static_cast<std::size_t>(l.i_z_nu + b)];
      }
    }
    return c;
  }

  std::vector<std::string> parameter_names() const {
    const Layout& l = layout_;
    std::vector<std::string> names(static_cast<std::size_t>(l.dim));
    names[static_cast<std::size_t>(l.i_mu0)] = "mu0";
    names[static_cast<std::size_t>(l.i_bB)] = "beta_balls";
    names[static_cast<std::size_t>(l.i_bS)] = "beta_strikes";
    names[static_cast<std::size_t>(l.i_bX)] = "beta_loc_x";
    names[static_cast<std::size_t>(l.i_bZ)] = "beta_loc_z";
    names[static_cast<std::size_t>(l.i_log_sigma)] = "sigma";
    if (l.skew) names[static_cast<std::size_t>(l.i_alpha0)] = "alpha0";
    names[static_cast<std::size_t>(l.i_log_sigma_p)] = "sigma_p";
    static const char* sd_names[kBatterDims] = {"sd_b", "sd_b_strikes", "sd_b_loc_x", "sd_b_loc_z"};
    for (int k = 0; k < kBatterDims; ++k) names[static_cast<std::size_t>(l.i_log_s + k)] = sd_names[k];
    if (l.skew) names[static_cast<std::size_t>(l.i_log_tau)] = "tau_b";
    static const char* corr_names[kNumCorr] = {"r_21", "r_31", "r_32", "r_41", "r_42", "r_43"};
    for (int k = 0; k < kNumCorr; ++k) names[static_cast<std::size_t>(l.i_corr + k)] = corr_names[k];
    for (int p = 0; p < l.n_pitchers; ++p) {
      names[static_cast<std::size_t>(l.i_z_p + p)] = "gamma_p[" + data_.pitcher_ids[static_cast<std::size_t>(p)] + "]";
    }
    static const char* eff_names[kBatterDims] = {"", ".strikes", ".loc_x", ".loc_z"};
    for (int b = 0; b < l.n_batters; ++b) {
      for (int k = 0; k < kBatterDims; ++k) {
        names[static_cast<std::size_t>(l.i_z_b + kBatterDims * b + k)] =
            "u_b[" + data_.batter_ids[static_cast<std::size_t>(b)] + "]" + eff_names[k];
      }
      if (l.skew) {
        names[static_cast<std::size_t>(l.i_z_nu + b)] = "nu_b[" + data_.batter_ids[static_cast<std::size_t>(b)] + "]";
      }
    }
    return names;
  }

  // Log-likelihood of one observation under a constrained parameter view.
  // batter/pitcher index -1 means unseen: population effects (0, alpha0).
  double loglik_obs(std::span<const double> c, int b, int p, double balls, double strikes,
                    double lx, double lz, double y) const {
    const Layout& l = layout_;
    const double sigma = c[static_cast<std::size_t>(l.i_log_sigma)];
    double mu = c[static_cast<std::size_t>(l.i_mu0)] + c[static_cast<std::size_t>(l.i_bB)] * balls +
                c[static_cast<std::size_t>(l.i_bS)] * strikes + c[static_cast<std::size_t>(l.i_bX)] * lx +
                c[static_cast<std::size_t>(l.i_bZ)] * lz;
    if (p >= 0) mu += c[static_cast<std::size_t>(l.i_z_p + p)];
    if (b >= 0) {
      const double* u = &c[static_cast<std::size_t>(l.i_z_b + kBatterDims * b)];
      mu += u[0] + u[1] * strikes + u[2] * lx + u[3] * lz;
    }
    double alpha = 0.0;
    if (l.skew) {
      alpha = c[static_cast<std::size_t>(l.i_alpha0)];
      if (b >= 0) alpha += c[static_cast<std::size_t>(l.i_z_nu + b)];
    }
    return sn::logpdf(y, sn::from_mean(mu, sigma, alpha));
  }

  // Intended-swing distribution for a context, given a constrained
  // parameter vector (typically posterior means).
  sn::Params predict_intended(std::span<const double> c, int b, int p, double balls,
                              double strikes, double lx, double lz) const {
    const Layout& l = layout_;
    const double sigma = c[static_cast<std::size_t>(l.i_log_sigma)];
    double mu = c[static_cast<std::size_t>(l.i_mu0)] + c[static_cast<std::size_t>(l.i_bB)] * balls +
                c[static_cast<std::size_t>(l.i_bS)] * strikes + c[static_cast<std::size_t>(l.i_bX)] * lx +
                c[static_cast<std::size_t>(l.i_bZ)] * lz;
    if (p >= 0) mu += c[static_cast<std::size_t>(l.i_z_p + p)];
    if (b >= 0) {
      const double* u = &c[static_cast<std::size_t>(l.i_z_b + kBatterDims * b)];
      mu += u[0] + u[1] * strikes + u[2] * lx + u[3] * lz;
    }
    double alpha = 0.0;
    if (l.skew) {
      alpha = c[static_cast<std::size_t>(l.i_alpha0)];
      if (b >= 0) alpha += c[static_cast<std::size_t>(l.i_z_nu + b)];
    }
    return sn::from_mean(mu, sigma, alpha);
  }

  // Centered-parameterization evaluation (value only; used to verify the
  // non-centered transform). The effect blocks of theta hold actual
  // effects gamma_p, u_b, nu_b instead of standardized z's.
  double log_posterior_centered(std::span<const double> theta) const {
    const Layout& l = layout_;
    double lp = likelihood_from_effects(theta);
    lp += fixed_priors(theta, nullptr);
    const double sigma_p = std::exp(theta[static_cast<std::size_t>(l.i_log_sigma_p)]);
    double s[kBatterDims];
    for (int k = 0; k < kBatterDims; ++k) s[k] = std::exp(theta[static_cast<std::size_t>(l.i_log_s + k)]);
    const auto corr = detail::CorrFactor::build(theta.subspan(static_cast<std::size_t>(l.i_corr), kNumCorr));
    lp += corr.log_jacobian;
    for (int i = 1; i < kBatterDims; ++i) {
      lp += (kBatterDims - 1 - i) * std::log(corr.L[i][i]);
    }
    for (int p = 0; p < l.n_pitchers; ++p) {
      const double g = theta[static_cast<std::size_t>(l.i_z_p + p)];
      lp += -0.5 * g * g / (sigma_p * sigma_p) - std::log(sigma_p) - detail::kHalfLog2Pi;
    }
    double tau = 0.0;
    if (l.skew) {
      tau = std::exp(theta[static_cast<std::size_t>(l.i_log_tau)]);
    }
    for (int b = 0; b < l.n_batters; ++b) {
      // u = diag(s) L v  =>  solve for v, density N(0, I) plus log det
      const double* u = &theta[static_cast<std::size_t>(l.i_z_b + kBatterDims * b)];
      double v[kBatterDims];
      for (int i = 0; i < kBatterDims; ++i) {
        double r = u[i] / s[i];
        for (int j = 0; j < i; ++j) r -= corr.L[i][j] * v[j];
        v[i] = r / corr.L[i][i];
      }
      for (int i = 0; i < kBatterDims; ++i) {
        lp += -0.5 * v[i] * v[i] - detail::kHalfLog2Pi - std::log(s[i]) - std::log(corr.L[i][i]);
      }
      if (l.skew) {
        const double nu = theta[static_cast<std::size_t>(l.i_z_nu + b)];
        lp += -0.5 * nu * nu / (tau * tau) - std::log(tau) - detail::kHalfLog2Pi;
      }
    }
    return lp;
  }

  // Log-determinant of the effect transform z -> effects at theta, so that
  // log_posterior(theta) == log_posterior_centered(transformed) + logdet.
  double effect_transform_logdet(std::span<const double> theta) const {
    const Layout& l = layout_;
    const double sigma_p = std::exp(theta[static_cast<std::size_t>(l.i_log_sigma_p)]);
    double s[kBatterDims];
    for (int k = 0; k < kBatterDims; ++k) s[k] = std::exp(theta[static_cast<std::size_t>(l.i_log_s + k)]);
    const auto corr = detail::CorrFactor::build(theta.subspan(static_cast<std::size_t>(l.i_corr), kNumCorr));
    double logdet = l.n_pitchers * std::log(sigma_p);
    for (int i = 0; i < kBatterDims; ++i) {
      logdet += l.n_batters * (std::log(s[i]) + std::log(corr.L[i][i]));
    }
    if (l.skew) {
      logdet += l.n_batters * theta[static_cast<std::size_t>(l.i_log_tau)];
    }
    return logdet;
  }

 private:
  double fixed_priors(std::span<const double> theta, std::span<double>* grad) const {
    const Layout& l = layout_;
    auto g = [&](int i) { return grad ? &(*grad)[static_cast<std::size_t>(i)] : nullptr; };
    double lp = 0.0;
    lp += detail::normal_logpdf(theta[static_cast<std::size_t>(l.i_mu0)], cfg_.fixed_prior_scale, g(l.i_mu0));
    lp += detail::normal_logpdf(theta[static_cast<std::size_t>(l.i_bB)], cfg_.fixed_prior_scale, g(l.i_bB));
    lp += detail::normal_logpdf(theta[static_cast<std::size_t>(l.i_bS)], cfg_.fixed_prior_scale, g(l.i_bS));
    lp += detail::normal_logpdf(theta[static_cast<std::size_t>(l.i_bX)], cfg_.fixed_prior_scale, g(l.i_bX));
    lp += detail::normal_logpdf(theta[static_cast<std::size_t>(l.i_bZ)], cfg_.fixed_prior_scale, g(l.i_bZ));
    if (l.skew) {
      lp += detail::normal_logpdf(theta[static_cast<std::size_t>(l.i_alpha0)], cfg_.shape_prior_scale, g(l.i_alpha0));
    }
    lp += detail::half_t3_logpdf_logscale(theta[static_cast<std::size_t>(l.i_log_sigma)], cfg_.sd_prior_scale, g(l.i_log_sigma));
    lp += detail::half_t3_logpdf_logscale(theta[static_cast<std::size_t>(l.i_log_sigma_p)], cfg_.sd_prior_scale, g(l.i_log_sigma_p));
    for (int k = 0; k < kBatterDims; ++k) {
      lp += detail::half_t3_logpdf_logscale(theta[static_cast<std::size_t>(l.i_log_s + k)], cfg_.sd_prior_scale, g(l.i_log_s + k));
    }
    if (l.skew) {
      lp += detail::half_t3_logpdf_logscale(theta[static_cast<std::size_t>(l.i_log_tau)], cfg_.sd_prior_scale, g(l.i_log_tau));
    }
    return lp;
  }

  // Likelihood with effects given directly (centered evaluation).
  double likelihood_from_effects(std::span<const double> theta) const {
    const Layout& l = layout_;
    const double sigma = std::exp(theta[static_cast<std::size_t>(l.i_log_sigma)]);
    double lp = 0.0;
    for (std::size_t i = 0; i < data_.n_obs(); ++i) {
      const int b = data_.batter[i];
      const int p = data_.pitcher[i];
      const double* u = &theta[static_cast<std::size_t>(l.i_z_b + kBatterDims * b)];
      double mu = theta[static_cast<std::size_t>(l.i_mu0)] + theta[static_cast<std::size_t>(l.i_z_p + p)] + u[0] +
                  theta[static_cast<std::size_t>(l.i_bB)] * data_.balls[i] +
                  (theta[static_cast<std::size_t>(l.i_bS)] + u[1]) * data_.strikes[i] +
                  (theta[static_cast<std::size_t>(l.i_bX)] + u[2]) * data_.loc_x[i] +
                  (theta[static_cast<std::size_t>(l.i_bZ)] + u[3]) * data_.loc_z[i];
      double alpha = 0.0;
      if (l.skew) {
        alpha = theta[static_cast<std::size_t>(l.i_alpha0)] + theta[static_cast<std::size_t>(l.i_z_nu + b)];
      }
      lp += sn::logpdf(data_.y[i], sn::from_mean(mu, sigma, alpha));
    }
    return lp;
  }

  double eval(std::span<const double> theta, std::span<double>* grad_out) const {
    const Layout& l = layout_;
    const int B = l.n_batters;
    const int P = l.n_pitchers;
    if (static_cast<int>(theta.size()) != l.dim) throw ArgumentError("theta dimension mismatch");
    if (grad_out) {
      if (static_cast<int>(grad_out->size()) != l.dim) throw ArgumentError("grad dimension mismatch");
      std::fill(grad_out->begin(), grad_out->end(), 0.0);
    }

    const double mu0 = theta[static_cast<std::size_t>(l.i_mu0)];
    const double bB = theta[static_cast<std::size_t>(l.i_bB)];
    const double bS = theta[static_cast<std::size_t>(l.i_bS)];
    const double bX = theta[static_cast<std::size_t>(l.i_bX)];
    const double bZ = theta[static_cast<std::size_t>(l.i_bZ)];
    const double sigma = std::exp(theta[static_cast<std::size_t>(l.i_log_sigma)]);
    const double alpha0 = l.skew ? theta[static_cast<std::size_t>(l.i_alpha0)] : 0.0;
    const double sigma_p = std::exp(theta[static_cast<std::size_t>(l.i_log_sigma_p)]);
    double s[kBatterDims];
    for (int k = 0; k < kBatterDims; ++k) s[k] = std::exp(theta[static_cast<std::size_t>(l.i_log_s + k)]);
    const double tau = l.skew ? std::exp(theta[static_cast<std::size_t>(l.i_log_tau)]) : 0.0;
    const auto corr = detail::CorrFactor::build(theta.subspan(static_cast<std::size_t>(l.i_corr), kNumCorr));

    // A = diag(s) * L
    double A[kBatterDims][kBatterDims] = {};
    for (int i = 0; i < kBatterDims; ++i) {
      for (int j = 0; j <= i; ++j) A[i][j] = s[i] * corr.L[i][j];
    }

    // materialize effects
    Workspace& ws = ws_;
    ws.gamma_p.assign(static_cast<std::size_t>(P), 0.0);
    for (int p = 0; p < P; ++p) ws.gamma_p[static_cast<std::size_t>(p)] = sigma_p * theta[static_cast<std::size_t>(l.i_z_p + p)];
    ws.u.assign(static_cast<std::size_t>(kBatterDims * B), 0.0);
    ws.nu.assign(static_cast<std::size_t>(B), 0.0);
    for (int b = 0; b < B; ++b) {
      const double* z = &theta[static_cast<std::size_t>(l.i_z_b + kBatterDims * b)];
      for (int i = 0; i < kBatterDims; ++i) {
        double acc = 0.0;
        for (int j = 0; j <= i; ++j) acc += A[i][j] * z[j];
        ws.u[static_cast<std::size_t>(kBatterDims * b + i)] = acc;
      }
      if (l.skew) ws.nu[static_cast<std::size_t>(b)] = tau * theta[static_cast<std::size_t>(l.i_z_nu + b)];
    }

    // ---- likelihood: scalar gather, vectorized middle, scalar scatter ----
    const double c_const = sn::kSqrt2OverPi;
    const auto n = static_cast<Eigen::Index>(data_.n_obs());
    ws.mu.resize(n);
    ws.alpha.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      const int b = data_.batter[iu];
      const int p = data_.pitcher[iu];
      const double* ub = &ws.u[static_cast<std::size_t>(kBatterDims * b)];
      ws.mu[i] = mu0 + ws.gamma_p[static_cast<std::size_t>(p)] + ub[0] + bB * data_.balls[iu] +
                 (bS + ub[1]) * data_.strikes[iu] + (bX + ub[2]) * data_.loc_x[iu] +
                 (bZ + ub[3]) * data_.loc_z[iu];
      ws.alpha[i] = l.skew ? alpha0 + ws.nu[static_cast<std::size_t>(b)] : 0.0;
    }

    Eigen::Map<const Eigen::ArrayXd> y_map(data_.y.data(), n);
    Eigen::Map<const Eigen::ArrayXd> balls_map(data_.balls.data(), n);
    Eigen::Map<const Eigen::ArrayXd> strikes_map(data_.strikes.data(), n);
    Eigen::Map<const Eigen::ArrayXd> lx_map(data_.loc_x.data(), n);
    Eigen::Map<const Eigen::ArrayXd> lz_map(data_.loc_z.data(), n);

    ws.inv_sq = (1.0 + ws.alpha.square()).rsqrt();
    ws.delta = ws.alpha * ws.inv_sq;
    // t = (y - xi)/sigma with xi = mu - sigma*delta*sqrt(2/pi)
    ws.t = (y_map - ws.mu) / sigma + ws.delta * c_const;
    ws.at = ws.alpha * ws.t;
    const double sum_log_cdf = detail::log_phi_mills_sum(ws.at, ws.zeta, ws.pm);

    const double log2_minus_half_log2pi = std::log(2.0) - detail::kHalfLog2Pi;
    double lp = sum_log_cdf - 0.5 * ws.t.square().sum() +
                static_cast<double>(n) *
                    (log2_minus_half_log2pi - theta[static_cast<std::size_t>(l.i_log_sigma)]);

    double d_mu0 = 0.0, d_bB = 0.0, d_bS = 0.0, d_bX = 0.0, d_bZ = 0.0;
    double d_sigma = 0.0, d_alpha0 = 0.0;
    std::vector<double>& d_gamma_p = ws.d_gamma_p;
    std::vector<double>& d_u = ws.d_u;
    std::vector<double>& d_nu = ws.d_nu;
    d_gamma_p.assign(static_cast<std::size_t>(P), 0.0);
    d_u.assign(static_cast<std::size_t>(kBatterDims * B), 0.0);
    d_nu.assign(static_cast<std::size_t>(B), 0.0);

    if (grad_out) {
      ws.d_xi = (ws.t - ws.alpha * ws.zeta) / sigma;
      ws.d_sig = (ws.t.square() - 1.0 - ws.at * ws.zeta) / sigma - ws.d_xi * ws.delta * c_const;
      d_mu0 = ws.d_xi.sum();
      d_bB = (ws.d_xi * balls_map).sum();
      d_bS = (ws.d_xi * strikes_map).sum();
      d_bX = (ws.d_xi * lx_map).sum();
      d_bZ = (ws.d_xi * lz_map).sum();
      d_sigma = ws.d_sig.sum();
      if (l.skew) {
        ws.d_alpha = ws.zeta * ws.t - ws.d_xi * sigma * c_const * ws.inv_sq.cube();
        d_alpha0 = ws.d_alpha.sum();
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        const int b = data_.batter[iu];
        const double d_mu = ws.d_xi[i];
        d_gamma_p[static_cast<std::size_t>(data_.pitcher[iu])] += d_mu;
        double* du = &d_u[static_cast<std::size_t>(kBatterDims * b)];
        du[0] += d_mu;
        du[1] += d_mu * data_.strikes[iu];
        du[2] += d_mu * data_.loc_x[iu];
        du[3] += d_mu * data_.loc_z[iu];
        if (l.skew) d_nu[static_cast<std::size_t>(b)] += ws.d_alpha[i];
      }
    }

    // ---- standard-normal priors on z blocks ----
    for (int p = 0; p < P; ++p) {
      const double z = theta[static_cast<std::size_t>(l.i_z_p + p)];
      lp += -0.5 * z * z - detail::kHalfLog2Pi;
    }
    for (int b = 0; b < B; ++b) {
      for (int k = 0; k < kBatterDims; ++k) {
        const double z = theta[static_cast<std::size_t>(l.i_z_b + kBatterDims * b + k)];
        lp += -0.5 * z * z - detail::kHalfLog2Pi;
      }
      if (l.skew) {
        const double z = theta[static_cast<std::size_t>(l.i_z_nu + b)];
        lp += -0.5 * z * z - detail::kHalfLog2Pi;
      }
    }

    // ---- LKJ(eta = 1) prior on L and the transform Jacobian ----
    lp += corr.log_jacobian;
    for (int i = 1; i < kBatterDims; ++i) lp += (kBatterDims - 1 - i) * std::log(corr.L[i][i]);

    // ---- fixed-effect and sd priors ----
    lp += fixed_priors(theta, grad_out);

    if (!grad_out) return lp;
    auto& g = *grad_out;

    g[static_cast<std::size_t>(l.i_mu0)] += d_mu0;
    g[static_cast<std::size_t>(l.i_bB)] += d_bB;
    g[static_cast<std::size_t>(l.i_bS)] += d_bS;
    g[static_cast<std::size_t>(l.i_bX)] += d_bX;
    g[static_cast<std::size_t>(l.i_bZ)] += d_bZ;
    g[static_cast<std::size_t>(l.i_log_sigma)] += d_sigma * sigma;
    if (l.skew) g[static_cast<std::size_t>(l.i_alpha0)] += d_alpha0;

    // pitcher effects
    double d_log_sigma_p = 0.0;
    for (int p = 0; p < P; ++p) {
      const double z = theta[static_cast<std::size_t>(l.i_z_p + p)];
      g[static_cast<std::size_t>(l.i_z_p + p)] += d_gamma_p[static_cast<std::size_t>(p)] * sigma_p - z;
      d_log_sigma_p += d_gamma_p[static_cast<std::size_t>(p)] * z * sigma_p;
    }
    g[static_cast<std::size_t>(l.i_log_sigma_p)] += d_log_sigma_p;

    // batter effects: u = A z with A = diag(s) L
    double dA[kBatterDims][kBatterDims] = {};
    for (int b = 0; b < B; ++b) {
      const double* z = &theta[static_cast<std::size_t>(l.i_z_b + kBatterDims * b)];
      const double* du = &d_u[static_cast<std::size_t>(kBatterDims * b)];
      double* gz = &g[static_cast<std::size_t>(l.i_z_b + kBatterDims * b)];
      for (int j = 0; j < kBatterDims; ++j) {
        double acc = 0.0;
        for (int i = j; i < kBatterDims; ++i) acc += A[i][j] * du[i];
        gz[j] += acc - z[j];
      }
      for (int i = 0; i < kBatterDims; ++i) {
        for (int j = 0; j <= i; ++j) dA[i][j] += du[i] * z[j];
      }
      if (l.skew) {
        const double zn = theta[static_cast<std::size_t>(l.i_z_nu + b)];
        g[static_cast<std::size_t>(l.i_z_nu + b)] += d_nu[static_cast<std::size_t>(b)] * tau - zn;
      }
    }
    if (l.skew) {
      double d_log_tau = 0.0;
      for (int b = 0; b < B; ++b) {
        d_log_tau += d_nu[static_cast<std::size_t>(b)] * theta[static_cast<std::size_t>(l.i_z_nu + b)] * tau;
      }
      g[static_cast<std::size_t>(l.i_log_tau)] += d_log_tau;
    }

    // A = diag(s) L: dL = diag(s)^T dA, ds_i = sum_j L_ij dA_ij
    double dL[kBatterDims][kBatterDims] = {};
    for (int i = 0; i < kBatterDims; ++i) {
      double ds_i = 0.0;
      for (int j = 0; j <= i; ++j) {
        dL[i][j] = s[i] * dA[i][j];
        ds_i += corr.L[i][j] * dA[i][j];
      }
      g[static_cast<std::size_t>(l.i_log_s + i)] += ds_i * s[i];
    }
    // LKJ prior contribution on the diagonal
    for (int i = 1; i < kBatterDims; ++i) {
      dL[i][i] += (kBatterDims - 1 - i) / corr.L[i][i];
    }
    corr.backward(dL, std::span<double>(g).subspan(static_cast<std::size_t>(l.i_corr), kNumCorr));

    return lp;
  }

  // Reusable buffers for eval(); makes log_posterior[_grad] non-reentrant,
  // which is fine for the sequential sampler but not for concurrent calls
  // on one model instance.
  struct Workspace {
    std::vector<double> gamma_p, u, nu, d_gamma_p, d_u, d_nu;
    Eigen::ArrayXd mu, alpha, inv_sq, delta, t, at, zeta, d_xi, d_sig, d_alpha;
    detail::PhiMillsWork pm;
  };

  IntentionData data_;
  ModelConfig cfg_;
  Layout layout_;
  mutable Workspace ws_;
};

}  // namespace swv::hier
