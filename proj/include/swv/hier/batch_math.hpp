#pragma once

#include <Eigen/Core>
#include <cmath>

#include "swv/skew_normal.hpp"

// Batched log Phi(x) and inverse Mills ratio phi(x)/Phi(x) over Eigen
// arrays. The scalar route (std::erfc + log + exp per element) dominates
// the sampler's gradient cost, so this evaluates the scaled complementary
// error function erfc(y)*exp(y^2) with Cody's rational approximations
// (netlib calerf): the only transcendentals left are one vectorized exp
// and one vectorized log per element, and each rational is a single fused
// expression so the whole routine is a handful of passes over the data.
//
//   |x| <  0.6629:  Phi from the erf rational directly
//   x >= 0       :  Phi = 1 - 0.5*R(y)*e,  e = exp(-x^2/2), y = |x|/sqrt(2)
//   x <  0       :  Phi = 0.5*R(y)*e, so log Phi = log(0.5*R) - x^2/2 and
//                   the Mills ratio is 2*phi(0)/R exactly -- no underflow
//                   however far into the tail x goes.
//
// Matches sn::log_std_normal_cdf to ~1e-14 relative over the erfc range.

namespace swv::hier::detail {

struct PhiMillsWork {
  Eigen::ArrayXd y, e, r, phi, t1, t2;
  void resize(Eigen::Index n) {
    y.resize(n); e.resize(n); r.resize(n); phi.resize(n); t1.resize(n); t2.resize(n);
  }
};

namespace phimills {

inline constexpr double kInvSqrtPi = 0.5641895835477562869480795;   // 1/sqrt(pi)
inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;  // phi(0)
inline constexpr double kSmall = 0.46875 * M_SQRT2;                 // erf-branch cut on |x|

// Fills w.r (erfcx on |x|/sqrt(2)), w.e (exp(-x^2/2)), w.phi (Phi(x), which
// underflows harmlessly in the deep negative tail) and the Mills ratio.
inline void core(const Eigen::ArrayXd& x, Eigen::ArrayXd& zeta, PhiMillsWork& w) {
  const Eigen::Index n = x.size();
  zeta.resize(n);
  w.resize(n);

  // Cody's rational coefficients (calerf).
  constexpr double A0 = 3.16112374387056560e+00, A1 = 1.13864154151050156e+02,
                   A2 = 3.77485237685302021e+02, A3 = 3.20937758913846947e+03,
                   A4 = 1.85777706184603153e-01;
  constexpr double B0 = 2.36012909523441209e+01, B1 = 2.44024637934444173e+02,
                   B2 = 1.28261652607737228e+03, B3 = 2.84423683343917062e+03;
  constexpr double C0 = 5.64188496988670089e-01, C1 = 8.88314979438837594e+00,
                   C2 = 6.61191906371416295e+01, C3 = 2.98635138197400131e+02,
                   C4 = 8.81952221241769090e+02, C5 = 1.71204761263407058e+03,
                   C6 = 2.05107837782607147e+03, C7 = 1.23033935479799725e+03,
                   C8 = 2.15311535474403846e-08;
  constexpr double D0 = 1.57449261107098347e+01, D1 = 1.17693950891312499e+02,
                   D2 = 5.37181101862009858e+02, D3 = 1.62138957456669019e+03,
                   D4 = 3.29079923573345963e+03, D5 = 4.36261909014324716e+03,
                   D6 = 3.43936767414372164e+03, D7 = 1.23033935480374942e+03;
  constexpr double P0 = 3.05326634961232344e-01, P1 = 3.60344899949804439e-01,
                   P2 = 1.25781726111229246e-01, P3 = 1.60837851487422766e-02,
                   P4 = 6.58749161529837803e-04, P5 = 1.63153871373020978e-02;
  constexpr double Q0 = 2.56852019228982242e+00, Q1 = 1.87295284992346047e+00,
                   Q2 = 5.27905102951428412e-01, Q3 = 6.05183413124413191e-02,
                   Q4 = 2.33520497626869185e-03;

  w.y = x.abs() * sn::kInvSqrt2;  // erfc argument
  const auto& y = w.y;
  w.e = (-0.5 * x.square()).exp();

  // R(y) = erfc(y)*exp(y^2). Mid range (0.46875 <= y <= 4): one fused
  // rational in y. Far range (y > 4): rational in 1/y^2, clamped so the
  // unused lanes stay finite.
  // Intermediates are materialized (t1, t2): an unevaluated expression used
  // k times inside a fused Horner chain would be recomputed k times.
  w.r = ((((((((C8 * y + C0) * y + C1) * y + C2) * y + C3) * y + C4) * y + C5) * y + C6) * y + C7) /
        ((((((((y + D0) * y + D1) * y + D2) * y + D3) * y + D4) * y + D5) * y + D6) * y + D7);
  w.t1 = y.max(1.0);                 // clamp keeps the unused far-range lanes finite
  w.t2 = w.t1.square().inverse();    // 1/y^2
  {
    const auto& ysq = w.t2;
    w.t1 = (kInvSqrtPi -
            ysq * (((((P5 * ysq + P0) * ysq + P1) * ysq + P2) * ysq + P3) * ysq + P4) /
                  (((((ysq + Q0) * ysq + Q1) * ysq + Q2) * ysq + Q3) * ysq + Q4)) /
           w.t1;
    w.r = (y > 4.0).select(w.t1, w.r);
  }

  // Phi: erf rational in z = y^2 below the cut (signed via x), erfc route above.
  w.t2 = y.square();
  {
    const auto& z = w.t2;
    w.t1 = 0.5 + (0.5 * sn::kInvSqrt2) * x *
                     ((((A4 * z + A0) * z + A1) * z + A2) * z + A3) /
                     ((((z + B0) * z + B1) * z + B2) * z + B3);
  }
  w.phi = (x.abs() < kSmall)
              .select(w.t1, (x < 0.0).select(0.5 * w.r * w.e, 1.0 - 0.5 * w.r * w.e));

  // Mills ratio: the deep negative tail uses 2*phi(0)/R exactly, dodging the
  // underflowing exp.
  zeta = (x <= -kSmall).select((2.0 * kInvSqrt2Pi) / w.r, kInvSqrt2Pi * w.e / w.phi);
}

}  // namespace phimills

inline void log_phi_mills(const Eigen::ArrayXd& x, Eigen::ArrayXd& log_cdf,
                          Eigen::ArrayXd& zeta, PhiMillsWork& w) {
  using namespace phimills;
  core(x, zeta, w);
  // One log for all branches: the deep negative tail takes log(0.5*R) - x^2/2.
  const auto tail = x <= -kSmall;
  log_cdf = tail.select(0.5 * w.r, w.phi).log() - tail.select(0.5 * x.square(), 0.0);
}

// Returns sum_i log Phi(x_i) and fills the Mills ratios. The log-sum runs
// through blockwise products with one scalar log per block instead of a
// vector log per lane; blocks that underflow (or hold non-finite lanes)
// fall back to per-lane logs.
inline double log_phi_mills_sum(const Eigen::ArrayXd& x, Eigen::ArrayXd& zeta, PhiMillsWork& w) {
  using namespace phimills;
  core(x, zeta, w);
  const Eigen::Index n = x.size();
  const auto tail = x <= -kSmall;
  w.t1 = tail.select(0.5 * w.r, w.phi);
  double sum = -0.5 * tail.select(x.square(), 0.0).sum();
  constexpr Eigen::Index kBlock = 64;
  for (Eigen::Index i = 0; i < n; i += kBlock) {
    const Eigen::Index len = std::min(kBlock, n - i);
    const double pr = w.t1.segment(i, len).prod();
    if (pr > 1e-280 && std::isfinite(pr)) {
      sum += std::log(pr);
    } else {
      for (Eigen::Index j = i; j < i + len; ++j) sum += std::log(w.t1[j]);
    }
  }
  return sum;
}

}  // namespace swv::hier::detail
