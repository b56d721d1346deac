#pragma once

#include <cmath>

#include "swv/common.hpp"

// Skew-normal kernel: density 2/w * phi((x-xi)/w) * Phi(a*(x-xi)/w).
// Internally parameterized by (location xi, scale w, shape a); a mean view
// is provided via the identity mean = xi + w * delta * sqrt(2/pi) with
// delta = a / sqrt(1 + a^2).

namespace swv::sn {

inline constexpr double kSqrt2OverPi = 0.7978845608028653558798921;  // sqrt(2/pi)
inline constexpr double kLogSqrt2Pi = 0.9189385332046727417803297;   // log(sqrt(2*pi))
inline constexpr double kInvSqrt2 = 0.7071067811865475244008444;

struct Params {
  double location = 0.0;  // xi
  double scale = 1.0;     // w > 0
  double shape = 0.0;     // a
};

inline double delta_of_shape(double a) { return a / std::sqrt(1.0 + a * a); }

inline double location_to_mean(double xi, double w, double a) {
  return xi + w * delta_of_shape(a) * kSqrt2OverPi;
}

inline double mean_to_location(double mu, double w, double a) {
  return mu - w * delta_of_shape(a) * kSqrt2OverPi;
}

inline Params from_mean(double mu, double w, double a) {
  return Params{mean_to_location(mu, w, a), w, a};
}

// log Phi(x), stable for large negative x. Below -20 the erfc route is
// still exact but we switch to the asymptotic series well before erfc
// underflows (~ -37) so the tail stays accurate to machine precision.
inline double log_std_normal_cdf(double x) {
  if (x > -20.0) {
    return std::log(0.5 * std::erfc(-x * kInvSqrt2));
  }
  const double x2 = x * x;
  // Phi(x) ~ phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8)
  const double series =
      1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) + 105.0 / (x2 * x2 * x2 * x2);
  return -0.5 * x2 - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

inline double log_std_normal_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

// Inverse Mills ratio phi(x)/Phi(x).
inline double mills_ratio(double x) {
  return std::exp(log_std_normal_pdf(x) - log_std_normal_cdf(x));
}

inline void check(const Params& p) {
  if (!(p.scale > 0.0)) throw ArgumentError("skew-normal scale must be > 0");
}

inline double logpdf(double x, const Params& p) {
  check(p);
  const double t = (x - p.location) / p.scale;
  return std::log(2.0) - std::log(p.scale) + log_std_normal_pdf(t) +
         log_std_normal_cdf(p.shape * t);
}

struct Grad {
  double d_location = 0.0;
  double d_scale = 0.0;
  double d_shape = 0.0;
};

inline Grad grad_logpdf(double x, const Params& p) {
  check(p);
  const double t = (x - p.location) / p.scale;
  const double zeta = mills_ratio(p.shape * t);
  Grad g;
  g.d_location = (t - p.shape * zeta) / p.scale;
  g.d_scale = (t * t - 1.0 - p.shape * t * zeta) / p.scale;
  g.d_shape = zeta * t;
  return g;
}

// Two-normal representation: xi + w * (delta*|Z0| + sqrt(1-delta^2)*Z1).
inline double sample_one(const Params& p, Rng& rng) {
  const double d = delta_of_shape(p.shape);
  const double z0 = rng.normal();
  const double z1 = rng.normal();
  return p.location + p.scale * (d * std::fabs(z0) + std::sqrt(1.0 - d * d) * z1);
}

inline std::vector<double> sample(const Params& p, std::size_t n, std::uint64_t seed) {
  check(p);
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = sample_one(p, rng);
  return out;
}

inline double analytic_mean(const Params& p) {
  return location_to_mean(p.location, p.scale, p.shape);
}

inline double analytic_variance(const Params& p) {
  const double d = delta_of_shape(p.shape);
  return p.scale * p.scale * (1.0 - 2.0 * d * d / M_PI);
}

inline double analytic_skewness(const Params& p) {
  const double d = delta_of_shape(p.shape);
  const double m = d * kSqrt2OverPi;
  return 0.5 * (4.0 - M_PI) * m * m * m / std::pow(1.0 - m * m, 1.5);
}

}  // namespace swv::sn
