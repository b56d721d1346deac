#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "swv/common.hpp"

// MCMC convergence diagnostics: split R-hat and rank-normalized bulk ESS.

namespace swv::diag {

struct ParamDiagnostics {
  double split_rhat = 0.0;
  double bulk_ess = 0.0;
  bool defined = true;  // false for (near-)constant parameter columns
};

namespace detail {

// Acklam's rational approximation to the standard normal quantile.
inline double inv_std_normal_cdf(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p <= phigh) {
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  }
  q = std::sqrt(-2 * std::log(1 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
}

// Split each chain in half.
inline std::vector<std::vector<double>> split_chains(const std::vector<std::vector<double>>& chains) {
  std::vector<std::vector<double>> out;
  for (const auto& c : chains) {
    const std::size_t half = c.size() / 2;
    out.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
    out.emplace_back(c.begin() + static_cast<std::ptrdiff_t>(c.size() - half), c.end());
  }
  return out;
}

// Rank-normalize across all chains (average ranks for ties).
inline std::vector<std::vector<double>> rank_normalize(const std::vector<std::vector<double>>& chains) {
  struct Item {
    double v;
    std::size_t chain, idx;
  };
  std::vector<Item> items;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (std::size_t i = 0; i < chains[c].size(); ++i) items.push_back({chains[c][i], c, i});
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.v < b.v; });
  const double n = static_cast<double>(items.size());
  std::vector<std::vector<double>> out(chains.size());
  for (std::size_t c = 0; c < chains.size(); ++c) out[c].resize(chains[c].size());
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t j = i;
    while (j < items.size() && items[j].v == items[i].v) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    const double z = inv_std_normal_cdf((avg_rank - 0.375) / (n + 0.25));
    for (std::size_t k = i; k < j; ++k) out[items[k].chain][items[k].idx] = z;
    i = j;
  }
  return out;
}

inline double chain_mean(const std::vector<double>& c) { return mean(c); }

inline double rhat_of(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  const std::size_t n = chains[0].size();
  std::vector<double> means(m), vars(m);
  for (std::size_t c = 0; c < m; ++c) {
    means[c] = chain_mean(chains[c]);
    vars[c] = variance(chains[c]);
  }
  const double w = mean(vars);
  const double b_over_n = variance(means);
  if (w <= 0.0) return 1.0;
  const double var_plus = (static_cast<double>(n - 1) / n) * w + b_over_n;
  return std::sqrt(var_plus / w);
}

// Bulk ESS via Geyer's initial monotone positive sequence over the mean
// autocorrelation of the split chains.
inline double ess_of(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  const std::size_t n = chains[0].size();
  std::vector<double> means(m), vars(m);
  for (std::size_t c = 0; c < m; ++c) {
    means[c] = chain_mean(chains[c]);
    vars[c] = variance(chains[c]);
  }
  const double w = mean(vars);
  const double var_plus = (static_cast<double>(n - 1) / n) * w + variance(means);
  if (var_plus <= 0.0) return 0.0;

  auto acov = [&](std::size_t chain, std::size_t lag) {
    const auto& c = chains[chain];
    double s = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) s += (c[t] - means[chain]) * (c[t + lag] - means[chain]);
    return s / static_cast<double>(n);
  };

  double rho_sum = 0.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t lag = 1; lag + 1 < n; lag += 2) {
    double acov_a = 0.0, acov_b = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      acov_a += acov(c, lag);
      acov_b += acov(c, lag + 1);
    }
    acov_a /= static_cast<double>(m);
    acov_b /= static_cast<double>(m);
    const double rho_a = 1.0 - (w - acov_a) / var_plus;
    const double rho_b = 1.0 - (w - acov_b) / var_plus;
    double pair = rho_a + rho_b;
    if (pair < 0.0) break;
    pair = std::min(pair, prev_pair);  // initial monotone sequence
    prev_pair = pair;
    rho_sum += pair;
  }
  const double total = static_cast<double>(m * n);
  return total / (1.0 + 2.0 * rho_sum);
}

}  // namespace detail

// chains: one vector of draws per chain, all the same length.
inline ParamDiagnostics diagnose_parameter(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) throw ArgumentError("diagnostics require at least 2 chains");
  for (const auto& c : chains) {
    if (c.size() != chains[0].size()) throw ArgumentError("chains must have equal length");
  }
  ParamDiagnostics out;
  // near-constant column: R-hat/ESS are not applicable
  double lo = chains[0][0], hi = chains[0][0];
  for (const auto& c : chains) {
    for (double v : c) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi - lo > 1e-300)) {
    out.defined = false;
    return out;
  }
  const auto split = detail::split_chains(chains);
  const auto ranked = detail::rank_normalize(split);
  out.split_rhat = detail::rhat_of(ranked);
  out.bulk_ess = detail::ess_of(ranked);
  return out;
}

}  // namespace swv::diag
