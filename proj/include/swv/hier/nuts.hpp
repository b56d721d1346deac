#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "swv/common.hpp"

// Dynamic HMC: multinomial NUTS with dual-averaging step-size adaptation
// and a diagonal mass matrix adapted over expanding warmup windows.

namespace swv::nuts {

struct Config {
  int chains = 4;
  int warmup = 1000;
  int draws = 1000;
  std::uint64_t seed = 1;
  double target_accept = 0.8;
  int max_depth = 10;
  double divergence_threshold = 1000.0;
  // Final warmup stretch adapting only the step size at the final mass
  // matrix; longer buffers settle the dual averager closer to target.
  int term_buffer = 150;
};

struct ChainResult {
  std::vector<std::vector<double>> draws;  // post-warmup positions
  int divergences = 0;                     // post-warmup
  double step_size = 0.0;
  double mean_accept = 0.0;
};

using LogpGrad = std::function<double(std::span<const double>, std::span<double>)>;
using InitFn = std::function<std::vector<double>(int chain, Rng& rng)>;

namespace detail {

struct Point {
  std::vector<double> q, p, grad;
  double logp = 0.0;
};

class Sampler {
 public:
  Sampler(const LogpGrad& f, std::size_t dim, const Config& cfg, Rng rng)
      : f_(f), dim_(dim), cfg_(cfg), rng_(rng), inv_mass_(dim, 1.0) {}

  ChainResult run(std::vector<double> q0) {
    Point cur;
    cur.q = std::move(q0);
    cur.p.assign(dim_, 0.0);
    cur.grad.assign(dim_, 0.0);
    cur.logp = f_(cur.q, cur.grad);
    if (!std::isfinite(cur.logp)) throw ArgumentError("nuts: initial point has non-finite density");

    find_reasonable_step_size(cur);
    init_dual_averaging();

    ChainResult out;
    WarmupSchedule sched(cfg_.warmup, cfg_.term_buffer);
    std::vector<double> welford_mean(dim_, 0.0), welford_m2(dim_, 0.0);
    std::size_t welford_n = 0;
    double accept_sum = 0.0;

    const int total = cfg_.warmup + cfg_.draws;
    for (int iter = 0; iter < total; ++iter) {
      const bool warming = iter < cfg_.warmup;
      const auto res = transition(cur);
      cur = res.next;
      if (warming) {
        adapt_step_size(res.accept_stat);
        if (sched.in_slow_window(iter)) {
          ++welford_n;
          for (std::size_t i = 0; i < dim_; ++i) {
            const double d = cur.q[i] - welford_mean[i];
            welford_mean[i] += d / static_cast<double>(welford_n);
            welford_m2[i] += d * (cur.q[i] - welford_mean[i]);
          }
          if (sched.slow_window_ends(iter)) {
            update_mass(welford_mean, welford_m2, welford_n);
            welford_mean.assign(dim_, 0.0);
            welford_m2.assign(dim_, 0.0);
            welford_n = 0;
            find_reasonable_step_size(cur);
            init_dual_averaging();
          }
        }
        if (iter + 1 == cfg_.warmup) eps_ = std::exp(log_eps_bar_);
      } else {
        out.draws.push_back(cur.q);
        out.divergences += res.divergent ? 1 : 0;
        accept_sum += res.accept_stat;
      }
    }
    out.step_size = eps_;
    out.mean_accept = cfg_.draws > 0 ? accept_sum / cfg_.draws : 0.0;
    return out;
  }

 private:
  struct WarmupSchedule {
    int init_buffer = 75, term_buffer = 50, warmup = 1000;
    WarmupSchedule(int w, int term) : term_buffer(term), warmup(w) {
      if (w < init_buffer + 2 * term_buffer) {
        init_buffer = std::max(1, static_cast<int>(0.15 * w));
        term_buffer = std::max(1, static_cast<int>(0.1 * w));
      }
    }
    bool in_slow_window(int iter) const {
      return iter >= init_buffer && iter < warmup - term_buffer;
    }
    bool slow_window_ends(int iter) const {
      if (!in_slow_window(iter)) return false;
      // doubling windows: 25, 50, 100, ... the last one absorbs the rest
      int start = init_buffer, size = 25;
      const int end_slow = warmup - term_buffer;
      while (true) {
        int end = start + size;
        if (end + 2 * size > end_slow) end = end_slow;  // absorb remainder
        if (iter == end - 1) return true;
        if (iter < end) return false;
        start = end;
        size *= 2;
      }
    }
  };

  struct TransitionResult {
    Point next;
    double accept_stat = 0.0;
    bool divergent = false;
  };

  double hamiltonian(const Point& s) const {
    double kin = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) kin += s.p[i] * s.p[i] * inv_mass_[i];
    return -s.logp + 0.5 * kin;
  }

  // One leapfrog step in place; returns false on non-finite density.
  bool leapfrog(Point& s, double eps) {
    for (std::size_t i = 0; i < dim_; ++i) s.p[i] += 0.5 * eps * s.grad[i];
    for (std::size_t i = 0; i < dim_; ++i) s.q[i] += eps * inv_mass_[i] * s.p[i];
    s.logp = f_(s.q, s.grad);
    if (!std::isfinite(s.logp)) return false;
    for (std::size_t i = 0; i < dim_; ++i) s.p[i] += 0.5 * eps * s.grad[i];
    return true;
  }

  bool uturn(const Point& minus, const Point& plus) const {
    double dot_minus = 0.0, dot_plus = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double dq = plus.q[i] - minus.q[i];
      dot_minus += dq * inv_mass_[i] * minus.p[i];
      dot_plus += dq * inv_mass_[i] * plus.p[i];
    }
    return dot_minus < 0.0 || dot_plus < 0.0;
  }

  struct Subtree {
    Point minus, plus, proposal;
    double log_sum_w = 0.0;
    double sum_accept = 0.0;
    int n_leapfrog = 0;
    bool divergent = false;
    bool ok = true;  // no u-turn inside
  };

  static double log_sum_exp(double a, double b) {
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
  }

  Subtree build_tree(int depth, const Point& from, int dir, double h0) {
    Subtree t;
    if (depth == 0) {
      Point s = from;
      const bool finite = leapfrog(s, dir * eps_);
      t.n_leapfrog = 1;
      const double h = finite ? hamiltonian(s) : std::numeric_limits<double>::infinity();
      const double dh = h - h0;
      t.divergent = !(dh < cfg_.divergence_threshold);
      t.log_sum_w = -dh;
      t.sum_accept = dh > 0.0 ? std::exp(-dh) : 1.0;
      if (!std::isfinite(t.log_sum_w)) t.log_sum_w = -std::numeric_limits<double>::infinity();
      t.minus = t.plus = t.proposal = std::move(s);
      return t;
    }
    Subtree first = build_tree(depth - 1, from, dir, h0);
    if (first.divergent || !first.ok) return first;
    const Point& edge = dir > 0 ? first.plus : first.minus;
    Subtree second = build_tree(depth - 1, edge, dir, h0);

    Subtree t2;
    t2.n_leapfrog = first.n_leapfrog + second.n_leapfrog;
    t2.sum_accept = first.sum_accept + second.sum_accept;
    t2.divergent = second.divergent;
    t2.minus = dir > 0 ? std::move(first.minus) : std::move(second.minus);
    t2.plus = dir > 0 ? std::move(second.plus) : std::move(first.plus);
    t2.log_sum_w = log_sum_exp(first.log_sum_w, second.log_sum_w);
    const double p_second = std::exp(second.log_sum_w - t2.log_sum_w);
    t2.proposal = rng_.uniform() < p_second ? std::move(second.proposal) : std::move(first.proposal);
    t2.ok = !second.divergent && second.ok && !uturn(t2.minus, t2.plus);
    return t2;
  }

  TransitionResult transition(const Point& cur) {
    Point start = cur;
    for (std::size_t i = 0; i < dim_; ++i) {
      start.p[i] = rng_.normal() / std::sqrt(inv_mass_[i]);
    }
    const double h0 = hamiltonian(start);

    Point minus = start, plus = start, proposal = start;
    double log_sum_w = 0.0;
    double sum_accept = 0.0;
    int n_leapfrog = 0;
    bool divergent = false;

    for (int depth = 0; depth < cfg_.max_depth; ++depth) {
      const int dir = rng_.bernoulli(0.5) ? 1 : -1;
      const Point& edge = dir > 0 ? plus : minus;
      Subtree sub = build_tree(depth, edge, dir, h0);
      sum_accept += sub.sum_accept;
      n_leapfrog += sub.n_leapfrog;
      if (sub.divergent) {
        divergent = true;
        break;
      }
      if (!sub.ok) break;
      // multinomial update: sample from the new subtree proportionally
      const double p_new = std::exp(sub.log_sum_w - log_sum_exp(log_sum_w, sub.log_sum_w));
      if (rng_.uniform() < p_new) proposal = sub.proposal;
      log_sum_w = log_sum_exp(log_sum_w, sub.log_sum_w);
      if (dir > 0) plus = std::move(sub.plus);
      else minus = std::move(sub.minus);
      if (uturn(minus, plus)) break;
    }

    TransitionResult res;
    res.next = std::move(proposal);
    res.accept_stat = n_leapfrog > 0 ? sum_accept / n_leapfrog : 0.0;
    res.divergent = divergent;
    return res;
  }

  void find_reasonable_step_size(const Point& cur) {
    eps_ = 1.0;
    Point probe = cur;
    for (std::size_t i = 0; i < dim_; ++i) probe.p[i] = rng_.normal() / std::sqrt(inv_mass_[i]);
    const double h0 = hamiltonian(probe);
    Point step = probe;
    double dh = -std::numeric_limits<double>::infinity();
    if (leapfrog(step, eps_)) dh = h0 - hamiltonian(step);
    const int dir = dh > std::log(0.5) ? 1 : -1;
    for (int k = 0; k < 50; ++k) {
      Point s = probe;
      double d = -std::numeric_limits<double>::infinity();
      if (leapfrog(s, eps_)) d = h0 - hamiltonian(s);
      if ((dir == 1 && d <= std::log(0.5)) || (dir == -1 && d >= std::log(0.5))) break;
      eps_ *= dir == 1 ? 2.0 : 0.5;
    }
  }

  void init_dual_averaging() {
    da_mu_ = std::log(10.0 * eps_);
    da_log_eps_bar_ = 0.0;
    da_h_bar_ = 0.0;
    da_count_ = 0;
    log_eps_bar_ = std::log(eps_);
  }

  void adapt_step_size(double accept_stat) {
    ++da_count_;
    constexpr double gamma = 0.05, t0 = 10.0, kappa = 0.75;
    const double eta = 1.0 / (da_count_ + t0);
    da_h_bar_ = (1.0 - eta) * da_h_bar_ + eta * (cfg_.target_accept - accept_stat);
    const double log_eps = da_mu_ - std::sqrt(static_cast<double>(da_count_)) / gamma * da_h_bar_;
    const double w = std::pow(static_cast<double>(da_count_), -kappa);
    da_log_eps_bar_ = w * log_eps + (1.0 - w) * da_log_eps_bar_;
    eps_ = std::exp(log_eps);
    log_eps_bar_ = da_log_eps_bar_;
  }

  void update_mass(const std::vector<double>& mean, const std::vector<double>& m2, std::size_t n) {
    (void)mean;
    if (n < 10) return;
    const double w = static_cast<double>(n) / (n + 5.0);
    for (std::size_t i = 0; i < dim_; ++i) {
      const double var = m2[i] / static_cast<double>(n - 1);
      inv_mass_[i] = std::max(w * var + (1.0 - w) * 1e-3, 1e-10);
    }
  }

  const LogpGrad& f_;
  std::size_t dim_;
  Config cfg_;
  Rng rng_;
  std::vector<double> inv_mass_;
  double eps_ = 1.0;
  double da_mu_ = 0.0, da_log_eps_bar_ = 0.0, da_h_bar_ = 0.0, log_eps_bar_ = 0.0;
  int da_count_ = 0;
};

}  // namespace detail

// Chains run sequentially with independent substreams; results are
// deterministic for a given (seed, chain count).
inline std::vector<ChainResult> sample(const LogpGrad& f, std::size_t dim, const Config& cfg,
                                       const InitFn& init) {
  std::vector<ChainResult> out;
  Rng master(cfg.seed);
  for (int chain = 0; chain < cfg.chains; ++chain) {
    Rng rng = master.fork(static_cast<std::uint64_t>(chain));
    std::vector<double> q0;
    double lp = -std::numeric_limits<double>::infinity();
    std::vector<double> g(dim);
    for (int attempt = 0; attempt < 100 && !std::isfinite(lp); ++attempt) {
      q0 = init(chain, rng);
      lp = f(q0, g);
    }
    detail::Sampler sampler(f, dim, cfg, rng.fork(1000));
    out.push_back(sampler.run(std::move(q0)));
  }
  return out;
}

}  // namespace swv::nuts
