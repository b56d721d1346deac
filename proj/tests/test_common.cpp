#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "swv/common.hpp"

using namespace swv;

TEST_CASE("rng is deterministic for a given seed") {
  Rng a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    all_equal = all_equal && (x == b.next_u64());
    any_diff = any_diff || (x != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("rng uniform stays in [0,1) and matches moments") {
  Rng rng(7);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(std::fabs(sum / n - 0.5) < 0.005);
}

TEST_CASE("rng uniform_int covers its range without bias") {
  Rng rng(11);
  std::array<int, 5> counts{};
  const int n = 50000;
  for (int i = 0; i < n; ++i) counts[rng.uniform_int(5)]++;
  for (int c : counts) {
    CHECK(c > n / 5 - 600);
    CHECK(c < n / 5 + 600);
  }
}

TEST_CASE("rng normal has standard moments") {
  Rng rng(123);
  const int n = 200000;
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  CHECK(std::fabs(mean(x)) < 0.01);
  CHECK(std::fabs(sd(x) - 1.0) < 0.01);
}

TEST_CASE("rng fork yields distinct independent-looking streams") {
  Rng base(5);
  Rng f0 = base.fork(0);
  Rng f1 = base.fork(1);
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    if (f0.next_u64() == f1.next_u64()) ++same;
  }
  CHECK(same == 0);
}

TEST_CASE("shuffle produces a permutation") {
  Rng rng(9);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  rng.shuffle(v);
  std::set<int> s(v.begin(), v.end());
  CHECK(s.size() == 50);
  CHECK(*s.begin() == 0);
  CHECK(*s.rbegin() == 49);
}

TEST_CASE("pairwise_sum matches naive accumulation") {
  Rng rng(3);
  std::vector<double> x(1001);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  const double naive = std::accumulate(x.begin(), x.end(), 0.0);
  CHECK(pairwise_sum(x) == Catch::Approx(naive).margin(1e-12));
}

TEST_CASE("mean/variance/sd on known values") {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  CHECK(mean(x) == Catch::Approx(2.5));
  CHECK(variance(x) == Catch::Approx(5.0 / 3.0));
  CHECK(sd(x) == Catch::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(mean(std::vector<double>{}) == 0.0);
  CHECK(variance(std::vector<double>{2.0}) == 0.0);
}

TEST_CASE("sigmoid and logit are inverses and stable in the tails") {
  for (double p : {0.01, 0.3, 0.5, 0.77, 0.99}) {
    CHECK(sigmoid(logit(p)) == Catch::Approx(p).epsilon(1e-12));
  }
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(800.0) <= 1.0);
  CHECK(sigmoid(0.0) == Catch::Approx(0.5));
}

TEST_CASE("clip") {
  CHECK(clip(5.0, 0.0, 1.0) == 1.0);
  CHECK(clip(-5.0, 0.0, 1.0) == 0.0);
  CHECK(clip(0.25, 0.0, 1.0) == 0.25);
}
