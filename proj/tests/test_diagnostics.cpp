#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "swv/hier/diagnostics.hpp"

using namespace swv;

namespace {

std::vector<double> iid_normal(int n, std::uint64_t seed, double shift = 0.0) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = shift + rng.normal();
  return out;
}

}  // namespace

TEST_CASE("well-mixed iid chains have rhat near one and high ess") {
  const std::vector<std::vector<double>> chains = {
      iid_normal(1000, 1), iid_normal(1000, 2), iid_normal(1000, 3), iid_normal(1000, 4)};
  const auto d = diag::diagnose_parameter(chains);
  CHECK(d.defined);
  CHECK(d.split_rhat < 1.01);
  CHECK(d.bulk_ess > 2000.0);  // 4000 iid draws
}

TEST_CASE("mean-shifted chains are flagged by rhat") {
  const std::vector<std::vector<double>> chains = {iid_normal(500, 1, 0.0),
                                                   iid_normal(500, 2, 3.0)};
  const auto d = diag::diagnose_parameter(chains);
  CHECK(d.split_rhat > 1.5);
}

TEST_CASE("within-chain drift is flagged by the split") {
  // each chain: first half at -2, second half at +2, so whole-chain means agree
  std::vector<std::vector<double>> chains(2);
  for (int c = 0; c < 2; ++c) {
    const auto a = iid_normal(250, 10 + c, -2.0);
    const auto b = iid_normal(250, 20 + c, 2.0);
    chains[c] = a;
    chains[c].insert(chains[c].end(), b.begin(), b.end());
  }
  const auto d = diag::diagnose_parameter(chains);
  CHECK(d.split_rhat > 1.5);
}

TEST_CASE("constant columns are reported as undefined") {
  const std::vector<std::vector<double>> chains = {std::vector<double>(100, 2.5),
                                                   std::vector<double>(100, 2.5)};
  const auto d = diag::diagnose_parameter(chains);
  CHECK_FALSE(d.defined);
}

TEST_CASE("diagnostics input validation") {
  CHECK_THROWS_AS(diag::diagnose_parameter({iid_normal(100, 1)}), ArgumentError);
  CHECK_THROWS_AS(diag::diagnose_parameter({iid_normal(100, 1), iid_normal(50, 2)}),
                  ArgumentError);
}

TEST_CASE("autocorrelated chains report reduced ess") {
  // AR(1) with strong persistence
  std::vector<std::vector<double>> chains(2);
  for (int c = 0; c < 2; ++c) {
    Rng rng(100 + c);
    double x = 0.0;
    chains[c].resize(2000);
    for (auto& v : chains[c]) {
      x = 0.95 * x + std::sqrt(1.0 - 0.95 * 0.95) * rng.normal();
      v = x;
    }
  }
  const auto d = diag::diagnose_parameter(chains);
  CHECK(d.bulk_ess < 600.0);  // far below the 4000 nominal draws
}
