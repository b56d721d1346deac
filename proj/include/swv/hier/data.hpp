#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "swv/common.hpp"
#include "swv/records.hpp"

namespace swv::hier {

// Indexed intention-model dataset. Batter/pitcher indices are assigned in
// sorted id order so the layout is deterministic for a given input set.
struct IntentionData {
  std::vector<double> y;
  std::vector<double> balls;
  std::vector<double> strikes;
  std::vector<double> loc_x;
  std::vector<double> loc_z;
  std::vector<int> batter;
  std::vector<int> pitcher;
  std::vector<std::string> batter_ids;
  std::vector<std::string> pitcher_ids;

  std::size_t n_obs() const { return y.size(); }
  int n_batters() const { return static_cast<int>(batter_ids.size()); }
  int n_pitchers() const { return static_cast<int>(pitcher_ids.size()); }

  int batter_index(const std::string& id) const {
    auto it = std::lower_bound(batter_ids.begin(), batter_ids.end(), id);
    if (it == batter_ids.end() || *it != id) return -1;
    return static_cast<int>(it - batter_ids.begin());
  }
  int pitcher_index(const std::string& id) const {
    auto it = std::lower_bound(pitcher_ids.begin(), pitcher_ids.end(), id);
    if (it == pitcher_ids.end() || *it != id) return -1;
    return static_cast<int>(it - pitcher_ids.begin());
  }

  static IntentionData from_observations(const std::vector<IntentionObservation>& obs) {
    IntentionData d;
    for (const auto& o : obs) {
      d.batter_ids.push_back(o.batter_id);
      d.pitcher_ids.push_back(o.pitcher_id);
    }
    auto uniq = [](std::vector<std::string>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(d.batter_ids);
    uniq(d.pitcher_ids);
    for (const auto& o : obs) {
      d.y.push_back(o.response);
      d.balls.push_back(o.balls);
      d.strikes.push_back(o.strikes);
      d.loc_x.push_back(o.loc_x);
      d.loc_z.push_back(o.loc_z);
      d.batter.push_back(d.batter_index(o.batter_id));
      d.pitcher.push_back(d.pitcher_index(o.pitcher_id));
    }
    return d;
  }
};

// Seeded swing-level train/test split (held-out fraction for ELPD).
inline void split_train_test(const std::vector<IntentionObservation>& obs, double test_fraction,
                             std::uint64_t seed, std::vector<IntentionObservation>& train,
                             std::vector<IntentionObservation>& test) {
  std::vector<std::size_t> order(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const std::size_t n_test = static_cast<std::size_t>(test_fraction * obs.size());
  train.clear();
  test.clear();
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_test ? test : train).push_back(obs[order[i]]);
  }
}

}  // namespace swv::hier
