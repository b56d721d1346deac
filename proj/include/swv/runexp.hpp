#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swv/common.hpp"

// Base-out run expectancy (RE24) and linear weights from play-by-play
// event logs.

namespace swv::runexp {

struct BaseOutState {
  bool first = false;
  bool second = false;
  bool third = false;
  int outs = 0;  // 0..2 nonterminal; 3 = end of inning

  bool terminal() const { return outs >= 3; }

  // 0..23 for nonterminal states.
  int index() const {
    return outs * 8 + (first ? 1 : 0) + (second ? 2 : 0) + (third ? 4 : 0);
  }

  static BaseOutState from_index(int idx) {
    BaseOutState s;
    s.outs = idx / 8;
    s.first = idx & 1;
    s.second = idx & 2;
    s.third = idx & 4;
    return s;
  }

  bool operator==(const BaseOutState&) const = default;
};

inline constexpr int kNumStates = 24;

enum class PaOutcome {
  Strikeout,
  Walk,
  HitByPitch,
  Single,
  Double,
  Triple,
  HomeRun,
  OutInPlay,
  Other,  // non-PA events (steals, wild pitches, ...): kept for RE, not for LW
};

inline const char* to_string(PaOutcome o) {
  switch (o) {
    case PaOutcome::Strikeout: return "strikeout";
    case PaOutcome::Walk: return "walk";
    case PaOutcome::HitByPitch: return "hit_by_pitch";
    case PaOutcome::Single: return "single";
    case PaOutcome::Double: return "double";
    case PaOutcome::Triple: return "triple";
    case PaOutcome::HomeRun: return "home_run";
    case PaOutcome::OutInPlay: return "out_in_play";
    case PaOutcome::Other: return "other";
  }
  return "?";
}

inline std::optional<PaOutcome> parse_pa_outcome(const std::string& s) {
  if (s == "strikeout") return PaOutcome::Strikeout;
  if (s == "walk") return PaOutcome::Walk;
  if (s == "hit_by_pitch") return PaOutcome::HitByPitch;
  if (s == "single") return PaOutcome::Single;
  if (s == "double") return PaOutcome::Double;
  if (s == "triple") return PaOutcome::Triple;
  if (s == "home_run") return PaOutcome::HomeRun;
  if (s == "out_in_play") return PaOutcome::OutInPlay;
  if (s == "other") return PaOutcome::Other;
  return std::nullopt;
}

struct PlayEvent {
  std::string inning_id;
  BaseOutState pre;
  BaseOutState post;
  int runs_scored = 0;
  PaOutcome outcome = PaOutcome::Other;
};

struct Re24 {
  std::array<double, kNumStates> expected_runs{};
  std::array<bool, kNumStates> observed{};
  std::size_t innings_used = 0;
  std::size_t partial_innings_dropped = 0;

  double at(const BaseOutState& s) const {
    if (s.terminal()) return 0.0;
    if (!observed[static_cast<std::size_t>(s.index())]) {
      throw ArgumentError(std::string("RE24: state never observed, index ") +
                          std::to_string(s.index()));
    }
    return expected_runs[static_cast<std::size_t>(s.index())];
  }
};

// Events must arrive grouped by inning (consecutive rows share inning_id).
// Innings that do not reach three outs are dropped and counted.
inline Re24 compute_re24(const std::vector<PlayEvent>& events) {
  Re24 out;
  std::array<std::vector<double>, kNumStates> samples;

  std::size_t i = 0;
  while (i < events.size()) {
    std::size_t j = i;
    while (j < events.size() && events[j].inning_id == events[i].inning_id) ++j;
    const bool complete = events[j - 1].post.terminal();
    if (!complete) {
      ++out.partial_innings_dropped;
      i = j;
      continue;
    }
    ++out.innings_used;
    // runs from each event (inclusive) to the end of the inning
    double tail = 0.0;
    std::vector<double> to_end(j - i);
    for (std::size_t k = j; k-- > i;) {
      tail += events[k].runs_scored;
      to_end[k - i] = tail;
    }
    for (std::size_t k = i; k < j; ++k) {
      samples[static_cast<std::size_t>(events[k].pre.index())].push_back(to_end[k - i]);
    }
    i = j;
  }

  for (int s = 0; s < kNumStates; ++s) {
    if (!samples[static_cast<std::size_t>(s)].empty()) {
      out.observed[static_cast<std::size_t>(s)] = true;
      out.expected_runs[static_cast<std::size_t>(s)] =
          mean(samples[static_cast<std::size_t>(s)]);
    }
  }
  return out;
}

// RE(post) - RE(pre) + runs scored on the play.
inline double delta_re(const PlayEvent& e, const Re24& re) {
  return re.at(e.post) - re.at(e.pre) + e.runs_scored;
}

using LinearWeights = std::map<PaOutcome, double>;

// Average change in run expectancy per outcome; Other (non-PA) events are
// excluded from the averaging.
inline LinearWeights linear_weights(const std::vector<PlayEvent>& events, const Re24& re) {
  std::map<PaOutcome, std::vector<double>> deltas;
  for (const auto& e : events) {
    if (e.outcome == PaOutcome::Other) continue;
    deltas[e.outcome].push_back(delta_re(e, re));
  }
  LinearWeights out;
  for (const auto& [o, v] : deltas) out[o] = mean(v);
  return out;
}

// The paper's 2022-2024 constants, used when no event data is supplied.
inline LinearWeights default_linear_weights() {
  return {{PaOutcome::Strikeout, -0.27}, {PaOutcome::Walk, 0.33}, {PaOutcome::HitByPitch, 0.36}};
}

}  // namespace swv::runexp
