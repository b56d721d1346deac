#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "swv/causal.hpp"
#include "swv/csv.hpp"
#include "swv/hier/fit.hpp"
#include "swv/ingest.hpp"
#include "swv/pa_chain.hpp"
#include "swv/records.hpp"
#include "swv/runexp.hpp"

// Artifact serialization and the content-hash manifest.

namespace swv::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Hashing

inline std::string sha256_hex(const void* data, std::size_t len) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data, len) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &digest_len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw ArgumentError("sha256: digest failure");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * digest_len);
  for (unsigned int i = 0; i < digest_len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

inline std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("sha256_file: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

// ---------------------------------------------------------------------------
// JSON files

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write file: " + path);
  out << j.dump(2) << '\n';
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open file: " + path);
  return json::parse(in);
}

// ---------------------------------------------------------------------------
// Posterior draws

inline json draws_to_json(const hier::PosteriorDraws& d) {
  json j;
  j["format_version"] = 1;
  j["chains"] = d.chains;
  j["draws_per_chain"] = d.draws_per_chain;
  j["names"] = d.names;
  j["values"] = d.values;
  j["divergences"] = d.divergences;
  j["step_sizes"] = d.step_sizes;
  j["flagged"] = d.flagged;
  j["warning"] = d.warning;
  return j;
}

inline hier::PosteriorDraws draws_from_json(const json& j) {
  hier::PosteriorDraws d;
  d.chains = j.at("chains").get<int>();
  d.draws_per_chain = j.at("draws_per_chain").get<int>();
  d.names = j.at("names").get<std::vector<std::string>>();
  d.values = j.at("values").get<std::vector<std::vector<std::vector<double>>>>();
  d.divergences = j.at("divergences").get<std::vector<int>>();
  d.step_sizes = j.at("step_sizes").get<std::vector<double>>();
  d.flagged = j.at("flagged").get<bool>();
  d.warning = j.at("warning").get<std::string>();
  return d;
}

// ---------------------------------------------------------------------------
// Linear weights / RE24

inline json linear_weights_to_json(const runexp::LinearWeights& lw) {
  json j = json::object();
  for (const auto& [o, v] : lw) j[runexp::to_string(o)] = v;
  return j;
}

inline runexp::LinearWeights linear_weights_from_json(const json& j) {
  runexp::LinearWeights lw;
  for (const auto& [k, v] : j.items()) {
    const auto o = runexp::parse_pa_outcome(k);
    if (!o) throw ArgumentError("linear weights: unknown outcome " + k);
    lw[*o] = v.get<double>();
  }
  return lw;
}

inline json re24_to_json(const runexp::Re24& re) {
  json j;
  j["expected_runs"] = re.expected_runs;
  j["observed"] = re.observed;
  j["innings_used"] = re.innings_used;
  j["partial_innings_dropped"] = re.partial_innings_dropped;
  return j;
}

// ---------------------------------------------------------------------------
// Causal fits

inline json causal_fit_to_json(const causal::CausalFit& f) {
  json j;
  j["intercept"] = f.intercept;
  j["beta_bs"] = f.beta_bs;
  j["beta_sl"] = f.beta_sl;
  j["se_intercept"] = f.se_intercept;
  j["se_bs"] = f.se_bs;
  j["se_sl"] = f.se_sl;
  j["sigma2"] = f.sigma2;
  j["n"] = f.n;
  j["iterations"] = f.iterations;
  j["converged"] = f.converged;
  j["separation_flag"] = f.separation_flag;
  j["infinite_se_bs"] = f.infinite_se_bs;
  j["infinite_se_sl"] = f.infinite_se_sl;
  return j;
}

inline causal::CausalFit causal_fit_from_json(const json& j, causal::ModelTag tag) {
  causal::CausalFit f;
  f.tag = tag;
  f.intercept = j.at("intercept").get<double>();
  f.beta_bs = j.at("beta_bs").get<double>();
  f.beta_sl = j.at("beta_sl").get<double>();
  f.se_intercept = j.at("se_intercept").get<double>();
  f.se_bs = j.value("se_bs", 0.0);
  f.se_sl = j.value("se_sl", 0.0);
  f.sigma2 = j.value("sigma2", 0.0);
  f.n = j.at("n").get<std::size_t>();
  f.iterations = j.value("iterations", 0);
  f.converged = j.value("converged", true);
  f.separation_flag = j.value("separation_flag", false);
  f.infinite_se_bs = j.value("infinite_se_bs", false);
  f.infinite_se_sl = j.value("infinite_se_sl", false);
  return f;
}

inline json causal_suite_to_json(const causal::CausalSuite& s) {
  json j;
  j["contact"] = causal_fit_to_json(s.contact);
  j["fair"] = causal_fit_to_json(s.fair);
  j["xlw"] = causal_fit_to_json(s.xlw);
  return j;
}

inline causal::CausalSuite causal_suite_from_json(const json& j) {
  causal::CausalSuite s;
  s.contact = causal_fit_from_json(j.at("contact"), causal::ModelTag::Contact);
  s.fair = causal_fit_from_json(j.at("fair"), causal::ModelTag::Fair);
  s.xlw = causal_fit_from_json(j.at("xlw"), causal::ModelTag::Xlw);
  return s;
}

// ---------------------------------------------------------------------------
// Markov chain artifacts

inline json transition_to_json(const pa::TransitionModel& m) {
  json j;
  j["q"] = m.q;
  j["fair_reward"] = m.fair_reward;
  j["lw_strikeout"] = m.lw_strikeout;
  j["lw_walk"] = m.lw_walk;
  j["lw_hbp"] = m.lw_hbp;
  return j;
}

inline pa::TransitionModel transition_from_json(const json& j) {
  pa::TransitionModel m;
  m.q = j.at("q").get<std::array<std::array<double, pa::kNumSuccessors>, pa::kNumCounts>>();
  m.fair_reward = j.at("fair_reward").get<std::array<double, pa::kNumCounts>>();
  m.lw_strikeout = j.at("lw_strikeout").get<double>();
  m.lw_walk = j.at("lw_walk").get<double>();
  m.lw_hbp = j.at("lw_hbp").get<double>();
  return m;
}

inline json value_to_json(const pa::ValueFunction& v) {
  json j;
  j["value"] = v.value;
  j["iterations"] = v.iterations;
  return j;
}

// ---------------------------------------------------------------------------
// Delimited artifacts

inline void write_grid_csv(const std::string& path, const std::vector<pa::GridPoint>& grid) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& g : grid) {
    rows.push_back({csv::format_double(g.gamma_bs), csv::format_double(g.gamma_sl),
                    csv::format_double(g.runs_per_500)});
  }
  csv::write_file(path, {"gamma_bs", "gamma_sl", "runs_per_500pa"}, rows);
}

inline void write_approaches_csv(const std::string& path,
                                 const std::vector<hier::BatterApproach>& aps) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& a : aps) {
    rows.push_back({a.batter_id, csv::format_double(a.gamma_bs), csv::format_double(a.gamma_sl)});
  }
  csv::write_file(path, {"batter_id", "gamma_bs_mph", "gamma_sl_ft"}, rows);
}

inline std::vector<hier::BatterApproach> read_approaches_csv(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  const int ci = t.column("batter_id"), cb = t.column("gamma_bs_mph"), cs = t.column("gamma_sl_ft");
  if (ci < 0 || cb < 0 || cs < 0) throw ArgumentError("approaches csv: missing columns in " + path);
  std::vector<hier::BatterApproach> out;
  for (const auto& row : t.rows) {
    out.push_back({row[static_cast<std::size_t>(ci)], std::stod(row[static_cast<std::size_t>(cb)]),
                   std::stod(row[static_cast<std::size_t>(cs)])});
  }
  return out;
}

inline void write_pitch_csv(const std::string& path, const std::vector<PitchRecord>& records) {
  const auto fmt_opt = [](const std::optional<double>& v) {
    return v ? csv::format_double(*v) : std::string();
  };
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : records) {
    rows.push_back({r.game_id,
                    r.batter_id,
                    r.pitcher_id,
                    r.batter_side == Side::Left ? "L" : "R",
                    r.pitcher_side == Side::Left ? "L" : "R",
                    std::to_string(r.balls),
                    std::to_string(r.strikes),
                    r.pitch_type,
                    csv::format_double(r.plate_x),
                    csv::format_double(r.plate_z),
                    csv::format_double(r.vel_at_plate[0]),
                    csv::format_double(r.vel_at_plate[1]),
                    csv::format_double(r.vel_at_plate[2]),
                    csv::format_double(r.acc_at_plate[0]),
                    csv::format_double(r.acc_at_plate[1]),
                    csv::format_double(r.acc_at_plate[2]),
                    csv::format_double(r.extension),
                    csv::format_double(r.sz_top),
                    csv::format_double(r.sz_bot),
                    to_string(r.outcome),
                    fmt_opt(r.bat_speed),
                    fmt_opt(r.swing_length),
                    fmt_opt(r.exit_speed),
                    fmt_opt(r.launch_angle),
                    fmt_opt(r.hit_x),
                    fmt_opt(r.hit_y)});
  }
  csv::write_file(path, ingest::canonical_columns(), rows);
}

inline void write_playbyplay_csv(const std::string& path,
                                 const std::vector<runexp::PlayEvent>& events) {
  const auto state = [](const runexp::BaseOutState& s) {
    return std::vector<std::string>{s.first ? "1" : "0", s.second ? "1" : "0",
                                    s.third ? "1" : "0", std::to_string(s.outs)};
  };
  std::vector<std::vector<std::string>> rows;
  for (const auto& e : events) {
    std::vector<std::string> row = {e.inning_id};
    for (auto& f : state(e.pre)) row.push_back(std::move(f));
    for (auto& f : state(e.post)) row.push_back(std::move(f));
    row.push_back(std::to_string(e.runs_scored));
    row.push_back(runexp::to_string(e.outcome));
    rows.push_back(std::move(row));
  }
  csv::write_file(path,
                  {"inning_id", "pre_first", "pre_second", "pre_third", "pre_outs", "post_first",
                   "post_second", "post_third", "post_outs", "runs_scored", "outcome"},
                  rows);
}

inline std::vector<runexp::PlayEvent> read_playbyplay_csv(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  const std::vector<std::string> need = {"inning_id",  "pre_first",   "pre_second", "pre_third",
                                         "pre_outs",   "post_first",  "post_second", "post_third",
                                         "post_outs",  "runs_scored", "outcome"};
  std::map<std::string, int> col;
  for (const auto& n : need) {
    col[n] = t.column(n);
    if (col[n] < 0) throw ArgumentError("play-by-play csv: missing column " + n + " in " + path);
  }
  const auto get = [&](const std::vector<std::string>& row, const std::string& n) {
    return row[static_cast<std::size_t>(col.at(n))];
  };
  std::vector<runexp::PlayEvent> out;
  for (const auto& row : t.rows) {
    runexp::PlayEvent e;
    e.inning_id = get(row, "inning_id");
    e.pre = {get(row, "pre_first") == "1", get(row, "pre_second") == "1",
             get(row, "pre_third") == "1", std::stoi(get(row, "pre_outs"))};
    e.post = {get(row, "post_first") == "1", get(row, "post_second") == "1",
              get(row, "post_third") == "1", std::stoi(get(row, "post_outs"))};
    e.runs_scored = std::stoi(get(row, "runs_scored"));
    const auto o = runexp::parse_pa_outcome(get(row, "outcome"));
    if (!o) throw ArgumentError("play-by-play csv: unknown outcome " + get(row, "outcome"));
    e.outcome = *o;
    out.push_back(std::move(e));
  }
  return out;
}

inline void write_intention_csv(const std::string& path,
                                const std::vector<IntentionObservation>& obs) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& o : obs) {
    rows.push_back({o.batter_id, o.pitcher_id, csv::format_double(o.response),
                    std::to_string(o.balls), std::to_string(o.strikes),
                    csv::format_double(o.loc_x), csv::format_double(o.loc_z)});
  }
  csv::write_file(path, {"batter_id", "pitcher_id", "response", "balls", "strikes", "loc_x", "loc_z"},
                  rows);
}

inline std::vector<IntentionObservation> read_intention_csv(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  const std::vector<std::string> need = {"batter_id", "pitcher_id", "response",
                                         "balls",     "strikes",    "loc_x",
                                         "loc_z"};
  std::map<std::string, int> col;
  for (const auto& n : need) {
    col[n] = t.column(n);
    if (col[n] < 0) throw ArgumentError("intention csv: missing column " + n + " in " + path);
  }
  const auto get = [&](const std::vector<std::string>& row, const std::string& n) {
    return row[static_cast<std::size_t>(col.at(n))];
  };
  std::vector<IntentionObservation> out;
  for (const auto& row : t.rows) {
    IntentionObservation o;
    o.batter_id = get(row, "batter_id");
    o.pitcher_id = get(row, "pitcher_id");
    o.response = std::stod(get(row, "response"));
    o.balls = std::stoi(get(row, "balls"));
    o.strikes = std::stoi(get(row, "strikes"));
    o.loc_x = std::stod(get(row, "loc_x"));
    o.loc_z = std::stod(get(row, "loc_z"));
    out.push_back(std::move(o));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifest

struct ManifestEntry {
  std::string path;
  std::string sha256;
  std::string config_hash;
  std::uint64_t seed = 0;
};

// Stage name -> artifact entries. A stage is up to date when every entry's
// file still hashes to the recorded value and the config hash matches.
struct Manifest {
  std::map<std::string, std::vector<ManifestEntry>> stages;

  bool stage_current(const std::string& stage, const std::string& config_hash) const {
    auto it = stages.find(stage);
    if (it == stages.end() || it->second.empty()) return false;
    for (const auto& e : it->second) {
      if (e.config_hash != config_hash) return false;
      std::ifstream probe(e.path, std::ios::binary);
      if (!probe) return false;
      if (sha256_file(e.path) != e.sha256) return false;
    }
    return true;
  }

  const ManifestEntry& artifact(const std::string& stage, const std::string& filename) const {
    auto it = stages.find(stage);
    if (it == stages.end()) {
      throw ArgumentError("missing upstream artifact: requires stage " + stage);
    }
    for (const auto& e : it->second) {
      if (e.path.size() >= filename.size() &&
          e.path.compare(e.path.size() - filename.size(), filename.size(), filename) == 0) {
        return e;
      }
    }
    throw ArgumentError("stage " + stage + " has no artifact " + filename);
  }

  static Manifest load(const std::string& path) {
    Manifest m;
    std::ifstream probe(path);
    if (!probe) return m;
    const json j = json::parse(probe);
    for (const auto& [stage, entries] : j.at("stages").items()) {
      for (const auto& e : entries) {
        m.stages[stage].push_back({e.at("path").get<std::string>(),
                                   e.at("sha256").get<std::string>(),
                                   e.at("config_hash").get<std::string>(),
                                   e.at("seed").get<std::uint64_t>()});
      }
    }
    return m;
  }

  void save(const std::string& path) const {
    json j;
    j["format_version"] = 1;
    j["stages"] = json::object();
    for (const auto& [stage, entries] : stages) {
      json arr = json::array();
      for (const auto& e : entries) {
        arr.push_back({{"path", e.path},
                       {"sha256", e.sha256},
                       {"config_hash", e.config_hash},
                       {"seed", e.seed}});
      }
      j["stages"][stage] = arr;
    }
    write_json_file(path, j);
  }
};

}  // namespace swv::io
