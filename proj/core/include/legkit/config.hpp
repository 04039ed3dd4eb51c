#pragma once

// Full run configuration and its key = value text format.
//
//   # comment
//   sim.contact_stiffness = 2000
//   d2.friction_min = 0.9
//
// Keys are dotted names; unknown keys and malformed lines are rejected with
// the offending line number. Keys not mentioned keep their defaults.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "legkit/ars.hpp"
#include "legkit/randomization.hpp"
#include "legkit/rollout.hpp"

namespace legkit::harness {

struct TrainSettings {
  int epochs = 200;
  ars::TrainingMode mode = ars::TrainingMode::kRandomized;
};

/// Survivability campaign defaults. Desk scale: 100 trials of 10,000 steps.
/// Distance bucket edges split [0, inf) into <= near, (near, far), >= far.
struct EvalSettings {
  int trials = 100;
  int max_steps = 10000;
  double near_edge = 5.0;   // m
  double far_edge = 18.0;   // m, 90 m scaled by 10,000 / 50,000 steps
  int threads = 0;
};

struct Config {
  rollout::EpisodeConfig episode;
  ars::ARSConfig ars;
  d2::D2Distribution dist;
  d2::NominalEnvironment nominal;
  TrainSettings train;
  EvalSettings eval;
  std::uint64_t seed = 1;

  void validate() const;
};

struct KeyInfo {
  std::string name;
  std::string doc;
};

/// Every accepted key, in print order.
const std::vector<KeyInfo>& config_keys();

/// Applies `key = value` lines from `is` on top of `cfg`. `source` names the
/// input in error messages.
void apply_config(Config& cfg, std::istream& is, const std::string& source = "<config>");

/// Sets one key from its text value.
void set_config_value(Config& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const Config& cfg, const std::string& key);

/// Defaults overlaid with the file at `path`. Throws IoError if the file
/// cannot be opened, ConfigError on parse or validation failure.
Config load_config(const std::string& path);

/// Writes every key with its current value; the output parses back to an
/// identical configuration.
void write_config(std::ostream& os, const Config& cfg, bool with_docs = true);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace legkit::harness
