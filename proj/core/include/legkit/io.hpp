#pragma once

// Plain-text artifacts: policy checkpoints and per-step trajectory logs.
//
// Checkpoint:
//   # seed 42
//   12 14 1
//   <12 lines of 14 entries>
//
// Values are written with the shortest text that parses back exactly.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "legkit/ars.hpp"
#include "legkit/policy.hpp"
#include "legkit/rollout.hpp"

namespace legkit::harness {

inline constexpr int kCheckpointVersion = 1;

void write_checkpoint(std::ostream& os, const policy::PolicyMatrix& theta,
                      std::optional<std::uint64_t> seed = std::nullopt);
policy::PolicyMatrix read_checkpoint(std::istream& is);
void save_checkpoint(const std::string& path, const policy::PolicyMatrix& theta,
                     std::optional<std::uint64_t> seed = std::nullopt);
policy::PolicyMatrix load_checkpoint(const std::string& path);

/// CSV with a header row. Columns: step, time, phase per leg, target xyz per
/// leg, residual xyz per leg, psi, delta, omega_bar, roll, pitch, yaw, reward.
void write_trajectory_csv(std::ostream& os, const std::vector<rollout::TrajectoryRow>& rows,
                          std::optional<std::uint64_t> seed = std::nullopt);
std::vector<rollout::TrajectoryRow> read_trajectory_csv(std::istream& is);
void save_trajectory_csv(const std::string& path, const std::vector<rollout::TrajectoryRow>& rows,
                         std::optional<std::uint64_t> seed = std::nullopt);
std::vector<rollout::TrajectoryRow> load_trajectory_csv(const std::string& path);

/// Training log CSV: epoch, the epoch's D2 draw, evaluated return, distance,
/// fall flag and wall time.
void write_training_log(std::ostream& os, const std::vector<ars::EpochLog>& log,
                        std::optional<std::uint64_t> seed = std::nullopt);

/// Recomputes each row's final foot targets from its logged phases, gait
/// parameters, yaw step and residuals.
std::vector<gait::FootTargets> replay_targets(const std::vector<rollout::TrajectoryRow>& rows,
                                              const rollout::EpisodeConfig& cfg);

/// Largest per-coordinate difference between logged and replayed targets.
double replay_error(const std::vector<rollout::TrajectoryRow>& rows,
                    const rollout::EpisodeConfig& cfg);

}  // namespace legkit::harness
