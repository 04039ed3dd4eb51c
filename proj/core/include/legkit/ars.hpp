#pragma once

// Augmented random search over linear policies and the training loop that
// pairs it with per-epoch dynamics + domain draws.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "legkit/policy.hpp"
#include "legkit/randomization.hpp"
#include "legkit/rollout.hpp"

namespace legkit::ars {

struct ARSConfig {
  int directions = 8;          // antithetic pairs, 2 * directions rollouts per epoch
  double step_size = 0.03;     // alpha
  double noise = 0.05;         // nu
  int episode_steps = 5000;    // T
  double discount = 1.0;       // gamma
  int threads = 0;             // 0: hardware concurrency

  void validate() const;
};

/// theta' = theta + alpha / (N sigma_R) sum_i (r+_i - r-_i) delta_i, with
/// sigma_R the population std of all 2N returns (floored at 1e-6).
Eigen::MatrixXd ars_update(const Eigen::MatrixXd& theta, std::span<const Eigen::MatrixXd> deltas,
                           std::span<const double> returns_plus,
                           std::span<const double> returns_minus, const ARSConfig& cfg);

/// Standard-normal direction matrices, deterministic in `seed`.
std::vector<Eigen::MatrixXd> sample_directions(Eigen::Index rows, Eigen::Index cols, int count,
                                               std::uint64_t seed);

/// Generic ARS on a black-box objective (higher is better).
using Objective = std::function<double(const Eigen::MatrixXd&)>;
Eigen::MatrixXd optimize(const Objective& objective, Eigen::MatrixXd theta, int iterations,
                         const ARSConfig& cfg, std::uint64_t seed);

enum class TrainingMode { kRandomized, kFixed };

struct EpochLog {
  int epoch = 0;                 // 1-based
  d2::D2Sample sample;           // training draw for this epoch
  double eval_return = 0.0;      // unperturbed theta after the update
  double eval_distance = 0.0;
  bool eval_fell = false;
  double wall_seconds = 0.0;
};

struct TrainOptions {
  ARSConfig ars;
  d2::D2Distribution dist;
  d2::NominalEnvironment nominal;
  rollout::EpisodeConfig episode;
  TrainingMode mode = TrainingMode::kRandomized;
  int epochs = 0;
  std::uint64_t master_seed = 0;
  policy::PolicyMatrix initial = policy::PolicyMatrix::Zero();
  std::function<void(const EpochLog&)> on_epoch;  // progress callback
};

struct TrainResult {
  policy::PolicyMatrix theta;
  double initial_eval_return = 0.0;  // epoch-0 evaluation of the initial theta
  std::vector<EpochLog> log;         // exactly `epochs` entries
};

TrainResult train_d2gmbc(const TrainOptions& options);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to index-addressed storage by the caller.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace legkit::ars
