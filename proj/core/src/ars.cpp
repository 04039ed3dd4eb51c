#include "legkit/ars.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "legkit/seed.hpp"

namespace legkit::ars {

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kTagSample = 0;
constexpr std::uint64_t kTagDirections = 1;
constexpr std::uint64_t kTagRolloutStart = 2;
constexpr std::uint64_t kTagEvalSample = 3;
constexpr std::uint64_t kTagEvalStart = 4;

double population_std(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size() + b.size());
  double mean = 0.0;
  for (double v : a) mean += v;
  for (double v : b) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : a) var += (v - mean) * (v - mean);
  for (double v : b) var += (v - mean) * (v - mean);
  return std::sqrt(var / n);
}

}  // namespace

void ARSConfig::validate() const {
  if (directions < 1) throw ConfigError("ARS needs at least one direction");
  if (!(step_size > 0.0) || !(noise > 0.0)) throw ConfigError("ARS step size and noise must be positive");
  if (episode_steps < 1) throw ConfigError("episode length must be positive");
  if (!(discount > 0.0 && discount <= 1.0)) throw ConfigError("discount must be in (0, 1]");
  if (threads < 0) throw ConfigError("thread count must be non-negative");
}

Eigen::MatrixXd ars_update(const Eigen::MatrixXd& theta, std::span<const Eigen::MatrixXd> deltas,
                           std::span<const double> returns_plus,
                           std::span<const double> returns_minus, const ARSConfig& cfg) {
  const std::size_t n = deltas.size();
  if (n == 0 || returns_plus.size() != n || returns_minus.size() != n) {
    throw DomainError("ars_update: mismatched direction/return pair counts");
  }
  const double sigma = std::max(population_std(returns_plus, returns_minus), 1e-6);
  Eigen::MatrixXd step = Eigen::MatrixXd::Zero(theta.rows(), theta.cols());
  for (std::size_t i = 0; i < n; ++i) {
    if (deltas[i].rows() != theta.rows() || deltas[i].cols() != theta.cols()) {
      throw DomainError("ars_update: direction shape does not match theta");
    }
    step += (returns_plus[i] - returns_minus[i]) * deltas[i];
  }
  return theta + (cfg.step_size / (static_cast<double>(n) * sigma)) * step;
}

std::vector<Eigen::MatrixXd> sample_directions(Eigen::Index rows, Eigen::Index cols, int count,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(count));
  for (auto& d : out) {
    d.resize(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) d(r, c) = normal(rng);
    }
  }
  return out;
}

Eigen::MatrixXd optimize(const Objective& objective, Eigen::MatrixXd theta, int iterations,
                         const ARSConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  for (int it = 0; it < iterations; ++it) {
    const auto deltas = sample_directions(theta.rows(), theta.cols(), cfg.directions,
                                          derive_seed(seed, {static_cast<std::uint64_t>(it)}));
    std::vector<double> plus(deltas.size()), minus(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      plus[i] = objective(theta + cfg.noise * deltas[i]);
      minus[i] = objective(theta - cfg.noise * deltas[i]);
    }
    theta = ars_update(theta, deltas, plus, minus, cfg);
  }
  return theta;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (int i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

TrainResult train_d2gmbc(const TrainOptions& opt) {
  opt.ars.validate();
  opt.dist.validate();
  opt.episode.validate();
  if (opt.epochs < 0) throw ConfigError("epochs must be non-negative");

  const int steps = opt.ars.episode_steps;
  const sim::TerrainLayout layout = opt.episode.layout_for(steps);
  const std::uint64_t eval_start = derive_seed(opt.master_seed, {kTagEvalStart});
  const d2::D2Sample fixed = d2::nominal_sample(opt.dist, opt.nominal);
  const bool randomized = opt.mode == TrainingMode::kRandomized;

  auto evaluate = [&](const policy::PolicyMatrix& theta, const d2::D2Sample& sample) {
    const d2::AppliedD2 env = d2::apply_d2(sample, opt.episode.robot, layout);
    return rollout::episode_rollout(rollout::Controller::linear(theta), env, opt.episode, steps,
                                    eval_start, opt.ars.discount);
  };

  TrainResult result;
  result.theta = opt.initial;
  {
    const d2::D2Sample s =
        randomized ? d2::sample_d2(opt.dist, derive_seed(opt.master_seed, {kTagEvalSample, 0}))
                   : fixed;
    result.initial_eval_return = evaluate(result.theta, s).normalized_return;
  }

  const int n = opt.ars.directions;
  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto e = static_cast<std::uint64_t>(epoch);
    const d2::D2Sample sample =
        randomized ? d2::sample_d2(opt.dist, derive_seed(opt.master_seed, {kTagSample, e})) : fixed;
    const d2::AppliedD2 env = d2::apply_d2(sample, opt.episode.robot, layout);
    const auto deltas = sample_directions(policy::PolicyMatrix::RowsAtCompileTime,
                                          policy::PolicyMatrix::ColsAtCompileTime, n,
                                          derive_seed(opt.master_seed, {kTagDirections, e}));
    const std::uint64_t start_seed = derive_seed(opt.master_seed, {kTagRolloutStart, e});

    std::vector<double> returns(static_cast<std::size_t>(2 * n));
    parallel_for(2 * n, opt.ars.threads, [&](int k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      const policy::PolicyMatrix theta =
          result.theta + sign * opt.ars.noise * deltas[static_cast<std::size_t>(k / 2)];
      returns[static_cast<std::size_t>(k)] =
          rollout::episode_rollout(rollout::Controller::linear(theta), env, opt.episode, steps,
                                   start_seed, opt.ars.discount)
              .normalized_return;
    });
    std::vector<double> plus(static_cast<std::size_t>(n)), minus(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      plus[static_cast<std::size_t>(i)] = returns[static_cast<std::size_t>(2 * i)];
      minus[static_cast<std::size_t>(i)] = returns[static_cast<std::size_t>(2 * i + 1)];
    }
    result.theta = ars_update(result.theta, deltas, plus, minus, opt.ars);

    const d2::D2Sample eval_sample =
        randomized ? d2::sample_d2(opt.dist, derive_seed(opt.master_seed, {kTagEvalSample, e}))
                   : fixed;
    const rollout::RolloutResult eval = evaluate(result.theta, eval_sample);
    EpochLog entry;
    entry.epoch = epoch;
    entry.sample = sample;
    entry.eval_return = eval.normalized_return;
    entry.eval_distance = eval.distance;
    entry.eval_fell = eval.fell;
    entry.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.log.push_back(entry);
    if (opt.on_epoch) opt.on_epoch(entry);
  }
  return result;
}

}  // namespace legkit::ars
