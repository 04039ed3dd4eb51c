#pragma once

// Dynamics + domain randomization: per-episode draws of masses, foot friction
// and terrain roughness.

#include <array>
#include <cstdint>
#include <memory>
#include <utility>

#include "legkit/sim.hpp"
#include "legkit/terrain.hpp"

namespace legkit::d2 {

struct D2Distribution {
  double base_mass_nominal = 1.1;     // kg, Gaussian
  double base_mass_rel_std = 0.2;     // std as a fraction of nominal
  double link_mass_nominal = 0.15;    // kg, Gaussian, per link
  double link_mass_rel_std = 0.2;
  double clip_sigmas = 3.0;
  double friction_min = 0.8;          // uniform
  double friction_max = 1.5;
  double mesh_magnitude_min = 0.0;    // m, uniform
  double mesh_magnitude_max = 0.08;

  void validate() const;
};

struct D2Sample {
  double base_mass = 1.1;
  std::array<double, sim::kNumLinks> link_masses{0.15, 0.15, 0.15, 0.15, 0.15, 0.15, 0.15, 0.15};
  double friction = 1.15;
  double mesh_magnitude = 0.04;
  std::uint64_t terrain_seed = 0;

  friend bool operator==(const D2Sample&, const D2Sample&) = default;
};

/// Deterministic draw. Gaussians are clipped to +-clip_sigmas standard
/// deviations and kept positive.
D2Sample sample_d2(const D2Distribution& dist, std::uint64_t seed);

/// The single fixed environment used for non-randomized training.
struct NominalEnvironment {
  double friction = 1.15;
  double mesh_magnitude = 0.04;
  std::uint64_t terrain_seed = 1;
};

D2Sample nominal_sample(const D2Distribution& dist, const NominalEnvironment& env);

struct AppliedD2 {
  sim::RobotModel model;
  std::shared_ptr<const sim::TerrainField> terrain;
};

/// Substitutes masses and friction into `model` and generates the terrain
/// described by the sample over `layout`.
AppliedD2 apply_d2(const D2Sample& sample, const sim::RobotModel& model,
                   const sim::TerrainLayout& layout);

}  // namespace legkit::d2
