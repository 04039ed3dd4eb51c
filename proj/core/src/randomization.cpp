#include "legkit/randomization.hpp"

#include <algorithm>
#include <random>

#include "legkit/seed.hpp"

namespace legkit::d2 {

namespace {

double clipped_gaussian(std::mt19937_64& rng, double nominal, double rel_std, double clip) {
  const double sd = nominal * rel_std;
  if (sd == 0.0) return nominal;
  std::normal_distribution<double> dist(nominal, sd);
  double v = dist(rng);
  v = std::clamp(v, nominal - clip * sd, nominal + clip * sd);
  // Keep strictly positive even when clip * rel_std >= 1.
  return std::max(v, 1e-3 * nominal);
}

}  // namespace

void D2Distribution::validate() const {
  if (!(base_mass_nominal > 0.0) || !(link_mass_nominal > 0.0)) {
    throw ConfigError("nominal masses must be positive");
  }
  if (!(base_mass_rel_std >= 0.0) || !(link_mass_rel_std >= 0.0) || !(clip_sigmas >= 0.0)) {
    throw ConfigError("mass spreads must be non-negative");
  }
  if (!(friction_min > 0.0) || !(friction_max >= friction_min)) {
    throw ConfigError("friction range must be positive and ordered");
  }
  if (!(mesh_magnitude_min >= 0.0) || !(mesh_magnitude_max >= mesh_magnitude_min)) {
    throw ConfigError("mesh magnitude range must be non-negative and ordered");
  }
}

D2Sample sample_d2(const D2Distribution& dist, std::uint64_t seed) {
  dist.validate();
  std::mt19937_64 rng(splitmix64(seed));
  D2Sample s;
  s.base_mass = clipped_gaussian(rng, dist.base_mass_nominal, dist.base_mass_rel_std, dist.clip_sigmas);
  for (double& m : s.link_masses) {
    m = clipped_gaussian(rng, dist.link_mass_nominal, dist.link_mass_rel_std, dist.clip_sigmas);
  }
  std::uniform_real_distribution<double> friction(dist.friction_min, dist.friction_max);
  s.friction = std::min(friction(rng), dist.friction_max);
  std::uniform_real_distribution<double> mesh(dist.mesh_magnitude_min, dist.mesh_magnitude_max);
  s.mesh_magnitude = std::min(mesh(rng), dist.mesh_magnitude_max);
  s.terrain_seed = rng();
  return s;
}

D2Sample nominal_sample(const D2Distribution& dist, const NominalEnvironment& env) {
  D2Sample s;
  s.base_mass = dist.base_mass_nominal;
  s.link_masses.fill(dist.link_mass_nominal);
  s.friction = env.friction;
  s.mesh_magnitude = env.mesh_magnitude;
  s.terrain_seed = env.terrain_seed;
  return s;
}

AppliedD2 apply_d2(const D2Sample& sample, const sim::RobotModel& model,
                   const sim::TerrainLayout& layout) {
  AppliedD2 out{model, nullptr};
  out.model.base_mass = sample.base_mass;
  out.model.link_masses = sample.link_masses;
  out.model.foot_friction = sample.friction;
  out.model.validate();
  out.terrain = std::make_shared<const sim::TerrainField>(
      sim::generate_terrain(sample.mesh_magnitude, layout, sample.terrain_seed));
  return out;
}

}  // namespace legkit::d2
