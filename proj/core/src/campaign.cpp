#include "legkit/campaign.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "legkit/ars.hpp"
#include "legkit/config.hpp"
#include "legkit/seed.hpp"

namespace legkit::harness {

namespace {

constexpr std::uint64_t kTagTrialSample = 10;
constexpr std::uint64_t kTagTrialStart = 11;

}  // namespace

void EvalCampaignSpec::validate() const {
  if (trials < 1) throw ConfigError("campaign needs at least one trial");
  if (max_steps < 1) throw ConfigError("campaign max steps must be positive");
  if (!(near_edge > 0.0 && far_edge > near_edge)) {
    throw ConfigError("bucket edges must satisfy 0 < near < far");
  }
}

int CampaignReport::survived() const {
  return static_cast<int>(std::count_if(trials.begin(), trials.end(),
                                        [](const TrialRecord& t) { return !t.fell; }));
}

CampaignReport run_eval_campaign(const EvalCampaignSpec& spec, const d2::D2Distribution& dist,
                                 const rollout::EpisodeConfig& episode) {
  spec.validate();
  dist.validate();
  episode.validate();

  rollout::Controller controller = spec.controller;
  if (spec.source == PolicySource::kOpenLoop) {
    controller = rollout::Controller::open_loop(episode.bounds.midpoint());
  } else if (spec.source == PolicySource::kZero) {
    controller = rollout::Controller::linear(policy::PolicyMatrix::Zero());
  }

  const sim::TerrainLayout layout = episode.layout_for(spec.max_steps);
  CampaignReport report;
  report.master_seed = spec.master_seed;
  report.max_steps = spec.max_steps;
  report.trials.resize(static_cast<std::size_t>(spec.trials));

  ars::parallel_for(spec.trials, spec.threads, [&](int i) {
    const auto idx = static_cast<std::uint64_t>(i);
    TrialRecord rec;
    rec.index = i;
    rec.seed = derive_seed(spec.master_seed, {kTagTrialStart, idx});
    rec.sample = d2::sample_d2(dist, derive_seed(spec.master_seed, {kTagTrialSample, idx}));
    if (spec.force_flat) rec.sample.mesh_magnitude = 0.0;
    const d2::AppliedD2 env = d2::apply_d2(rec.sample, episode.robot, layout);
    const rollout::RolloutResult r =
        rollout::episode_rollout(controller, env, episode, spec.max_steps, rec.seed);
    rec.distance = r.distance;
    rec.fell = r.fell;
    rec.steps = r.steps;
    rec.fall_status = r.fall_status;
    report.trials[static_cast<std::size_t>(i)] = rec;
  });
  report.buckets = bucket_counts(report.trials, spec.near_edge, spec.far_edge);
  return report;
}

std::string format_distance(double meters) { return format_double(meters) + "m"; }

std::vector<BucketCount> bucket_counts(const std::vector<TrialRecord>& trials, double near_edge,
                                       double far_edge) {
  std::vector<BucketCount> b(3);
  b[0].label = "<= " + format_distance(near_edge);
  b[1].label = format_distance(near_edge) + " to " + format_distance(far_edge);
  b[2].label = ">= " + format_distance(far_edge);
  for (const TrialRecord& t : trials) {
    const std::size_t k = t.distance <= near_edge ? 0 : (t.distance < far_edge ? 1 : 2);
    (t.fell ? b[k].died : b[k].lived) += 1;
  }
  return b;
}

void write_bucket_table(std::ostream& os, const std::vector<ReportColumn>& columns) {
  if (columns.empty()) return;
  const std::size_t rows = columns.front().buckets.size();
  std::size_t label_width = 8;
  for (const auto& b : columns.front().buckets) label_width = std::max(label_width, b.label.size());
  std::size_t col_width = 14;
  for (const auto& c : columns) col_width = std::max(col_width, c.method.size() + 2);
  const int half = static_cast<int>(col_width / 2);

  os << std::left << std::setw(static_cast<int>(label_width)) << "Distance";
  for (const auto& c : columns) os << "  " << std::setw(static_cast<int>(col_width)) << c.method;
  os << '\n' << std::setw(static_cast<int>(label_width)) << "";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    os << "  " << std::right << std::setw(half) << "Died" << std::setw(static_cast<int>(col_width) - half)
       << "Lived" << std::left;
  }
  os << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    os << std::left << std::setw(static_cast<int>(label_width)) << columns.front().buckets[r].label;
    for (const auto& c : columns) {
      os << "  " << std::right << std::setw(half) << c.buckets[r].died
         << std::setw(static_cast<int>(col_width) - half) << c.buckets[r].lived << std::left;
    }
    os << '\n';
  }
}

void write_bucket_csv(std::ostream& os, const std::vector<ReportColumn>& columns) {
  os << "method,bucket,died,lived\n";
  for (const auto& c : columns) {
    for (const auto& b : c.buckets) {
      os << c.method << ',' << b.label << ',' << b.died << ',' << b.lived << '\n';
    }
  }
}

void write_trials_csv(std::ostream& os, const CampaignReport& report) {
  os << "# master_seed " << report.master_seed << " max_steps " << report.max_steps << '\n';
  os << "trial,seed,distance,fell,steps,fall_status,base_mass,friction,mesh_magnitude,terrain_seed\n";
  for (const TrialRecord& t : report.trials) {
    os << t.index << ',' << t.seed << ',' << format_double(t.distance) << ',' << (t.fell ? 1 : 0)
       << ',' << t.steps << ',' << static_cast<int>(t.fall_status) << ','
       << format_double(t.sample.base_mass) << ',' << format_double(t.sample.friction) << ','
       << format_double(t.sample.mesh_magnitude) << ',' << t.sample.terrain_seed << '\n';
  }
}

}  // namespace legkit::harness
