#pragma once

// Survivability campaign: many D2-randomized trials of one controller, then a
// died/lived count per distance bucket.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "legkit/randomization.hpp"
#include "legkit/rollout.hpp"

namespace legkit::harness {

enum class PolicySource { kCheckpoint, kOpenLoop, kZero };

struct EvalCampaignSpec {
  int trials = 100;
  int max_steps = 10000;
  double near_edge = 5.0;   // bucket 0: distance <= near_edge
  double far_edge = 18.0;   // bucket 2: distance >= far_edge
  PolicySource source = PolicySource::kZero;
  rollout::Controller controller;  // used for kCheckpoint; the others build their own
  std::uint64_t master_seed = 1;
  bool force_flat = false;  // override every sampled mesh magnitude with 0
  int threads = 0;

  void validate() const;
};

struct TrialRecord {
  int index = 0;
  std::uint64_t seed = 0;   // rollout start seed
  d2::D2Sample sample;
  double distance = 0.0;
  bool fell = false;
  int steps = 0;
  sim::FallStatus fall_status = sim::FallStatus::kNone;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct BucketCount {
  std::string label;
  int died = 0;
  int lived = 0;

  friend bool operator==(const BucketCount&, const BucketCount&) = default;
};

struct CampaignReport {
  std::uint64_t master_seed = 0;
  int max_steps = 0;
  std::vector<TrialRecord> trials;
  std::vector<BucketCount> buckets;  // near, middle, far

  int survived() const;
};

/// Deterministic in the master seed for any thread count: trial i draws its
/// sample and start offset from streams derived from (seed, i).
CampaignReport run_eval_campaign(const EvalCampaignSpec& spec, const d2::D2Distribution& dist,
                                 const rollout::EpisodeConfig& episode);

/// Three buckets: d <= near, near < d < far, d >= far.
std::vector<BucketCount> bucket_counts(const std::vector<TrialRecord>& trials, double near_edge,
                                       double far_edge);

std::string format_distance(double meters);

/// One table, one died/lived column pair per method.
struct ReportColumn {
  std::string method;
  std::vector<BucketCount> buckets;
};

void write_bucket_table(std::ostream& os, const std::vector<ReportColumn>& columns);
void write_bucket_csv(std::ostream& os, const std::vector<ReportColumn>& columns);
void write_trials_csv(std::ostream& os, const CampaignReport& report);

}  // namespace legkit::harness
