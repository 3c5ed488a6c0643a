#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eigenbench/dataset.hpp"
#include "eigenbench/eigenfaces.hpp"

namespace eigenbench {

/// One probe's threshold-free identification outcome.
struct TrialResult {
  std::size_t probe_index = 0;
  std::string probe_id;
  /// Claimed identity of the probe; `enrolled` says whether the gallery
  /// knows it.
  std::string true_subject;
  std::string predicted;
  double best_distance = 0.0;
  bool enrolled = false;

  bool correct() const noexcept { return enrolled && predicted == true_subject; }
};

struct SkippedProbe {
  std::size_t probe_index = 0;
  std::string probe_id;
  std::string reason;
};

struct TrialRun {
  std::vector<TrialResult> results;
  std::vector<SkippedProbe> skipped;
};

/// File name of the probe's source, or "probe<index>" when it has none.
std::string probe_id(const ImageVector& probe, std::size_t index);

/// Identifies every probe against the gallery, in probe order. Probes whose
/// length does not match the model are skipped and listed, not fatal.
TrialRun run_trials(const EigenModel& model, std::span<const ImageVector> probes);

/// One operating point of a threshold sweep.
///   accepted  := best_distance <= threshold
///   FA        := accepted and (not enrolled or predicted != true subject)
///   FR        := not accepted and enrolled
///   far = FA / total, frr = FR / genuine (denominators floored at 1)
struct DetPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
  std::size_t fa_count = 0;
  std::size_t fr_count = 0;
  /// Correct accepts and correct rejects; the four counts sum to total.
  std::size_t ca_count = 0;
  std::size_t cr_count = 0;
  std::size_t genuine_count = 0;
  std::size_t total_count = 0;
};

DetPoint operating_point(std::span<const TrialResult> trials, double threshold);

/// Throws Error(invalid_input) for empty trials, empty or unsorted thresholds.
std::vector<DetPoint> far_frr_curve(std::span<const TrialResult> trials,
                                    std::span<const double> thresholds);

inline constexpr std::size_t kDefaultGridPoints = 200;

/// `points` log-spaced thresholds spanning the observed best distances,
/// ascending. A non-positive minimum contributes an exact 0 as the first
/// point; the rest are log-spaced from the smallest positive distance.
std::vector<double> threshold_grid(std::span<const TrialResult> trials,
                                   std::size_t points = kDefaultGridPoints);

struct EqualErrorPoint {
  std::size_t index = 0;
  double threshold = 0.0;
  double rate = 0.0;
  double gap = 0.0;
};

/// Swept point minimizing |far - frr|; ties go to the smallest threshold.
EqualErrorPoint find_eer(std::span<const DetPoint> points);

struct SweepEntry {
  std::size_t k = 0;
  std::optional<double> matching_ratio;
  std::size_t n_test = 0;
  std::string error;
};

/// For each k: retrain on the first k training images of every subject
/// (dataset order) and report the fraction of enrolled test probes that are
/// accepted at `threshold` and matched to the right subject. A k that
/// cannot be served yields an entry with an error and the sweep continues.
std::vector<SweepEntry> training_size_sweep(const Dataset& data, std::span<const std::size_t> k_values,
                                            const SelectionRule& selection,
                                            double threshold = std::numeric_limits<double>::infinity());

struct TimingSummary {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

struct TimingReport {
  std::string variant;
  std::size_t kept_count = 0;
  /// Median over repetitions for each probe, in seconds.
  std::vector<double> per_probe_seconds;
  TimingSummary summary;
};

struct BenchmarkResult {
  std::vector<std::string> probe_ids;
  TimingReport full;
  TimingReport pruned;
  double prediction_agreement = 0.0;

  /// pruned.summary.median / full.summary.median
  double median_ratio() const noexcept;
};

TimingSummary summarize(std::span<const double> seconds);

/// Times the identification hot path (projection, distances, argmin) per
/// probe on a monotonic clock, single-threaded. One untimed warmup pass
/// precedes `repetitions` timed passes; the two models alternate per probe.
/// Throws Error(dimension_mismatch) if the models disagree on D or
/// Error(invalid_input) for zero repetitions or no probes.
BenchmarkResult pruning_benchmark(const EigenModel& full, const EigenModel& pruned,
                                  std::span<const ImageVector> probes, std::size_t repetitions);

}  // namespace eigenbench
