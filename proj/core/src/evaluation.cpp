#include "eigenbench/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "eigenbench/error.hpp"

namespace eigenbench {

std::string probe_id(const ImageVector& probe, std::size_t index) {
  const auto name = probe.source.path.filename().generic_string();
  return name.empty() ? "probe" + std::to_string(index) : name;
}

TrialRun run_trials(const EigenModel& model, std::span<const ImageVector> probes) {
  std::set<std::string> gallery;
  for (const auto& c : model.classes) gallery.insert(c.subject_id);

  TrialRun run;
  run.results.reserve(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& probe = probes[i];
    if (probe.data.size() != model.dimension()) {
      std::ostringstream msg;
      msg << "probe has " << probe.data.size() << " pixels, model expects " << model.dimension();
      run.skipped.push_back(SkippedProbe{i, probe_id(probe, i), msg.str()});
      continue;
    }
    const BestMatch best = nearest_class(probe.data, model);
    TrialResult t;
    t.probe_index = i;
    t.probe_id = probe_id(probe, i);
    t.true_subject = probe.source.subject_id;
    t.predicted = model.classes[best.class_index].subject_id;
    t.best_distance = best.distance;
    t.enrolled = gallery.contains(t.true_subject);
    run.results.push_back(std::move(t));
  }
  return run;
}

DetPoint operating_point(std::span<const TrialResult> trials, double threshold) {
  DetPoint p;
  p.threshold = threshold;
  p.total_count = trials.size();
  for (const auto& t : trials) {
    const bool accepted = t.best_distance <= threshold;
    if (t.enrolled) ++p.genuine_count;
    if (accepted) {
      (t.correct() ? p.ca_count : p.fa_count) += 1;
    } else {
      (t.enrolled ? p.fr_count : p.cr_count) += 1;
    }
  }
  p.far = static_cast<double>(p.fa_count) / static_cast<double>(std::max<std::size_t>(1, p.total_count));
  p.frr = static_cast<double>(p.fr_count) / static_cast<double>(std::max<std::size_t>(1, p.genuine_count));
  return p;
}

std::vector<DetPoint> far_frr_curve(std::span<const TrialResult> trials,
                                    std::span<const double> thresholds) {
  if (trials.empty()) throw Error(ErrorKind::invalid_input, "far_frr_curve: no trials");
  if (thresholds.empty()) throw Error(ErrorKind::invalid_input, "far_frr_curve: no thresholds");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw Error(ErrorKind::invalid_input, "far_frr_curve: thresholds must be sorted ascending");
  }
  std::vector<DetPoint> points;
  points.reserve(thresholds.size());
  for (double theta : thresholds) points.push_back(operating_point(trials, theta));
  return points;
}

std::vector<double> threshold_grid(std::span<const TrialResult> trials, std::size_t points) {
  if (trials.empty()) throw Error(ErrorKind::invalid_input, "threshold_grid: no trials");
  if (points < 2) throw Error(ErrorKind::invalid_input, "threshold_grid: need at least 2 points");

  double lo = std::numeric_limits<double>::infinity();
  double lo_positive = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& t : trials) {
    lo = std::min(lo, t.best_distance);
    hi = std::max(hi, t.best_distance);
    if (t.best_distance > 0.0) lo_positive = std::min(lo_positive, t.best_distance);
  }

  std::vector<double> grid;
  grid.reserve(points);
  if (!(hi > 0.0)) {
    grid.assign(points, 0.0);
    return grid;
  }
  std::size_t log_points = points;
  if (lo <= 0.0) {
    grid.push_back(0.0);
    --log_points;
  }
  const double a = std::log(lo_positive);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < log_points; ++i) {
    if (i + 1 == log_points) {
      grid.push_back(hi);
    } else if (i == 0) {
      grid.push_back(lo_positive);
    } else {
      const double f = static_cast<double>(i) / static_cast<double>(log_points - 1);
      grid.push_back(std::exp(a + f * (b - a)));
    }
  }
  // Clamp exp/log round-off: each grid value is at least its predecessor.
  for (std::size_t i = 1; i < grid.size(); ++i) grid[i] = std::max(grid[i], grid[i - 1]);
  return grid;
}

EqualErrorPoint find_eer(std::span<const DetPoint> points) {
  if (points.size() < 2) throw Error(ErrorKind::invalid_input, "find_eer: need at least 2 points");
  EqualErrorPoint best;
  best.gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double gap = std::abs(points[i].far - points[i].frr);
    const bool better = gap < best.gap ||
                        (gap == best.gap && points[i].threshold < best.threshold);
    if (better) {
      best.index = i;
      best.threshold = points[i].threshold;
      best.rate = 0.5 * (points[i].far + points[i].frr);
      best.gap = gap;
    }
  }
  return best;
}

std::vector<SweepEntry> training_size_sweep(const Dataset& data, std::span<const std::size_t> k_values,
                                            const SelectionRule& selection, double threshold) {
  std::map<std::string, std::vector<const ImageVector*>> by_subject;
  for (const auto& image : data.train) by_subject[image.source.subject_id].push_back(&image);

  std::vector<SweepEntry> entries;
  for (std::size_t k : k_values) {
    SweepEntry entry;
    entry.k = k;
    try {
      if (k == 0) throw Error(ErrorKind::invalid_input, "k must be >= 1");
      if (by_subject.empty()) throw Error(ErrorKind::invalid_input, "dataset has no training images");
      std::vector<ImageVector> chosen;
      for (const auto& [subject, images] : by_subject) {
        if (images.size() < k) {
          std::ostringstream msg;
          msg << "k=" << k << " exceeds the " << images.size() << " training images of subject "
              << subject;
          throw Error(ErrorKind::invalid_input, msg.str());
        }
      }
      // Preserve dataset order within the per-subject prefix.
      std::map<std::string, std::size_t> taken;
      for (const auto& image : data.train) {
        auto& n = taken[image.source.subject_id];
        if (n < k) {
          chosen.push_back(image);
          ++n;
        }
      }
      const EigenModel model = train(TrainingSet(std::move(chosen), data.dims), selection);
      std::size_t matched = 0;
      for (const auto& probe : data.test) {
        if (!by_subject.contains(probe.source.subject_id)) continue;
        ++entry.n_test;
        const BestMatch best = nearest_class(probe.data, model);
        if (best.distance <= threshold &&
            model.classes[best.class_index].subject_id == probe.source.subject_id) {
          ++matched;
        }
      }
      if (entry.n_test == 0) throw Error(ErrorKind::invalid_input, "no enrolled test probes");
      entry.matching_ratio = static_cast<double>(matched) / static_cast<double>(entry.n_test);
    } catch (const Error& e) {
      entry.matching_ratio.reset();
      entry.error = e.what();
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

double BenchmarkResult::median_ratio() const noexcept {
  return full.summary.median > 0.0 ? pruned.summary.median / full.summary.median
                                   : std::numeric_limits<double>::quiet_NaN();
}

namespace {

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

TimingSummary summarize(std::span<const double> seconds) {
  if (seconds.empty()) return {};
  const auto [lo, hi] = std::minmax_element(seconds.begin(), seconds.end());
  return TimingSummary{*lo, median_of({seconds.begin(), seconds.end()}), *hi};
}

BenchmarkResult pruning_benchmark(const EigenModel& full, const EigenModel& pruned,
                                  std::span<const ImageVector> probes, std::size_t repetitions) {
  if (full.dimension() != pruned.dimension()) {
    throw Error(ErrorKind::dimension_mismatch, "pruning_benchmark: models differ in image length");
  }
  if (repetitions == 0) throw Error(ErrorKind::invalid_input, "pruning_benchmark: repetitions must be >= 1");
  if (probes.empty()) throw Error(ErrorKind::invalid_input, "pruning_benchmark: no probes");
  for (const auto& probe : probes) {
    if (probe.data.size() != full.dimension()) {
      throw Error(ErrorKind::dimension_mismatch, "pruning_benchmark: probe length differs from models");
    }
  }

  using Clock = std::chrono::steady_clock;
  static_assert(Clock::is_steady);
  const std::size_t n = probes.size();

  std::size_t agree = 0;
  for (const auto& probe : probes) {
    const auto a = nearest_class(probe.data, full);
    const auto b = nearest_class(probe.data, pruned);
    if (full.classes[a.class_index].subject_id == pruned.classes[b.class_index].subject_id) ++agree;
  }

  std::vector<std::vector<double>> full_samples(n), pruned_samples(n);
  volatile double sink = 0.0;
  const auto time_one = [&](const ImageVector& probe, const EigenModel& model) {
    const auto start = Clock::now();
    const BestMatch m = nearest_class(probe.data, model);
    const auto stop = Clock::now();
    sink = sink + m.distance;
    return std::chrono::duration<double>(stop - start).count();
  };

  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    for (std::size_t i = 0; i < n; ++i) {
      full_samples[i].push_back(time_one(probes[i], full));
      pruned_samples[i].push_back(time_one(probes[i], pruned));
    }
  }

  const auto report = [&](const char* variant, const EigenModel& model,
                          std::vector<std::vector<double>>& samples) {
    TimingReport r;
    r.variant = variant;
    r.kept_count = model.kept_count();
    r.per_probe_seconds.reserve(n);
    for (auto& s : samples) r.per_probe_seconds.push_back(median_of(std::move(s)));
    r.summary = summarize(r.per_probe_seconds);
    return r;
  };

  BenchmarkResult result;
  for (std::size_t i = 0; i < n; ++i) result.probe_ids.push_back(probe_id(probes[i], i));
  result.full = report("full", full, full_samples);
  result.pruned = report("pruned", pruned, pruned_samples);
  result.prediction_agreement = static_cast<double>(agree) / static_cast<double>(n);
  return result;
}

}  // namespace eigenbench
