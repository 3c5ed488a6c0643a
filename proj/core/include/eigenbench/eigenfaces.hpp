#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "eigenbench/dataset.hpp"
#include "eigenbench/numerics.hpp"

namespace eigenbench {

/// How many of the sorted eigenfaces take part in projection: either the
/// leading k, or every eigenface whose eigenvalue is >= a threshold.
class SelectionRule {
 public:
  enum class Kind { top_k, value_threshold };

  static SelectionRule top_k(std::size_t k) { return SelectionRule(Kind::top_k, k, 0.0); }
  static SelectionRule value_threshold(double tau) {
    return SelectionRule(Kind::value_threshold, 0, tau);
  }
  /// Keeps everything the training stage admits.
  static SelectionRule all() {
    return value_threshold(-std::numeric_limits<double>::infinity());
  }

  Kind kind() const noexcept { return kind_; }
  std::size_t k() const noexcept { return k_; }
  double tau() const noexcept { return tau_; }

  bool operator==(const SelectionRule&) const = default;

 private:
  SelectionRule(Kind kind, std::size_t k, double tau) : kind_(kind), k_(k), tau_(tau) {}

  Kind kind_;
  std::size_t k_;
  double tau_;
};

std::string describe(const SelectionRule& rule);

/// Training images with their subject bookkeeping. Subjects are listed in
/// lexicographic order; image order is preserved.
class TrainingSet {
 public:
  /// Throws Error(invalid_input) for fewer than 2 images, an empty
  /// subject id, or a zero-length image; Error(dimension_mismatch) if the
  /// images differ in length or disagree with `dims`. Zero dims mean
  /// "unknown" and are recorded as D x 1.
  explicit TrainingSet(std::vector<ImageVector> images, ImageDims dims = {});

  std::size_t size() const noexcept { return images_.size(); }
  std::size_t dimension() const noexcept { return images_.front().data.size(); }
  ImageDims dims() const noexcept { return dims_; }
  const ImageVector& image(std::size_t i) const { return images_.at(i); }
  std::span<const ImageVector> images() const noexcept { return images_; }
  const std::string& subject_of(std::size_t i) const { return images_.at(i).source.subject_id; }

  /// Subject id -> number of training images for that subject.
  const std::map<std::string, std::size_t>& class_counts() const noexcept { return class_counts_; }

  /// Non-fatal findings, e.g. a single-subject gallery.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  std::vector<ImageVector> images_;
  ImageDims dims_;
  std::map<std::string, std::size_t> class_counts_;
  std::vector<std::string> warnings_;
};

struct ClassProjection {
  std::string subject_id;
  std::size_t image_count = 0;
  Vector projection;

  bool operator==(const ClassProjection&) const = default;
};

/// Immutable trained artifact; safe for concurrent readers.
struct EigenModel {
  ImageDims dims;
  Vector mean_face;
  /// Every eigenvalue of the M x M Gram matrix, sorted descending,
  /// including the ones pruned or floored away.
  Vector eigenvalues;
  /// D x m' unit columns, in eigenvalue order.
  Matrix eigenfaces;
  SelectionRule selection = SelectionRule::all();
  /// One gallery template per subject, sorted by subject_id.
  std::vector<ClassProjection> classes;

  std::size_t dimension() const noexcept { return mean_face.size(); }
  std::size_t kept_count() const noexcept { return eigenfaces.cols(); }
  std::size_t training_count() const noexcept { return eigenvalues.size(); }
};

/// Eigenvalues at or below floor_ratio * lambda_max count as null directions.
inline constexpr double kEigenvalueFloorRatio = 1e-10;
/// Lifted columns shorter than this * 255 * sqrt(D) are dropped as null.
inline constexpr double kLiftNormRatio = 1e-12;

/// Kept indices for a descending spectrum. Always a prefix 0..m'-1.
/// Throws Error(empty_selection) if nothing survives.
std::vector<std::size_t> select_eigenfaces(std::span<const double> eigenvalues,
                                           const SelectionRule& rule);

Vector compute_mean(const TrainingSet& ts);

/// D x M matrix whose column i is image i minus the mean.
Matrix center(const TrainingSet& ts, std::span<const double> mean);

/// Full pipeline: mean, centering, Gram matrix, eigendecomposition, lifting
/// with unit normalization, null-direction floor, selection, class templates.
/// Throws Error(degenerate_training) if no direction carries variance and
/// Error(empty_selection) if the rule keeps nothing.
EigenModel train(const TrainingSet& ts, const SelectionRule& rule);

/// Re-applies a selection rule to an already trained model. Keeps a prefix
/// of its eigenfaces and truncates the class templates to match. The pruned
/// projection equals the leading coordinates of the full one.
EigenModel prune(const EigenModel& model, const SelectionRule& rule);

/// Weights of (image - mean) against each kept eigenface.
Vector project(std::span<const double> image, const EigenModel& model);

/// Per-subject average projection of that subject's own training images,
/// sorted by subject_id. Uses only mean_face and eigenfaces of `model`.
std::vector<ClassProjection> class_projections(const TrainingSet& ts, const EigenModel& model);

/// Squared Euclidean distance.
double distance(std::span<const double> a, std::span<const double> b);

struct BestMatch {
  std::size_t class_index = 0;
  double distance = 0.0;
};

/// Identification hot path: projection, one distance per class template,
/// argmin with ties going to the earlier (lexicographically smaller) subject.
BestMatch nearest_class(std::span<const double> image, const EigenModel& model);

enum class Outcome { accepted, rejected };

struct MatchDecision {
  Outcome outcome = Outcome::rejected;
  /// Best-matching subject whether accepted or not.
  std::string subject_id;
  double distance = 0.0;
  std::map<std::string, double> per_class_distances;

  bool accepted() const noexcept { return outcome == Outcome::accepted; }
};

/// Accepts the nearest subject iff its squared distance is <= threshold.
MatchDecision identify(std::span<const double> image, const EigenModel& model, double threshold);

}  // namespace eigenbench
