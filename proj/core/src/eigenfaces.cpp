#include "eigenbench/eigenfaces.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eigenbench/error.hpp"

namespace eigenbench {

std::string describe(const SelectionRule& rule) {
  std::ostringstream out;
  if (rule.kind() == SelectionRule::Kind::top_k) {
    out << "top_k(" << rule.k() << ")";
  } else {
    out << "value_threshold(" << rule.tau() << ")";
  }
  return out.str();
}

TrainingSet::TrainingSet(std::vector<ImageVector> images, ImageDims dims)
    : images_(std::move(images)), dims_(dims) {
  if (images_.size() < 2) {
    throw Error(ErrorKind::invalid_input, "training set needs at least 2 images, got " +
                                              std::to_string(images_.size()));
  }
  const std::size_t d = images_.front().data.size();
  if (d == 0) throw Error(ErrorKind::invalid_input, "training images are empty");
  if (dims_.pixel_count() == 0) {
    dims_ = ImageDims{static_cast<std::uint32_t>(d), 1};
  } else if (dims_.pixel_count() != d) {
    std::ostringstream msg;
    msg << "training images have " << d << " pixels but dims are " << dims_.width << "x"
        << dims_.height;
    throw Error(ErrorKind::dimension_mismatch, msg.str());
  }
  for (const auto& image : images_) {
    if (image.data.size() != d) {
      std::ostringstream msg;
      msg << "training image " << image.source.path.string() << " has " << image.data.size()
          << " pixels, expected " << d;
      throw Error(ErrorKind::dimension_mismatch, msg.str());
    }
    if (image.source.subject_id.empty()) {
      throw Error(ErrorKind::invalid_input, "training image without subject id");
    }
    ++class_counts_[image.source.subject_id];
  }
  if (class_counts_.size() < 2) {
    warnings_.push_back("training set has a single subject; every probe will match it");
  }
}

std::vector<std::size_t> select_eigenfaces(std::span<const double> eigenvalues,
                                           const SelectionRule& rule) {
  std::size_t count = 0;
  if (rule.kind() == SelectionRule::Kind::top_k) {
    count = std::min(rule.k(), eigenvalues.size());
  } else {
    if (std::isnan(rule.tau())) {
      throw Error(ErrorKind::invalid_input, "eigenvalue threshold is NaN");
    }
    while (count < eigenvalues.size() && eigenvalues[count] >= rule.tau()) ++count;
  }
  if (count == 0) {
    throw Error(ErrorKind::empty_selection, "selection " + describe(rule) + " keeps no eigenfaces");
  }
  std::vector<std::size_t> kept(count);
  for (std::size_t i = 0; i < count; ++i) kept[i] = i;
  return kept;
}

Vector compute_mean(const TrainingSet& ts) {
  Vector mean(ts.dimension(), 0.0);
  for (const auto& image : ts.images()) {
    for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += image.data[d];
  }
  const double inv = 1.0 / static_cast<double>(ts.size());
  for (double& v : mean) v *= inv;
  return mean;
}

Matrix center(const TrainingSet& ts, std::span<const double> mean) {
  if (mean.size() != ts.dimension()) {
    throw Error(ErrorKind::dimension_mismatch, "center: mean length differs from image length");
  }
  Matrix a(ts.dimension(), ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto& image = ts.image(i).data;
    auto col = a.column(i);
    for (std::size_t d = 0; d < col.size(); ++d) col[d] = image[d] - mean[d];
  }
  return a;
}

EigenModel train(const TrainingSet& ts, const SelectionRule& rule) {
  EigenModel model;
  const std::size_t d = ts.dimension();
  model.mean_face = compute_mean(ts);
  const Matrix a = center(ts, model.mean_face);

  EigenPairs eig = sym_eig(gram_matrix(a));
  model.eigenvalues = eig.values;

  const double lambda_max = eig.values.front();
  if (!(lambda_max > 0.0)) {
    throw Error(ErrorKind::degenerate_training,
                "training images carry no variance (all centered images are zero)");
  }
  const double floor = kEigenvalueFloorRatio * lambda_max;
  std::size_t admissible = 0;
  while (admissible < eig.values.size() && eig.values[admissible] > floor) ++admissible;

  const std::size_t selected = select_eigenfaces(eig.values, rule).size();
  std::size_t kept = std::min(selected, admissible);

  // Lift V_i to U_i = A V_i and normalize. The first numerically null
  // column ends the kept prefix.
  const double null_norm = kLiftNormRatio * 255.0 * std::sqrt(static_cast<double>(d));
  Matrix u(d, kept);
  for (std::size_t i = 0; i < kept; ++i) {
    auto col = u.column(i);
    const auto v = eig.vectors.column(i);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double w = v[j];
      const auto src = a.column(j);
      for (std::size_t p = 0; p < d; ++p) col[p] += w * src[p];
    }
    const double length = norm(col);
    if (length < null_norm) {
      kept = i;
      break;
    }
    for (double& x : col) x /= length;
  }
  if (kept == 0) {
    throw Error(ErrorKind::degenerate_training, "no eigenface survived the null-direction floor");
  }
  model.eigenfaces = kept == u.cols() ? std::move(u) : u.leading_columns(kept);
  model.selection = rule;
  model.dims = ts.dims();
  model.classes = class_projections(ts, model);
  return model;
}

EigenModel prune(const EigenModel& model, const SelectionRule& rule) {
  const std::size_t selected = select_eigenfaces(model.eigenvalues, rule).size();
  const std::size_t kept = std::min(selected, model.kept_count());
  EigenModel out;
  out.dims = model.dims;
  out.mean_face = model.mean_face;
  out.eigenvalues = model.eigenvalues;
  out.eigenfaces = model.eigenfaces.leading_columns(kept);
  out.selection = rule;
  out.classes = model.classes;
  for (auto& c : out.classes) c.projection.resize(kept);
  return out;
}

namespace {

void check_image(std::span<const double> image, const EigenModel& model) {
  if (image.size() != model.dimension()) {
    std::ostringstream msg;
    msg << "image has " << image.size() << " pixels, model expects " << model.dimension();
    throw Error(ErrorKind::dimension_mismatch, msg.str());
  }
}

void project_into(std::span<const double> image, const EigenModel& model, std::span<double> out) {
  const std::size_t d = model.mean_face.size();
  Vector centered(d);
  for (std::size_t p = 0; p < d; ++p) centered[p] = image[p] - model.mean_face[p];
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = dot(model.eigenfaces.column(i), centered);
}

}  // namespace

Vector project(std::span<const double> image, const EigenModel& model) {
  check_image(image, model);
  Vector weights(model.kept_count());
  project_into(image, model, weights);
  return weights;
}

std::vector<ClassProjection> class_projections(const TrainingSet& ts, const EigenModel& model) {
  std::vector<ClassProjection> classes;
  std::map<std::string, std::size_t> slot;
  for (const auto& [id, count] : ts.class_counts()) {
    slot[id] = classes.size();
    classes.push_back(ClassProjection{id, count, Vector(model.kept_count(), 0.0)});
  }
  for (const auto& image : ts.images()) {
    const Vector w = project(image.data, model);
    auto& target = classes[slot.at(image.source.subject_id)].projection;
    for (std::size_t i = 0; i < w.size(); ++i) target[i] += w[i];
  }
  for (auto& c : classes) {
    const double inv = 1.0 / static_cast<double>(c.image_count);
    for (double& v : c.projection) v *= inv;
  }
  return classes;
}

double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::dimension_mismatch, "distance: vectors differ in length");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

BestMatch nearest_class(std::span<const double> image, const EigenModel& model) {
  if (model.classes.empty() || model.kept_count() == 0) {
    throw Error(ErrorKind::empty_model, "model has no eigenfaces or no class templates");
  }
  check_image(image, model);
  Vector weights(model.kept_count());
  project_into(image, model, weights);

  BestMatch best{0, distance(weights, model.classes.front().projection)};
  for (std::size_t c = 1; c < model.classes.size(); ++c) {
    const double delta = distance(weights, model.classes[c].projection);
    if (delta < best.distance) best = BestMatch{c, delta};
  }
  return best;
}

MatchDecision identify(std::span<const double> image, const EigenModel& model, double threshold) {
  if (!(threshold >= 0.0)) {
    throw Error(ErrorKind::invalid_input, "acceptance threshold must be >= 0");
  }
  if (model.classes.empty() || model.kept_count() == 0) {
    throw Error(ErrorKind::empty_model, "model has no eigenfaces or no class templates");
  }
  const Vector weights = project(image, model);
  MatchDecision decision;
  std::size_t best = 0;
  double best_distance = 0.0;
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    const double delta = distance(weights, model.classes[c].projection);
    decision.per_class_distances.emplace(model.classes[c].subject_id, delta);
    if (c == 0 || delta < best_distance) {
      best = c;
      best_distance = delta;
    }
  }
  decision.subject_id = model.classes[best].subject_id;
  decision.distance = best_distance;
  decision.outcome = best_distance <= threshold ? Outcome::accepted : Outcome::rejected;
  return decision;
}

}  // namespace eigenbench
