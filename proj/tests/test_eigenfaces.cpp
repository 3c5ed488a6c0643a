#include "eigenbench/eigenfaces.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "eigenbench/error.hpp"
#include "oracles.hpp"

namespace {

using eigenbench::ErrorKind;
using eigenbench::ImageVector;
using eigenbench::SelectionRule;
using eigenbench::TrainingSet;
using eigenbench::Vector;

ImageVector image(Vector data, const std::string& subject) {
  return ImageVector{std::move(data), {"", subject, eigenbench::Split::train}};
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const eigenbench::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an eigenbench::Error";
  return ErrorKind::invalid_input;
}

std::vector<ImageVector> random_images(std::size_t count, std::size_t subjects, std::size_t d,
                                       std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 255.0);
  std::vector<ImageVector> out;
  for (std::size_t i = 0; i < count; ++i) {
    Vector v(d);
    for (double& x : v) x = u(rng);
    out.push_back(image(std::move(v), "s" + std::to_string(i % subjects)));
  }
  return out;
}

TrainingSet synthetic_training(double noise, std::uint64_t seed = 0, int subjects = 5) {
  eigenbench::SynthParams p;
  p.num_subjects = subjects;
  p.noise_sigma = noise;
  p.seed = seed;
  const auto data = eigenbench::to_dataset(eigenbench::synthesize(p));
  return TrainingSet(data.train, data.dims);
}

TEST(TrainingSetType, RejectsTooFewOrInconsistentImages) {
  EXPECT_EQ(kind_of([] { TrainingSet({image({1, 2}, "a")}); }), ErrorKind::invalid_input);
  EXPECT_EQ(kind_of([] { TrainingSet({image({1, 2}, "a"), image({1}, "b")}); }),
            ErrorKind::dimension_mismatch);
  EXPECT_EQ(kind_of([] { TrainingSet({image({1, 2}, "a"), image({1, 2}, "")}); }),
            ErrorKind::invalid_input);
  EXPECT_EQ(kind_of([] { TrainingSet({image({1, 2}, "a"), image({1, 2}, "b")}, {3, 1}); }),
            ErrorKind::dimension_mismatch);
}

TEST(TrainingSetType, SingleSubjectWarns) {
  const TrainingSet one({image({1, 2}, "a"), image({3, 4}, "a")});
  EXPECT_EQ(one.warnings().size(), 1u);
  const TrainingSet two({image({1, 2}, "a"), image({3, 4}, "b")});
  EXPECT_TRUE(two.warnings().empty());
  EXPECT_EQ(two.class_counts().at("a"), 1u);
}

TEST(ComputeMean, IdenticalImagesGiveThatImage) {
  const Vector v{3, 1, 4, 1, 5};
  EXPECT_EQ(eigenbench::compute_mean(TrainingSet({image(v, "a"), image(v, "b"), image(v, "c")})), v);
}

TEST(ComputeMean, TwoPointAverage) {
  EXPECT_EQ(eigenbench::compute_mean(TrainingSet({image({0, 0}, "a"), image({10, 20}, "b")})),
            (Vector{5, 10}));
}

TEST(ComputeMean, MatchesResummation) {
  std::mt19937_64 rng(5);
  const auto images = random_images(6, 3, 50, rng);
  std::vector<Vector> raw;
  for (const auto& i : images) raw.push_back(i.data);
  const Vector want = oracle::mean_of(raw);
  const Vector got = eigenbench::compute_mean(TrainingSet(images));
  for (std::size_t d = 0; d < want.size(); ++d) EXPECT_NEAR(got[d], want[d], 1e-12);
}

TEST(Center, IdenticalImagesGiveZeroMatrix) {
  const Vector v{9, 8, 7};
  const TrainingSet ts({image(v, "a"), image(v, "b")});
  const auto a = eigenbench::center(ts, eigenbench::compute_mean(ts));
  for (double x : a.data()) EXPECT_EQ(x, 0.0);
}

TEST(Center, SymmetricPair) {
  const TrainingSet ts({image({2}, "a"), image({4}, "b")});
  const auto a = eigenbench::center(ts, Vector{3});
  EXPECT_EQ(a, eigenbench::Matrix::from_rows({{-1, 1}}));
}

TEST(Center, ColumnsSumToZero) {
  std::mt19937_64 rng(6);
  const TrainingSet ts(random_images(9, 3, 40, rng));
  const auto a = eigenbench::center(ts, eigenbench::compute_mean(ts));
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) sum += a(r, c);
    EXPECT_NEAR(sum, 0.0, 1e-10);
  }
}

TEST(SelectEigenfaces, PrunedSpectrumKeeps188Of230) {
  // 188 values from 5.9288e9 down to exactly the threshold, then 41 smaller
  // positive values and one slightly negative value, 230 in total.
  const double top = 5.9288e9, tau = 4.2201e5, bottom = -1.8949e-7;
  std::vector<double> lambda;
  for (int i = 0; i < 188; ++i) lambda.push_back(top * std::pow(tau / top, i / 187.0));
  lambda.back() = tau;
  for (int i = 1; i <= 41; ++i) lambda.push_back(tau * std::pow(1e-12, i / 41.0));
  lambda.push_back(bottom);
  ASSERT_EQ(lambda.size(), 230u);
  ASSERT_TRUE(std::is_sorted(lambda.rbegin(), lambda.rend()));
  EXPECT_EQ(lambda.front(), top);
  EXPECT_EQ(lambda.back(), bottom);

  const auto kept = eigenbench::select_eigenfaces(lambda, SelectionRule::value_threshold(tau));
  EXPECT_EQ(kept.size(), 188u);
  for (std::size_t i = 0; i < kept.size(); ++i) EXPECT_EQ(kept[i], i);
}

TEST(SelectEigenfaces, NegativeInfinityKeepsAll) {
  const std::vector<double> lambda{4, 2, 0, -1e-9};
  EXPECT_EQ(eigenbench::select_eigenfaces(lambda, SelectionRule::all()).size(), 4u);
}

TEST(SelectEigenfaces, DirectFilter) {
  const std::vector<double> lambda{5, 3, 1};
  std::vector<std::size_t> want;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    if (lambda[i] >= 2.0) want.push_back(i);
  EXPECT_EQ(eigenbench::select_eigenfaces(lambda, SelectionRule::value_threshold(2)), want);
  EXPECT_EQ(want, (std::vector<std::size_t>{0, 1}));
}

TEST(SelectEigenfaces, TopKClampsAndEmptyIsError) {
  const std::vector<double> lambda{5, 3, 1};
  EXPECT_EQ(eigenbench::select_eigenfaces(lambda, SelectionRule::top_k(2)).size(), 2u);
  EXPECT_EQ(eigenbench::select_eigenfaces(lambda, SelectionRule::top_k(10)).size(), 3u);
  EXPECT_EQ(kind_of([&] { eigenbench::select_eigenfaces(lambda, SelectionRule::top_k(0)); }),
            ErrorKind::empty_selection);
  EXPECT_EQ(kind_of([&] { eigenbench::select_eigenfaces(lambda, SelectionRule::value_threshold(6)); }),
            ErrorKind::empty_selection);
  EXPECT_EQ(kind_of([&] { eigenbench::select_eigenfaces(lambda, SelectionRule::value_threshold(NAN)); }),
            ErrorKind::invalid_input);
}

TEST(Train, RankOneForTwoImages) {
  const TrainingSet ts({image({10, 20, 30, 40}, "a"), image({40, 30, 20, 10}, "a")});
  const auto model = eigenbench::train(ts, SelectionRule::all());
  EXPECT_EQ(model.kept_count(), 1u);
  EXPECT_EQ(model.training_count(), 2u);
  EXPECT_GT(model.eigenvalues[0], 0.0);
  EXPECT_LE(std::abs(model.eigenvalues[1]), 1e-10 * model.eigenvalues[0]);
  EXPECT_EQ(ts.warnings().size(), 1u);
}

TEST(Train, ZeroNoisePrototypesGiveRankAtMostFour) {
  const TrainingSet ts = synthetic_training(0.0);
  const auto model = eigenbench::train(ts, SelectionRule::all());
  EXPECT_LE(model.kept_count(), 4u);

  // Rank oracle: count nonzero eigenvalues of the full pixel covariance.
  const auto a = eigenbench::center(ts, eigenbench::compute_mean(ts));
  const auto spectrum = oracle::symmetric_spectrum(oracle::covariance(a));
  std::size_t rank = 0;
  for (double v : spectrum.values) rank += v > 1e-10 * spectrum.values.front();
  EXPECT_EQ(rank, 4u);
  EXPECT_EQ(model.kept_count(), rank);
  EXPECT_EQ(model.eigenvalues.size(), 30u);
}

TEST(Train, IdenticalImagesAreDegenerate) {
  const Vector v{1, 2, 3};
  EXPECT_EQ(kind_of([&] { eigenbench::train(TrainingSet({image(v, "a"), image(v, "b")}), SelectionRule::all()); }),
            ErrorKind::degenerate_training);
}

TEST(Train, SelectionRemovingEverythingIsError) {
  const TrainingSet ts = synthetic_training(10.0);
  EXPECT_EQ(kind_of([&] { eigenbench::train(ts, SelectionRule::value_threshold(1e300)); }),
            ErrorKind::empty_selection);
}

TEST(Train, ModelInvariants) {
  const TrainingSet ts = synthetic_training(12.0, 3);
  const auto model = eigenbench::train(ts, SelectionRule::top_k(12));
  EXPECT_EQ(model.kept_count(), 12u);
  EXPECT_EQ(model.eigenvalues.size(), ts.size());
  EXPECT_EQ(model.dims, ts.dims());
  for (const auto& c : model.classes) EXPECT_EQ(c.projection.size(), 12u);
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t j = 0; j < 12; ++j) {
      EXPECT_NEAR(eigenbench::dot(model.eigenfaces.column(i), model.eigenfaces.column(j)),
                  i == j ? 1.0 : 0.0, 1e-6);
    }
  }
}

TEST(Project, MeanFaceProjectsToZero) {
  const auto model = eigenbench::train(synthetic_training(10.0), SelectionRule::all());
  for (double w : eigenbench::project(model.mean_face, model)) EXPECT_NEAR(w, 0.0, 1e-9);
}

TEST(Project, MeanPlusFirstEigenfaceIsUnitCoordinate) {
  const auto model = eigenbench::train(synthetic_training(10.0), SelectionRule::all());
  Vector x = model.mean_face;
  for (std::size_t p = 0; p < x.size(); ++p) x[p] += model.eigenfaces(p, 0);
  const Vector w = eigenbench::project(x, model);
  EXPECT_NEAR(w[0], 1.0, 1e-9);
  for (std::size_t i = 1; i < w.size(); ++i) EXPECT_NEAR(w[i], 0.0, 1e-9);
}

TEST(Project, MatchesColumnDotProducts) {
  std::mt19937_64 rng(8);
  const auto model = eigenbench::train(synthetic_training(10.0), SelectionRule::all());
  const Vector probe = random_images(1, 1, model.dimension(), rng).front().data;
  const Vector got = eigenbench::project(probe, model);
  for (std::size_t i = 0; i < model.kept_count(); ++i) {
    long double acc = 0.0L;
    for (std::size_t p = 0; p < probe.size(); ++p)
      acc += static_cast<long double>(model.eigenfaces(p, i)) * (probe[p] - model.mean_face[p]);
    EXPECT_NEAR(got[i], static_cast<double>(acc), 1e-9 * std::max(1.0, std::abs(got[i])));
  }
  EXPECT_EQ(kind_of([&] { eigenbench::project(Vector(3, 0.0), model); }), ErrorKind::dimension_mismatch);
}

TEST(ClassProjections, SingleImageClassEqualsItsProjection) {
  const TrainingSet ts({image({0, 0, 0}, "a"), image({3, 1, 2}, "b"), image({1, 5, 1}, "b")});
  const auto model = eigenbench::train(ts, SelectionRule::all());
  EXPECT_EQ(model.classes[0].subject_id, "a");
  EXPECT_EQ(model.classes[0].projection, eigenbench::project(ts.image(0).data, model));
}

TEST(ClassProjections, TwoPointAverage) {
  // A hand-built model whose single eigenface is (1,1)/sqrt2 with zero mean.
  eigenbench::EigenModel model;
  model.mean_face = {0, 0};
  model.eigenfaces = eigenbench::Matrix(2, 1, 1.0 / std::sqrt(2.0));
  const double s = std::sqrt(2.0);
  const TrainingSet ts({image({s / 2, s / 2}, "a"), image({3 * s / 2, 3 * s / 2}, "a"),
                        image({0, 0}, "b")});
  const auto classes = eigenbench::class_projections(ts, model);
  ASSERT_EQ(classes.size(), 2u);
  EXPECT_NEAR(classes[0].projection[0], 2.0, 1e-12);
  EXPECT_EQ(classes[0].image_count, 2u);
}

TEST(ClassProjections, MatchesResummationOverSixImages) {
  const TrainingSet ts = synthetic_training(15.0, 4);
  const auto model = eigenbench::train(ts, SelectionRule::all());
  for (const auto& c : model.classes) {
    EXPECT_EQ(c.image_count, 6u);
    Vector sum(model.kept_count(), 0.0);
    for (const auto& img : ts.images()) {
      if (img.source.subject_id != c.subject_id) continue;
      const Vector w = eigenbench::project(img.data, model);
      for (std::size_t i = 0; i < w.size(); ++i) sum[i] += w[i] / 6.0;
    }
    for (std::size_t i = 0; i < sum.size(); ++i) EXPECT_NEAR(c.projection[i], sum[i], 1e-8);
  }
}

TEST(Distance, ExamplesAndAxioms) {
  const Vector a{1, 2}, b{4, 6};
  EXPECT_EQ(eigenbench::distance(a, a), 0.0);
  EXPECT_EQ(eigenbench::distance(a, b), 3.0 * 3.0 + 4.0 * 4.0);
  EXPECT_EQ(eigenbench::distance(a, b), eigenbench::distance(b, a));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    Vector x(7), y(7);
    for (auto& v : x) v = g(rng);
    for (auto& v : y) v = g(rng);
    EXPECT_GE(eigenbench::distance(x, y), 0.0);
    EXPECT_EQ(eigenbench::distance(x, y), eigenbench::distance(y, x));
    EXPECT_GT(eigenbench::distance(x, y), 0.0);
  }
  EXPECT_EQ(kind_of([] { eigenbench::distance(Vector{1}, Vector{1, 2}); }), ErrorKind::dimension_mismatch);
}

TEST(Identify, SelfMatchOnZeroNoise) {
  const TrainingSet ts = synthetic_training(0.0);
  const auto model = eigenbench::train(ts, SelectionRule::all());
  for (const auto& img : ts.images()) {
    const auto d = eigenbench::identify(img.data, model, 1e12);
    EXPECT_TRUE(d.accepted());
    EXPECT_EQ(d.subject_id, img.source.subject_id);
    EXPECT_NEAR(d.distance, 0.0, 1e-6);
  }
}

TEST(Identify, ZeroThresholdRejectsPositiveDistance) {
  const auto model = eigenbench::train(synthetic_training(10.0), SelectionRule::all());
  Vector probe(model.dimension(), 200.0);
  const auto d = eigenbench::identify(probe, model, 0.0);
  ASSERT_GT(d.distance, 0.0);
  EXPECT_FALSE(d.accepted());
  EXPECT_EQ(d.per_class_distances.size(), model.classes.size());
  EXPECT_EQ(kind_of([&] { eigenbench::identify(probe, model, -1.0); }), ErrorKind::invalid_input);
}

TEST(Identify, DecisionIsArgminWithLexicographicTieBreak) {
  eigenbench::EigenModel model;
  model.mean_face = {0, 0};
  model.eigenfaces = eigenbench::Matrix::identity(2);
  model.classes = {{"alpha", 1, {1, 0}}, {"beta", 1, {-1, 0}}, {"gamma", 1, {0, 5}}};
  const auto d = eigenbench::identify(Vector{0, 0}, model, 10.0);
  EXPECT_EQ(d.subject_id, "alpha");
  EXPECT_EQ(d.distance, 1.0);
  EXPECT_EQ(eigenbench::nearest_class(Vector{0, 0}, model).class_index, 0u);
  EXPECT_EQ(eigenbench::identify(Vector{0, 0}, model, 1.0).outcome, eigenbench::Outcome::accepted);
  EXPECT_EQ(eigenbench::identify(Vector{0, 0}, model, 0.999).outcome, eigenbench::Outcome::rejected);
}

TEST(Identify, EmptyModelIsError) {
  eigenbench::EigenModel model;
  model.mean_face = {0, 0};
  EXPECT_EQ(kind_of([&] { eigenbench::identify(Vector{0, 0}, model, 1.0); }), ErrorKind::empty_model);
  EXPECT_EQ(kind_of([&] { eigenbench::nearest_class(Vector{0, 0}, model); }), ErrorKind::empty_model);
}

TEST(EigenfacesProperty, ReconstructionWithAllNonzeroEigenfaces) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const TrainingSet ts = synthetic_training(12.0, seed);
    const auto model = eigenbench::train(ts, SelectionRule::all());
    for (const auto& img : ts.images()) {
      const Vector w = eigenbench::project(img.data, model);
      double err = 0.0;
      for (std::size_t p = 0; p < img.data.size(); ++p) {
        double r = model.mean_face[p];
        for (std::size_t i = 0; i < w.size(); ++i) r += model.eigenfaces(p, i) * w[i];
        err += (r - img.data[p]) * (r - img.data[p]);
      }
      EXPECT_LE(std::sqrt(err), 1e-6 * eigenbench::norm(img.data));
    }
  }
}

TEST(EigenfacesProperty, LiftedVectorsMatchFullCovarianceEigenvectors) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const TrainingSet ts(random_images(4 + trial % 5, 3, 16, rng), {4, 4});
    const auto model = eigenbench::train(ts, SelectionRule::all());
    const auto a = eigenbench::center(ts, model.mean_face);
    const auto ref = oracle::symmetric_spectrum(oracle::covariance(a));
    for (std::size_t i = 0; i < model.kept_count(); ++i) {
      EXPECT_NEAR(model.eigenvalues[i], ref.values[i], 1e-8 * ref.values.front());
      Eigen::VectorXd u(16);
      for (int p = 0; p < 16; ++p) u(p) = model.eigenfaces(p, i);
      EXPECT_LE(oracle::sign_agnostic_error(u, ref.vectors.col(i)), 1e-6) << "trial " << trial;
    }
  }
}

TEST(EigenfacesProperty, PruningTruncatesProjection) {
  std::mt19937_64 rng(13);
  const TrainingSet ts = synthetic_training(12.0, 1);
  const auto full = eigenbench::train(ts, SelectionRule::all());
  for (std::size_t k : {1u, 5u, 17u}) {
    const auto pruned = eigenbench::prune(full, SelectionRule::top_k(k));
    EXPECT_EQ(pruned.kept_count(), k);
    EXPECT_EQ(pruned.eigenvalues, full.eigenvalues);
    const Vector probe = random_images(1, 1, full.dimension(), rng).front().data;
    const Vector wf = eigenbench::project(probe, full);
    const Vector wp = eigenbench::project(probe, pruned);
    ASSERT_EQ(wp.size(), k);
    for (std::size_t i = 0; i < k; ++i) EXPECT_EQ(wp[i], wf[i]);
    for (std::size_t c = 0; c < full.classes.size(); ++c) {
      EXPECT_EQ(pruned.classes[c].projection,
                Vector(full.classes[c].projection.begin(), full.classes[c].projection.begin() + k));
    }
  }
}

TEST(EigenfacesProperty, FullRankPruningKeepsPredictions) {
  eigenbench::SynthParams p;
  p.noise_sigma = 14.0;
  p.num_subjects = 8;
  const auto data = eigenbench::to_dataset(eigenbench::synthesize(p));
  const TrainingSet ts(data.train, data.dims);
  const auto full = eigenbench::train(ts, SelectionRule::all());
  const double floor = eigenbench::kEigenvalueFloorRatio * full.eigenvalues.front();
  const auto pruned = eigenbench::prune(full, SelectionRule::value_threshold(floor * 1.0000001));
  for (const auto& probe : data.test) {
    EXPECT_EQ(eigenbench::identify(probe.data, full, 1e30).subject_id,
              eigenbench::identify(probe.data, pruned, 1e30).subject_id);
  }
}

TEST(EigenfacesProperty, AcceptanceIsMonotoneInThreshold) {
  const auto model = eigenbench::train(synthetic_training(12.0, 2), SelectionRule::all());
  std::mt19937_64 rng(14);
  const auto probes = random_images(20, 1, model.dimension(), rng);
  std::vector<double> thetas{0, 1, 1e3, 1e5, 1e6, 1e7, 1e9};
  for (const auto& probe : probes) {
    bool was_accepted = false;
    for (double theta : thetas) {
      const bool now = eigenbench::identify(probe.data, model, theta).accepted();
      EXPECT_TRUE(!was_accepted || now);
      was_accepted = now;
    }
  }
}

}  // namespace
