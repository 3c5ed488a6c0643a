#include <benchmark/benchmark.h>

#include <random>

#include "eigenbench/dataset.hpp"
#include "eigenbench/eigenfaces.hpp"
#include "eigenbench/numerics.hpp"

namespace {

eigenbench::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  eigenbench::Matrix m(rows, cols);
  for (double& v : m.data()) v = u(rng);
  return m;
}

const eigenbench::Dataset& face_data() {
  static const eigenbench::Dataset data = [] {
    eigenbench::SynthParams p;
    p.num_subjects = 20;
    p.train_per_subject = 6;
    p.test_per_subject = 1;
    p.dims = {64, 64};
    p.noise_sigma = 12.0;
    return eigenbench::to_dataset(eigenbench::synthesize(p));
  }();
  return data;
}

const eigenbench::EigenModel& face_model() {
  static const eigenbench::EigenModel model = eigenbench::train(
      eigenbench::TrainingSet(face_data().train, face_data().dims), eigenbench::SelectionRule::all());
  return model;
}

void BM_GramMatrix(benchmark::State& state) {
  const auto a = random_matrix(4096, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(eigenbench::gram_matrix(a));
}
BENCHMARK(BM_GramMatrix)->Arg(30)->Arg(120)->Arg(240);

void BM_SymEig(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto s = eigenbench::gram_matrix(random_matrix(n + 8, n, 2));
  for (auto _ : state) benchmark::DoNotOptimize(eigenbench::sym_eig(s));
}
BENCHMARK(BM_SymEig)->Arg(30)->Arg(120)->Arg(240)->Unit(benchmark::kMillisecond);

void BM_NearestClass(benchmark::State& state) {
  const auto& full = face_model();
  const auto keep = static_cast<std::size_t>(state.range(0)) * full.kept_count() / 100;
  const auto model = eigenbench::prune(full, eigenbench::SelectionRule::top_k(std::max<std::size_t>(1, keep)));
  const auto& probe = face_data().test.front().data;
  for (auto _ : state) benchmark::DoNotOptimize(eigenbench::nearest_class(probe, model));
  state.counters["kept"] = static_cast<double>(model.kept_count());
}
BENCHMARK(BM_NearestClass)->Arg(25)->Arg(50)->Arg(82)->Arg(100);

}  // namespace
BENCHMARK_MAIN();
