#include "eigenbench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "eigenbench/error.hpp"

namespace eigenbench {

namespace {

constexpr int kControlGrid = 6;
constexpr double kBaseAmplitude = 70.0;

enum class Stream : std::uint64_t { base = 1, subject = 2, noise = 3 };

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
                            std::uint64_t b = 0, std::uint64_t c = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(a),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(c)};
  return std::mt19937_64(seq);
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Random control lattice in [-1, 1], interpolated with smoothstep weights.
// The field is C1 and stays within [-1, 1].
std::vector<double> smooth_field(ImageDims dims, std::mt19937_64& engine) {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<double> lattice(kControlGrid * kControlGrid);
  for (double& v : lattice) v = uniform(engine);

  std::vector<double> field(dims.pixel_count());
  const double sx = dims.width > 1 ? (kControlGrid - 1.0) / (dims.width - 1.0) : 0.0;
  const double sy = dims.height > 1 ? (kControlGrid - 1.0) / (dims.height - 1.0) : 0.0;
  for (std::uint32_t y = 0; y < dims.height; ++y) {
    const double gy = y * sy;
    const int y0 = std::min(static_cast<int>(gy), kControlGrid - 2);
    const double ty = smoothstep(gy - y0);
    for (std::uint32_t x = 0; x < dims.width; ++x) {
      const double gx = x * sx;
      const int x0 = std::min(static_cast<int>(gx), kControlGrid - 2);
      const double tx = smoothstep(gx - x0);
      const auto at = [&](int i, int j) { return lattice[j * kControlGrid + i]; };
      const double top = at(x0, y0) * (1 - tx) + at(x0 + 1, y0) * tx;
      const double bottom = at(x0, y0 + 1) * (1 - tx) + at(x0 + 1, y0 + 1) * tx;
      field[static_cast<std::size_t>(y) * dims.width + x] = top * (1 - ty) + bottom * ty;
    }
  }
  return field;
}

std::string subject_label(char prefix, int index, int total) {
  const int width = std::max(2, static_cast<int>(std::to_string(total).size()));
  std::ostringstream out;
  out << prefix;
  out.width(width);
  out.fill('0');
  out << index + 1;
  return out.str();
}

std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

std::string file_name(const SyntheticImage& image) {
  std::ostringstream out;
  out << image.subject_id << '_' << to_string(image.split) << '_';
  out.width(2);
  out.fill('0');
  out << image.index << ".pgm";
  return out.str();
}

}  // namespace

SyntheticDataset synthesize(const SynthParams& params) {
  if (params.num_subjects < 1 || params.train_per_subject < 1 || params.test_per_subject < 1 ||
      params.impostor_subjects < 0) {
    throw Error(ErrorKind::invalid_input,
                "synthesize: subject and per-subject image counts must be >= 1");
  }
  if (!(params.noise_sigma >= 0.0) || !std::isfinite(params.noise_sigma)) {
    throw Error(ErrorKind::invalid_input, "synthesize: noise_sigma must be finite and >= 0");
  }
  if (!(params.subject_amplitude > 0.0) || !std::isfinite(params.subject_amplitude)) {
    throw Error(ErrorKind::invalid_input, "synthesize: subject_amplitude must be positive");
  }
  if (params.dims.pixel_count() == 0) {
    throw Error(ErrorKind::invalid_input, "synthesize: image dimensions must be positive");
  }

  auto base_engine = make_engine(params.seed, Stream::base);
  const auto base = smooth_field(params.dims, base_engine);

  const int total_subjects = params.num_subjects + params.impostor_subjects;
  SyntheticDataset out;
  out.dims = params.dims;
  std::vector<std::vector<std::uint8_t>> prototypes;

  for (int s = 0; s < total_subjects; ++s) {
    const bool impostor = s >= params.num_subjects;
    const std::string id = impostor
                               ? subject_label('x', s - params.num_subjects, params.impostor_subjects)
                               : subject_label('s', s, params.num_subjects);

    auto subject_engine = make_engine(params.seed, Stream::subject, static_cast<std::uint64_t>(s));
    const auto detail = smooth_field(params.dims, subject_engine);
    std::vector<double> prototype(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      prototype[i] = std::clamp(128.0 + kBaseAmplitude * base[i] + params.subject_amplitude * detail[i],
                                0.0, 255.0);
    }

    std::vector<std::uint8_t> quantized(prototype.size());
    std::transform(prototype.begin(), prototype.end(), quantized.begin(), quantize);
    for (const auto& other : prototypes) {
      if (other == quantized) {
        throw Error(ErrorKind::degenerate_training,
                    "synthesize: two subject prototypes coincide; choose another seed");
      }
    }
    prototypes.push_back(quantized);

    const auto emit = [&](Split split, int count) {
      for (int k = 0; k < count; ++k) {
        auto noise_engine = make_engine(params.seed, Stream::noise, static_cast<std::uint64_t>(s),
                                        split == Split::train ? 0 : 1, static_cast<std::uint64_t>(k));
        std::normal_distribution<double> noise(0.0, 1.0);
        SyntheticImage image{id, split, k, std::vector<std::uint8_t>(prototype.size())};
        for (std::size_t i = 0; i < prototype.size(); ++i) {
          const double n = params.noise_sigma > 0.0 ? params.noise_sigma * noise(noise_engine) : 0.0;
          image.pixels[i] = quantize(prototype[i] + n);
        }
        out.images.push_back(std::move(image));
      }
    };
    if (!impostor) emit(Split::train, params.train_per_subject);
    emit(Split::test, params.test_per_subject);
  }
  return out;
}

Manifest write_dataset(const SyntheticDataset& data, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create directory " + dir.string() + ": " + ec.message());

  Manifest manifest;
  manifest.dims = data.dims;
  for (const auto& image : data.images) {
    const std::string name = file_name(image);
    write_pgm(dir / name, data.dims, image.pixels);
    manifest.records.push_back(ImageRecord{name, image.subject_id, image.split});
  }
  write_manifest(manifest, dir / "manifest.csv");
  for (auto& record : manifest.records) record.path = dir / record.path;
  return manifest;
}

Dataset to_dataset(const SyntheticDataset& data) {
  Dataset out;
  out.dims = data.dims;
  for (const auto& image : data.images) {
    ImageVector v{Vector(image.pixels.begin(), image.pixels.end()),
                  ImageRecord{file_name(image), image.subject_id, image.split}};
    (image.split == Split::train ? out.train : out.test).push_back(std::move(v));
  }
  return out;
}

}  // namespace eigenbench
