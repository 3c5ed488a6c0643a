#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eigenbench/numerics.hpp"
#include "eigenbench/raster.hpp"

namespace eigenbench {

enum class Split { train, test };

std::string_view to_string(Split split) noexcept;

struct ImageRecord {
  std::filesystem::path path;
  std::string subject_id;
  Split split = Split::train;

  bool operator==(const ImageRecord&) const = default;
};

/// Dataset description. On disk: a header line "width,height" followed by
/// one "path,subject_id,split" line per image (UTF-8, LF, no quoting).
/// Relative paths are resolved against the manifest's directory on load.
struct Manifest {
  ImageDims dims;
  std::vector<ImageRecord> records;

  std::size_t count(Split split) const noexcept;
};

Manifest load_manifest(const std::filesystem::path& path);
Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {});
/// Serializes with paths written as stored in the records.
std::string format_manifest(const Manifest& manifest);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// A face image flattened row-major to D = width * height grey levels in [0, 255].
struct ImageVector {
  Vector data;
  ImageRecord source;
};

ImageVector load_image_vector(const ImageRecord& record, ImageDims expected);

/// Image vectors of a manifest, split-separated, in manifest order.
struct Dataset {
  ImageDims dims;
  std::vector<ImageVector> train;
  std::vector<ImageVector> test;
};

Dataset load_dataset(const Manifest& manifest);

// ---------------------------------------------------------------------------
// Synthetic stand-in for a face database.

struct SynthParams {
  int num_subjects = 5;
  int train_per_subject = 6;
  int test_per_subject = 2;
  /// Extra subjects that appear only in the test split (impostor probes).
  int impostor_subjects = 0;
  ImageDims dims{24, 24};
  double noise_sigma = 10.0;
  std::uint64_t seed = 0;
  /// Grey-level amplitude of the per-subject detail field on top of the
  /// shared base face. Smaller values make subjects harder to tell apart.
  double subject_amplitude = 9.0;
};

struct SyntheticImage {
  std::string subject_id;
  Split split = Split::train;
  /// Instance index within (subject, split).
  int index = 0;
  std::vector<std::uint8_t> pixels;
};

struct SyntheticDataset {
  ImageDims dims;
  std::vector<SyntheticImage> images;
};

/// Per subject a seeded smooth prototype; each instance adds Gaussian noise
/// and is clamped and rounded to 0..255. Deterministic in params.seed.
/// Throws Error(invalid_input) for bad counts and Error(degenerate_training)
/// if two prototypes coincide.
SyntheticDataset synthesize(const SynthParams& params);

/// Writes every image as a PGM plus "manifest.csv" into `dir`. The file lists
/// paths relative to `dir`; the returned manifest holds the resolved paths.
Manifest write_dataset(const SyntheticDataset& data, const std::filesystem::path& dir);

Dataset to_dataset(const SyntheticDataset& data);

}  // namespace eigenbench
