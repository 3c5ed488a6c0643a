#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "eigenbench/eigenfaces.hpp"

namespace eigenbench {

/// Binary model layout, all integers and reals little-endian:
///
///   "EFM1"
///   u64 D, u64 M, u64 m', u32 width, u32 height
///   f64 mean[D]
///   f64 eigenvalues[M]
///   f64 eigenfaces[D * m']            column-major
///   u32 class_count
///     per class: u32 id_len, id bytes, u32 image_count, f64 projection[m']
///   u32 crc32 of every preceding byte
///
/// The selection rule is not stored; a loaded model reports top_k(m'),
/// which keeps exactly the stored eigenfaces.
std::vector<std::uint8_t> encode_model(const EigenModel& model);

/// Throws Error(format) for bad magic, truncation or inconsistent fields,
/// Error(unsupported_version) for "EFM<n>" with n != 1, and
/// Error(checksum) on CRC mismatch.
EigenModel decode_model(std::span<const std::uint8_t> bytes);

void save_model(const EigenModel& model, const std::filesystem::path& path);
EigenModel load_model(const std::filesystem::path& path);

}  // namespace eigenbench
