#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace eigenbench {

struct ImageDims {
  std::uint32_t width = 0;
  std::uint32_t height = 0;

  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  bool operator==(const ImageDims&) const = default;
};

/// 8-bit raster as read from a binary PNM file: one channel (P5) or
/// interleaved RGB (P6), rows top to bottom.
struct Raster {
  ImageDims dims;
  int channels = 1;
  std::vector<std::uint8_t> samples;
};

/// Reads binary PGM (P5) or PPM (P6). Samples with maxval < 255 are
/// rescaled to 0..255. Throws Error(io) / Error(format).
Raster read_pnm(const std::filesystem::path& path);

/// Writes a binary PGM: "P5\n<w> <h>\n255\n" followed by the raw bytes.
void write_pgm(const std::filesystem::path& path, ImageDims dims,
               std::span<const std::uint8_t> pixels);

/// round(0.299 R + 0.587 G + 0.114 B)
std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

/// Collapses RGB rasters to one luminance channel; grayscale passes through.
std::vector<std::uint8_t> to_grayscale(const Raster& raster);

}  // namespace eigenbench
