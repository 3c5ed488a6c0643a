#include "eigenbench/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "eigenbench/error.hpp"

namespace eigenbench {

namespace {

class HeaderReader {
 public:
  HeaderReader(const std::vector<char>& bytes, const std::filesystem::path& path)
      : bytes_(bytes), path_(path) {}

  unsigned long next_number() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + static_cast<unsigned long>(bytes_[pos_] - '0');
      if (value > 1'000'000'000UL) fail("header number out of range");
      ++pos_;
    }
    if (pos_ == start) fail("expected a number in header");
    return value;
  }

  // Exactly one whitespace byte separates maxval from the sample data.
  std::size_t data_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      fail("missing whitespace after maxval");
    }
    return pos_ + 1;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::format, path_.string() + ": " + what);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<char>& bytes_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 2;
};

}  // namespace

Raster read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open image " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());

  HeaderReader header(bytes, path);
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    header.fail("not a binary PGM/PPM file (expected P5 or P6 magic)");
  }
  Raster raster;
  raster.channels = bytes[1] == '5' ? 1 : 3;
  raster.dims.width = static_cast<std::uint32_t>(header.next_number());
  raster.dims.height = static_cast<std::uint32_t>(header.next_number());
  const unsigned long maxval = header.next_number();
  if (raster.dims.width == 0 || raster.dims.height == 0) header.fail("zero image dimension");
  if (maxval == 0 || maxval > 255) header.fail("only 8-bit samples (maxval 1..255) are supported");

  const std::size_t offset = header.data_offset();
  const std::size_t count = raster.dims.pixel_count() * static_cast<std::size_t>(raster.channels);
  if (bytes.size() - offset < count) {
    std::ostringstream msg;
    msg << "truncated sample data: expected " << count << " bytes, found "
        << bytes.size() - offset;
    header.fail(msg.str());
  }
  raster.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto s = static_cast<unsigned char>(bytes[offset + i]);
    if (s > maxval) header.fail("sample exceeds maxval");
    raster.samples[i] = maxval == 255
                            ? s
                            : static_cast<std::uint8_t>(std::lround(255.0 * s / static_cast<double>(maxval)));
  }
  return raster;
}

void write_pgm(const std::filesystem::path& path, ImageDims dims,
               std::span<const std::uint8_t> pixels) {
  if (pixels.size() != dims.pixel_count()) {
    throw Error(ErrorKind::dimension_mismatch, "write_pgm: pixel count does not match dims");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write image " + path.string());
  out << "P5\n" << dims.width << ' ' << dims.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  if (!out) throw Error(ErrorKind::io, "short write to " + path.string());
}

std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::lround(std::min(255.0, y)));
}

std::vector<std::uint8_t> to_grayscale(const Raster& raster) {
  if (raster.channels == 1) return raster.samples;
  std::vector<std::uint8_t> gray(raster.dims.pixel_count());
  for (std::size_t i = 0; i < gray.size(); ++i) {
    gray[i] = luminance(raster.samples[3 * i], raster.samples[3 * i + 1], raster.samples[3 * i + 2]);
  }
  return gray;
}

}  // namespace eigenbench
