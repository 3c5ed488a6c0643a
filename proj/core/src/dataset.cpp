#include "eigenbench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "eigenbench/error.hpp"

namespace eigenbench {

std::string_view to_string(Split split) noexcept {
  return split == Split::train ? "train" : "test";
}

std::size_t Manifest::count(Split split) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [split](const ImageRecord& r) { return r.split == split; }));
}

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << "manifest line " << line << ": " << what;
  throw Error(ErrorKind::parse, msg.str());
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::uint32_t parse_dimension(std::string_view field, std::size_t line) {
  std::uint32_t value = 0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || end != field.data() + field.size() || value == 0) {
    parse_fail(line, "expected a positive integer dimension, got '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  Manifest manifest;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    if (!have_header) {
      if (fields.size() != 2) parse_fail(line_no, "expected header 'width,height'");
      manifest.dims.width = parse_dimension(fields[0], line_no);
      manifest.dims.height = parse_dimension(fields[1], line_no);
      have_header = true;
      continue;
    }
    if (fields.size() != 3) {
      parse_fail(line_no, "expected 'path,subject_id,split' (3 fields), got " +
                              std::to_string(fields.size()));
    }
    if (fields[0].empty()) parse_fail(line_no, "empty image path");
    if (fields[1].empty()) parse_fail(line_no, "empty subject_id");
    ImageRecord record;
    if (fields[2] == "train") {
      record.split = Split::train;
    } else if (fields[2] == "test") {
      record.split = Split::test;
    } else {
      parse_fail(line_no, "unknown split '" + std::string(fields[2]) + "' (expected train or test)");
    }
    std::filesystem::path p{std::string(fields[0])};
    record.path = (p.is_relative() && !base_dir.empty()) ? base_dir / p : p;
    record.subject_id = std::string(fields[1]);
    manifest.records.push_back(std::move(record));
  }
  if (!have_header) parse_fail(line_no, "missing 'width,height' header");
  if (manifest.count(Split::train) == 0) parse_fail(line_no, "manifest has no train records");
  return manifest;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open manifest " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_manifest(text, path.parent_path());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string format_manifest(const Manifest& manifest) {
  std::string out = std::to_string(manifest.dims.width) + "," +
                    std::to_string(manifest.dims.height) + "\n";
  for (const auto& r : manifest.records) {
    out += r.path.generic_string();
    out += ',';
    out += r.subject_id;
    out += ',';
    out += to_string(r.split);
    out += '\n';
  }
  return out;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write manifest " + path.string());
  const std::string text = format_manifest(manifest);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::io, "short write to " + path.string());
}

ImageVector load_image_vector(const ImageRecord& record, ImageDims expected) {
  const Raster raster = read_pnm(record.path);
  if (raster.dims != expected) {
    std::ostringstream msg;
    msg << record.path.string() << ": image is " << raster.dims.width << "x"
        << raster.dims.height << ", expected " << expected.width << "x" << expected.height;
    throw Error(ErrorKind::dimension_mismatch, msg.str());
  }
  const auto gray = to_grayscale(raster);
  return ImageVector{Vector(gray.begin(), gray.end()), record};
}

Dataset load_dataset(const Manifest& manifest) {
  Dataset data;
  data.dims = manifest.dims;
  for (const auto& record : manifest.records) {
    auto image = load_image_vector(record, manifest.dims);
    (record.split == Split::train ? data.train : data.test).push_back(std::move(image));
  }
  return data;
}

}  // namespace eigenbench
