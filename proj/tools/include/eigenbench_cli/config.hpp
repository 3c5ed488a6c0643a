#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "eigenbench/eigenfaces.hpp"

namespace eigenbench::cli {

/// Flat "key=value" file. Blank lines and lines starting with '#' are
/// ignored; whitespace around keys and values is trimmed. Keys are the long
/// flag names without dashes (e.g. "manifest", "select-threshold").
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config(std::string_view text);
ConfigMap load_config(const std::filesystem::path& path);

/// Settings shared by every subcommand after flags, config file and
/// environment have been merged (flags > config > environment > defaults).
struct RunConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path model_path;
  std::optional<SelectionRule> selection;
  double theta = 0.0;
  std::size_t grid_points = 200;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
};

/// Value of EIGENBENCH_OUT, or "." when unset or empty.
std::filesystem::path default_output_dir();

}  // namespace eigenbench::cli
