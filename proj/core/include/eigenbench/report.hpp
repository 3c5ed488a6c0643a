#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "eigenbench/evaluation.hpp"

namespace eigenbench {

/// Shortest decimal form that parses back to the identical double.
std::string format_real(double value);

// Every writer refuses empty input with Error(invalid_input) before touching
// the file system, and reports I/O failures as Error(io).

/// threshold,far,frr,fa,fr,genuine,total
void write_det_csv(std::span<const DetPoint> points, const std::filesystem::path& path);

/// k,matching_ratio,n_test (entries that carry an error are left out)
void write_sweep_csv(std::span<const SweepEntry> entries, const std::filesystem::path& path);

/// variant,kept_count,probe_id,median_seconds
void write_timing_csv(const BenchmarkResult& result, const std::filesystem::path& path);

/// Standalone SVG DET curve: false reject rate against false accept rate,
/// both on normal-deviate axes labelled in percent.
void write_det_svg(std::span<const DetPoint> points, const std::filesystem::path& path,
                   const std::string& title = "DET curve");

std::string det_svg(std::span<const DetPoint> points, const std::string& title);

/// Inverse of the standard normal CDF for p in (0, 1).
double normal_quantile(double p);

}  // namespace eigenbench
