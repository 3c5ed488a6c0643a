#include "eigenbench/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "eigenbench/error.hpp"

namespace eigenbench {

std::string format_real(double value) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error(ErrorKind::invalid_input, "format_real: conversion failed");
  return std::string(buf.data(), end);
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::io, "short write to " + path.string());
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_det_csv(std::span<const DetPoint> points, const std::filesystem::path& path) {
  if (points.empty()) throw Error(ErrorKind::invalid_input, "write_det_csv: no points");
  std::string text = "threshold,far,frr,fa,fr,genuine,total\n";
  for (const auto& p : points) {
    text += format_real(p.threshold) + ',' + format_real(p.far) + ',' + format_real(p.frr) + ',' +
            std::to_string(p.fa_count) + ',' + std::to_string(p.fr_count) + ',' +
            std::to_string(p.genuine_count) + ',' + std::to_string(p.total_count) + '\n';
  }
  write_text(path, text);
}

void write_sweep_csv(std::span<const SweepEntry> entries, const std::filesystem::path& path) {
  const bool any = std::any_of(entries.begin(), entries.end(),
                               [](const SweepEntry& e) { return e.matching_ratio.has_value(); });
  if (!any) throw Error(ErrorKind::invalid_input, "write_sweep_csv: no successful sweep entries");
  std::string text = "k,matching_ratio,n_test\n";
  for (const auto& e : entries) {
    if (!e.matching_ratio) continue;
    text += std::to_string(e.k) + ',' + format_real(*e.matching_ratio) + ',' +
            std::to_string(e.n_test) + '\n';
  }
  write_text(path, text);
}

void write_timing_csv(const BenchmarkResult& result, const std::filesystem::path& path) {
  if (result.full.per_probe_seconds.empty() && result.pruned.per_probe_seconds.empty()) {
    throw Error(ErrorKind::invalid_input, "write_timing_csv: no timings");
  }
  std::string text = "variant,kept_count,probe_id,median_seconds\n";
  for (const TimingReport* r : {&result.full, &result.pruned}) {
    for (std::size_t i = 0; i < r->per_probe_seconds.size(); ++i) {
      const std::string id = i < result.probe_ids.size() ? result.probe_ids[i] : std::to_string(i);
      text += r->variant + ',' + std::to_string(r->kept_count) + ',' + id + ',' +
              format_real(r->per_probe_seconds[i]) + '\n';
    }
  }
  write_text(path, text);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::invalid_input, "normal_quantile: p must lie in (0, 1)");
  }
  // Acklam's rational approximation followed by one Halley step.
  constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                          1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                          6.680131188771972e+01,  -1.328068155288572e+01};
  constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                          -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                          3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  const auto tail = [&](double q) {
    const double t = std::sqrt(-2.0 * std::log(q));
    return (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
           ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  };
  double x;
  if (p < p_low) {
    x = tail(p);
  } else if (p > 1.0 - p_low) {
    x = -tail(1.0 - p);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

std::string det_svg(std::span<const DetPoint> points, const std::string& title) {
  if (points.empty()) throw Error(ErrorKind::invalid_input, "det_svg: no points");

  constexpr double kWidth = 560, kHeight = 560;
  constexpr double kLeft = 80, kRight = 30, kTop = 50, kBottom = 70;
  constexpr double kMinRate = 0.001, kMaxRate = 0.999;
  const double lo = normal_quantile(kMinRate);
  const double hi = normal_quantile(kMaxRate);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  const auto deviate = [&](double rate) {
    return normal_quantile(std::clamp(rate, kMinRate, kMaxRate));
  };
  const auto sx = [&](double rate) { return kLeft + (deviate(rate) - lo) / (hi - lo) * plot_w; };
  const auto sy = [&](double rate) {
    return kTop + plot_h - (deviate(rate) - lo) / (hi - lo) * plot_h;
  };
  const auto num = [](double v) {
    std::ostringstream s;
    s.precision(2);
    s << std::fixed << v;
    return s.str();
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"16\">" << xml_escape(title) << "</text>\n";

  constexpr double kTicks[] = {0.1, 0.5, 1, 2, 5, 10, 20, 40, 60, 80, 90, 95, 98, 99.5, 99.9};
  svg << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double t : kTicks) {
    const double x = sx(t / 100.0), y = sy(t / 100.0);
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x) << "\" y2=\""
        << num(kTop + plot_h) << "\"/>\n";
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft + plot_w)
        << "\" y2=\"" << num(y) << "\"/>\n";
  }
  svg << "</g>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#333333\">\n";
  for (double t : kTicks) {
    std::ostringstream label;
    label << t;
    svg << "<text x=\"" << num(sx(t / 100.0)) << "\" y=\"" << num(kTop + plot_h + 16)
        << "\" text-anchor=\"middle\">" << label.str() << "</text>\n";
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(t / 100.0) + 3)
        << "\" text-anchor=\"end\">" << label.str() << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 24
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << "False accept rate (%)</text>\n";
  svg << "<text x=\"22\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 22 "
      << kTop + plot_h / 2 << ")\">False reject rate (%)</text>\n";

  std::vector<std::pair<double, double>> curve;
  for (const auto& p : points) curve.emplace_back(p.far, p.frr);
  std::stable_sort(curve.begin(), curve.end());
  svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    svg << (i ? " " : "") << num(sx(curve[i].first)) << ',' << num(sy(curve[i].second));
  }
  svg << "\"/>\n";
  svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\""
      << num(kLeft + plot_w) << "\" y2=\"" << num(kTop)
      << "\" stroke=\"#999999\" stroke-dasharray=\"4 4\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_det_svg(std::span<const DetPoint> points, const std::filesystem::path& path,
                   const std::string& title) {
  write_text(path, det_svg(points, title));
}

}  // namespace eigenbench
