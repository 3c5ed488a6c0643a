#include "eigenbench_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include "eigenbench/dataset.hpp"
#include "eigenbench/eigenfaces.hpp"
#include "eigenbench/error.hpp"
#include "eigenbench/evaluation.hpp"
#include "eigenbench/model_io.hpp"
#include "eigenbench/report.hpp"
#include "eigenbench_cli/config.hpp"

namespace eigenbench::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Raw flag storage; merged into RunConfig once flags and config are applied.
struct Flags {
  std::string config;

  int subjects = 5;
  int train = 6;
  int test = 2;
  int impostors = 0;
  std::string dims = "24x24";
  double noise = 10.0;
  double subject_amplitude = SynthParams{}.subject_amplitude;
  std::uint64_t seed = 0;

  std::string manifest;
  std::string model;
  std::string image;
  std::string out;
  std::string out_dir;

  std::optional<std::size_t> select_k;
  std::optional<double> select_threshold;
  std::optional<double> theta;

  std::string k_list = "1,2,3,4,5,6";
  std::size_t points = kDefaultGridPoints;

  std::string full_k = "all";
  std::optional<double> pruned_threshold;
  std::optional<std::size_t> pruned_k;
  std::optional<double> pruned_fraction;
  std::size_t repetitions = 3;
};

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorKind::invalid_input, message);
}

ImageDims parse_dims(const std::string& text) {
  const auto x = text.find('x');
  ImageDims dims;
  const auto parse = [&](std::string_view s, std::uint32_t& v) {
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && end == s.data() + s.size() && v > 0;
  };
  if (x == std::string::npos || !parse(std::string_view(text).substr(0, x), dims.width) ||
      !parse(std::string_view(text).substr(x + 1), dims.height)) {
    invalid("--dims expects WIDTHxHEIGHT, got '" + text + "'");
  }
  return dims;
}

std::vector<std::size_t> parse_k_list(const std::string& text) {
  std::vector<std::size_t> ks;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    std::size_t k = 0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), k);
    if (ec != std::errc{} || end != item.data() + item.size()) {
      invalid("--k expects a comma-separated list of integers, got '" + text + "'");
    }
    ks.push_back(k);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  if (ks.empty()) invalid("--k list is empty");
  return ks;
}

std::optional<SelectionRule> selection_from(const std::optional<std::size_t>& k,
                                            const std::optional<double>& tau) {
  if (k && tau) invalid("--select-k and --select-threshold are mutually exclusive");
  if (k) {
    if (*k == 0) invalid("--select-k must be >= 1");
    return SelectionRule::top_k(*k);
  }
  if (tau) return SelectionRule::value_threshold(*tau);
  return std::nullopt;
}

void require(const fs::path& value, const char* flag) {
  if (value.empty()) invalid(std::string("missing required flag ") + flag);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create output directory " + dir.string());
}

void print_warnings(const TrainingSet& ts, std::ostream& err) {
  for (const auto& w : ts.warnings()) err << "warning: " << w << '\n';
}

EigenModel train_from(const Dataset& data, const SelectionRule& rule, std::ostream& err) {
  TrainingSet ts(data.train, data.dims);
  print_warnings(ts, err);
  return train(ts, rule);
}

// --- commands ---------------------------------------------------------------

int cmd_synth(const Flags& f, const RunConfig& rc, std::ostream& out) {
  SynthParams p;
  p.num_subjects = f.subjects;
  p.train_per_subject = f.train;
  p.test_per_subject = f.test;
  p.impostor_subjects = f.impostors;
  p.dims = parse_dims(f.dims);
  p.noise_sigma = f.noise;
  p.subject_amplitude = f.subject_amplitude;
  p.seed = rc.seed;
  const auto data = synthesize(p);
  const Manifest manifest = write_dataset(data, rc.output_dir);
  out << "wrote " << manifest.records.size() << " images (" << manifest.count(Split::train)
      << " train, " << manifest.count(Split::test) << " test) and "
      << (rc.output_dir / "manifest.csv").generic_string() << '\n';
  return kExitOk;
}

int cmd_train(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require(rc.manifest_path, "--manifest");
  require(rc.model_path, "--out");
  const Dataset data = load_dataset(load_manifest(rc.manifest_path));
  const SelectionRule rule = rc.selection.value_or(SelectionRule::all());
  const EigenModel model = train_from(data, rule, err);
  save_model(model, rc.model_path);
  out << "trained on " << model.training_count() << " images of " << model.classes.size()
      << " subjects; kept " << model.kept_count() << " eigenfaces (" << describe(rule)
      << "); wrote " << rc.model_path.generic_string() << '\n';
  return kExitOk;
}

int cmd_identify(const Flags& f, const RunConfig& rc, std::ostream& out) {
  require(rc.model_path, "--model");
  require(f.image, "--image");
  if (!f.theta) invalid("missing required flag --theta");
  const EigenModel model = load_model(rc.model_path);
  const ImageVector probe = load_image_vector(ImageRecord{f.image, "probe", Split::test}, model.dims);
  const MatchDecision d = identify(probe.data, model, rc.theta);
  out << (d.accepted() ? "ACCEPT " : "REJECT ") << d.subject_id << ' ' << format_real(d.distance)
      << '\n';
  return kExitOk;
}

int cmd_sweep_k(const Flags& f, const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require(rc.manifest_path, "--manifest");
  const auto ks = parse_k_list(f.k_list);
  const Dataset data = load_dataset(load_manifest(rc.manifest_path));
  const auto entries = training_size_sweep(data, ks, rc.selection.value_or(SelectionRule::all()),
                                           f.theta.value_or(kInf));
  for (const auto& e : entries) {
    if (e.matching_ratio) {
      out << "k=" << e.k << " matching_ratio=" << format_real(*e.matching_ratio)
          << " n_test=" << e.n_test << '\n';
    } else {
      err << "notice: k=" << e.k << " skipped: " << e.error << '\n';
    }
  }
  ensure_dir(rc.output_dir);
  write_sweep_csv(entries, rc.output_dir / "sweep.csv");
  return kExitOk;
}

int cmd_det(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require(rc.manifest_path, "--manifest");
  const Dataset data = load_dataset(load_manifest(rc.manifest_path));
  if (data.test.empty()) invalid("manifest has no test records to probe with");
  const EigenModel model = rc.model_path.empty()
                               ? train_from(data, rc.selection.value_or(SelectionRule::all()), err)
                               : load_model(rc.model_path);
  const TrialRun run = run_trials(model, data.test);
  for (const auto& s : run.skipped) {
    err << "notice: probe " << s.probe_id << " skipped: " << s.reason << '\n';
  }
  const auto grid = threshold_grid(run.results, rc.grid_points);
  const auto points = far_frr_curve(run.results, grid);
  const auto eer = find_eer(points);
  ensure_dir(rc.output_dir);
  write_det_csv(points, rc.output_dir / "det.csv");
  write_det_svg(points, rc.output_dir / "det.svg");
  out << "trials=" << run.results.size() << " kept=" << model.kept_count()
      << " eer_threshold=" << format_real(eer.threshold) << " eer_rate=" << format_real(eer.rate)
      << '\n';
  return kExitOk;
}

int cmd_bench(const Flags& f, const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require(rc.manifest_path, "--manifest");
  if (f.repetitions == 0) invalid("--repetitions must be >= 1");
  const int pruned_flags = static_cast<int>(f.pruned_threshold.has_value()) +
                           static_cast<int>(f.pruned_k.has_value()) +
                           static_cast<int>(f.pruned_fraction.has_value());
  if (pruned_flags != 1) {
    invalid("bench needs exactly one of --pruned-threshold, --pruned-k, --pruned-fraction");
  }

  SelectionRule full_rule = SelectionRule::all();
  if (f.full_k != "all") {
    std::size_t k = 0;
    const auto [end, ec] = std::from_chars(f.full_k.data(), f.full_k.data() + f.full_k.size(), k);
    if (ec != std::errc{} || end != f.full_k.data() + f.full_k.size() || k == 0) {
      invalid("--full-k expects 'all' or a positive integer, got '" + f.full_k + "'");
    }
    full_rule = SelectionRule::top_k(k);
  }

  const Dataset data = load_dataset(load_manifest(rc.manifest_path));
  if (data.test.empty()) invalid("manifest has no test records to probe with");
  const EigenModel full = train_from(data, full_rule, err);

  SelectionRule pruned_rule = SelectionRule::all();
  if (f.pruned_threshold) {
    pruned_rule = SelectionRule::value_threshold(*f.pruned_threshold);
  } else if (f.pruned_k) {
    if (*f.pruned_k == 0) invalid("--pruned-k must be >= 1");
    pruned_rule = SelectionRule::top_k(*f.pruned_k);
  } else {
    const double frac = *f.pruned_fraction;
    if (!(frac > 0.0 && frac <= 1.0)) invalid("--pruned-fraction must lie in (0, 1]");
    const auto k = static_cast<std::size_t>(
        std::max(1.0, std::round(frac * static_cast<double>(full.kept_count()))));
    pruned_rule = SelectionRule::top_k(k);
  }
  const EigenModel pruned = prune(full, pruned_rule);

  const BenchmarkResult result = pruning_benchmark(full, pruned, data.test, f.repetitions);
  ensure_dir(rc.output_dir);
  write_timing_csv(result, rc.output_dir / "timing.csv");
  out << "full kept=" << result.full.kept_count
      << " median_s=" << format_real(result.full.summary.median) << '\n'
      << "pruned kept=" << result.pruned.kept_count
      << " median_s=" << format_real(result.pruned.summary.median) << '\n'
      << "median_ratio=" << format_real(result.median_ratio())
      << " agreement=" << format_real(result.prediction_agreement) << '\n';
  return kExitOk;
}

// --- config merging ---------------------------------------------------------

const std::vector<std::set<std::string>>& exclusive_groups() {
  static const std::vector<std::set<std::string>> groups = {
      {"select-k", "select-threshold"},
      {"pruned-threshold", "pruned-k", "pruned-fraction"},
  };
  return groups;
}

void apply_config(CLI::App& app, CLI::App& sub, const ConfigMap& config, std::ostream& err) {
  std::set<std::string> known;
  for (const CLI::App* s : app.get_subcommands({})) {
    for (const CLI::Option* o : s->get_options()) {
      for (const auto& name : o->get_lnames()) known.insert(name);
    }
  }
  const auto given_on_cli = [&](const std::string& key) {
    const CLI::Option* o = sub.get_option_no_throw("--" + key);
    return o != nullptr && o->count() > 0;
  };

  for (const auto& [key, value] : config) {
    if (key == "config") continue;
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr) {
      if (!known.contains(key)) invalid("unknown config key '" + key + "'");
      continue;
    }
    if (opt->count() > 0) {
      err << "notice: --" << key << " on the command line overrides config value '" << value
          << "'\n";
      continue;
    }
    bool shadowed = false;
    for (const auto& group : exclusive_groups()) {
      if (!group.contains(key)) continue;
      for (const auto& other : group) {
        if (other != key && given_on_cli(other)) {
          err << "notice: --" << other << " on the command line overrides config key '" << key
              << "'\n";
          shadowed = true;
        }
      }
    }
    if (shadowed) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eigenfaces face recognition with eigenvalue-threshold pruning"};
  app.name(args.empty() ? "eigenbench" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "Flat key=value defaults file (flags win)");

  const auto add_out_dir = [&](CLI::App* s) {
    s->add_option("--out-dir", f.out_dir, "Output directory (default: $EIGENBENCH_OUT or .)");
  };
  const auto add_selection = [&](CLI::App* s) {
    s->add_option("--select-k", f.select_k, "Keep the leading k eigenfaces");
    s->add_option("--select-threshold", f.select_threshold,
                  "Keep eigenfaces whose eigenvalue is >= this value");
  };

  auto* synth = app.add_subcommand("synth", "Generate a synthetic face-like dataset");
  synth->add_option("--subjects", f.subjects, "Enrolled subjects")->capture_default_str();
  synth->add_option("--train", f.train, "Training images per subject")->capture_default_str();
  synth->add_option("--test", f.test, "Test images per subject")->capture_default_str();
  synth->add_option("--impostors", f.impostors, "Extra test-only subjects")->capture_default_str();
  synth->add_option("--dims", f.dims, "Image size WIDTHxHEIGHT")->capture_default_str();
  synth->add_option("--noise", f.noise, "Gaussian noise sigma in grey levels")->capture_default_str();
  synth->add_option("--subject-amplitude", f.subject_amplitude,
                    "Grey-level amplitude separating subjects")
      ->capture_default_str();
  synth->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  add_out_dir(synth);

  auto* train_cmd = app.add_subcommand("train", "Train an eigenfaces model from a manifest");
  train_cmd->add_option("--manifest", f.manifest, "Dataset manifest");
  add_selection(train_cmd);
  train_cmd->add_option("--out", f.out, "Model file to write");

  auto* ident = app.add_subcommand("identify", "Identify one probe image");
  ident->add_option("--model", f.model, "Model file");
  ident->add_option("--image", f.image, "Probe image (PGM/PPM)");
  ident->add_option("--theta", f.theta, "Acceptance threshold, squared-distance units");

  auto* sweep = app.add_subcommand("sweep-k", "Matching ratio versus training images per subject");
  sweep->add_option("--manifest", f.manifest, "Dataset manifest");
  sweep->add_option("--k", f.k_list, "Comma-separated k values")->capture_default_str();
  sweep->add_option("--theta", f.theta, "Acceptance threshold (default: accept all)");
  add_selection(sweep);
  add_out_dir(sweep);

  auto* det = app.add_subcommand("det", "FAR/FRR threshold sweep with DET curve");
  det->add_option("--manifest", f.manifest, "Dataset manifest");
  det->add_option("--model", f.model, "Use a saved model instead of training");
  det->add_option("--points", f.points, "Threshold grid size")->capture_default_str();
  add_selection(det);
  add_out_dir(det);

  auto* bench = app.add_subcommand("bench", "Full versus pruned identification timing");
  bench->add_option("--manifest", f.manifest, "Dataset manifest");
  bench->add_option("--full-k", f.full_k, "'all' or the eigenface count of the full model")
      ->capture_default_str();
  bench->add_option("--pruned-threshold", f.pruned_threshold, "Eigenvalue threshold tau");
  bench->add_option("--pruned-k", f.pruned_k, "Leading eigenfaces kept by the pruned model");
  bench->add_option("--pruned-fraction", f.pruned_fraction, "Fraction of the full kept count");
  bench->add_option("--repetitions", f.repetitions, "Timed passes per probe")->capture_default_str();
  add_out_dir(bench);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    err << "error: kind=usage message=" << message << '\n';
    return kExitValidation;
  }

  CLI::App* active = app.get_subcommands().front();
  if (!f.config.empty()) apply_config(app, *active, load_config(f.config), err);

  RunConfig rc;
  rc.manifest_path = f.manifest;
  rc.model_path = active == train_cmd ? fs::path(f.out) : fs::path(f.model);
  rc.selection = selection_from(f.select_k, f.select_threshold);
  rc.theta = f.theta.value_or(kInf);
  if (std::isnan(rc.theta) || rc.theta < 0.0) invalid("--theta must be >= 0");
  rc.grid_points = f.points;
  rc.output_dir = f.out_dir.empty() ? default_output_dir() : fs::path(f.out_dir);
  rc.seed = f.seed;

  if (active == synth) return cmd_synth(f, rc, out);
  if (active == train_cmd) return cmd_train(rc, out, err);
  if (active == ident) return cmd_identify(f, rc, out);
  if (active == sweep) return cmd_sweep_k(f, rc, out, err);
  if (active == det) return cmd_det(rc, out, err);
  return cmd_bench(f, rc, out, err);
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const Error& e) {
    err << "error: kind=" << to_string(e.kind()) << " message=" << one_line(e.what()) << '\n';
    return e.kind() == ErrorKind::convergence ? kExitInternal : kExitValidation;
  } catch (const std::exception& e) {
    err << "error: kind=internal message=" << one_line(e.what()) << '\n';
    return kExitInternal;
  }
}

}  // namespace eigenbench::cli
