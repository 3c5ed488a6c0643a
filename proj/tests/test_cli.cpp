#include "eigenbench_cli/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "eigenbench/dataset.hpp"
#include "eigenbench/error.hpp"
#include "eigenbench_cli/config.hpp"
#include "oracles.hpp"

namespace {

namespace cli = eigenbench::cli;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "eigenbench");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

class CliTest : public ::testing::Test {
 protected:
  void synth(const std::string& extra_noise = "10") {
    const auto r = run({"synth", "--subjects", "5", "--train", "6", "--test", "2", "--dims", "24x24",
                        "--seed", "0", "--noise", extra_noise, "--out-dir", data_dir().string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  std::filesystem::path data_dir() const { return dir_ / "data"; }
  std::string manifest() const { return (data_dir() / "manifest.csv").string(); }

  oracle::TempDir dir_;
};

TEST_F(CliTest, SynthWritesManifestAndImages) {
  synth();
  std::size_t images = 0;
  for (const auto& e : std::filesystem::directory_iterator(data_dir())) images += e.path().extension() == ".pgm";
  EXPECT_EQ(images, 40u);
  const auto m = eigenbench::load_manifest(manifest());
  EXPECT_EQ(m.records.size(), 40u);
}

TEST_F(CliTest, TrainThenIdentifyPrintsDecision) {
  synth();
  const std::string model = (dir_ / "model.efm").string();
  auto r = run({"train", "--manifest", manifest(), "--select-threshold", "1e3", "--out", model});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_TRUE(std::filesystem::exists(model));

  const std::string probe = (data_dir() / "s03_test_00.pgm").string();
  r = run({"identify", "--model", model, "--image", probe, "--theta", "1e6"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream line(r.out);
  std::string verdict, subject;
  double dist = -1;
  line >> verdict >> subject >> dist;
  EXPECT_TRUE(verdict == "ACCEPT" || verdict == "REJECT") << r.out;
  EXPECT_EQ(subject, "s03");
  EXPECT_GE(dist, 0.0);
  EXPECT_EQ(verdict == "ACCEPT", dist <= 1e6);
  EXPECT_EQ(line_count(r.out), 1u);

  r = run({"identify", "--model", model, "--image", probe, "--theta", "0"});
  EXPECT_EQ(r.out.rfind("REJECT s03 ", 0), 0u) << r.out;
}

TEST_F(CliTest, BenchWritesBothVariants) {
  synth();
  const auto out_dir = dir_ / "bench";
  const auto r = run({"bench", "--manifest", manifest(), "--full-k", "all", "--pruned-threshold", "1e4",
                      "--repetitions", "2", "--out-dir", out_dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(oracle::slurp(out_dir / "timing.csv"));
  std::string header, row;
  std::getline(csv, header);
  EXPECT_EQ(header, "variant,kept_count,probe_id,median_seconds");
  std::map<std::string, int> variants;
  while (std::getline(csv, row)) ++variants[row.substr(0, row.find(','))];
  EXPECT_EQ(variants.size(), 2u);
  EXPECT_EQ(variants["full"], 10);
  EXPECT_EQ(variants["pruned"], 10);
}

TEST_F(CliTest, BenchNeedsExactlyOnePrunedRule) {
  synth();
  auto r = run({"bench", "--manifest", manifest()});
  EXPECT_EQ(r.code, 1);
  r = run({"bench", "--manifest", manifest(), "--pruned-k", "3", "--pruned-fraction", "0.5"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(line_count(r.err), 1u);
}

TEST_F(CliTest, SweepWritesCsvAndNotesSkippedK) {
  synth();
  const auto out_dir = dir_ / "sweep";
  const auto r = run({"sweep-k", "--manifest", manifest(), "--k", "1,3,7", "--out-dir", out_dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("k=7"), std::string::npos);
  const auto text = oracle::slurp(out_dir / "sweep.csv");
  EXPECT_EQ(text.rfind("k,matching_ratio,n_test\n1,", 0), 0u) << text;
  EXPECT_EQ(line_count(text), 3u);
}

TEST_F(CliTest, DetIsByteIdenticalAcrossRuns) {
  synth("25");
  const auto a = dir_ / "a", b = dir_ / "b";
  const auto ra = run({"det", "--manifest", manifest(), "--out-dir", a.string()});
  const auto rb = run({"det", "--manifest", manifest(), "--out-dir", b.string()});
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(rb.code, 0) << rb.err;
  EXPECT_EQ(oracle::slurp(a / "det.csv"), oracle::slurp(b / "det.csv"));
  EXPECT_EQ(line_count(oracle::slurp(a / "det.csv")), 201u);
  EXPECT_TRUE(std::filesystem::exists(a / "det.svg"));
  EXPECT_NE(ra.out.find("trials=10"), std::string::npos);
}

TEST_F(CliTest, ConfigSuppliesDefaultsAndFlagsWin) {
  synth();
  const auto cfg = dir_ / "run.cfg";
  std::ofstream(cfg) << "# defaults\nmanifest = " << manifest() << "\npoints = 7\nselect-k = 2\n";
  const auto out_dir = dir_ / "det";
  const auto r = run({"--config", cfg.string(), "det", "--points", "9", "--select-threshold", "1",
                      "--out-dir", out_dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("notice: --points"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("notice: --select-threshold"), std::string::npos) << r.err;
  EXPECT_EQ(line_count(oracle::slurp(out_dir / "det.csv")), 10u);
  EXPECT_EQ(r.out.find("kept=2 "), std::string::npos) << r.out;
}

TEST_F(CliTest, UnknownConfigKeyIsValidationError) {
  synth();
  const auto cfg = dir_ / "bad.cfg";
  std::ofstream(cfg) << "colour = blue\n";
  const auto r = run({"--config", cfg.string(), "det", "--manifest", manifest()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(line_count(r.err), 1u);
  EXPECT_NE(r.err.find("kind=invalid_input"), std::string::npos) << r.err;
}

TEST(Cli, UnknownFlagIsSingleLineError) {
  const auto r = run({"train", "--bogus", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(line_count(r.err), 1u);
  EXPECT_EQ(r.err.rfind("error: kind=usage ", 0), 0u) << r.err;
}

TEST(Cli, MissingFileIsSingleLineError) {
  oracle::TempDir dir;
  const auto r = run({"train", "--manifest", (dir / "nope.csv").string(), "--out", (dir / "m").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(line_count(r.err), 1u);
  EXPECT_EQ(r.err.rfind("error: kind=io ", 0), 0u) << r.err;
}

TEST(Cli, NegativeThetaIsRejected) {
  const auto r = run({"identify", "--model", "m", "--image", "i", "--theta", "-1"});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, HelpExitsCleanly) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("synth"), std::string::npos);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  oracle::TempDir dir;
  ::setenv("EIGENBENCH_OUT", dir.path().c_str(), 1);
  EXPECT_EQ(cli::default_output_dir(), dir.path());
  const auto r = run({"synth", "--subjects", "2", "--train", "2", "--test", "1", "--dims", "6x6"});
  ::unsetenv("EIGENBENCH_OUT");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.csv"));
  EXPECT_EQ(cli::default_output_dir(), std::filesystem::path("."));
}

TEST(Config, ParsesCommentsAndTrimming) {
  const auto c = cli::parse_config("# top\n a = 1 \n\nb=two words\n");
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.at("a"), "1");
  EXPECT_EQ(c.at("b"), "two words");
  EXPECT_THROW(cli::parse_config("novalue\n"), eigenbench::Error);
  EXPECT_THROW(cli::parse_config("=x\n"), eigenbench::Error);
}

}  // namespace
