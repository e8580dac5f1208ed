#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "actq/commands.hpp"
#include "actq/ingest.hpp"
#include "actq/suites.hpp"

using namespace actq;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "actq");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("actq_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SynthIsDeterministic) {
  ASSERT_EQ(run({"synth", "--suite", "massive-basic", "--seed", "3", "--out", path("a.actd")}), 0);
  ASSERT_EQ(run({"synth", "--suite", "massive-basic", "--seed", "3", "--out", path("b.actd")}), 0);
  EXPECT_EQ(slurp(path("a.actd")), slurp(path("b.actd")));
  const auto recs = read_actd_file(path("a.actd"));
  EXPECT_EQ(recs.size(), 8u);
  double biggest = 0.0;
  for (const auto& r : recs) biggest = std::max(biggest, max_abs(r.matrix));
  EXPECT_EQ(biggest, 1000.0);
}

TEST_F(Cli, UnknownSuiteListsAvailable) {
  std::ostringstream log, err;
  EXPECT_EQ(cli::run_synth("nope", 0, path("x.actd"), log, err), cli::kExitConfig);
  EXPECT_NE(err.str().find("massive-basic"), std::string::npos);
  EXPECT_NE(err.str().find("graded"), std::string::npos);
}

TEST_F(Cli, AnalyzeCsvIsDeterministicAndSorted) {
  ASSERT_EQ(run({"synth", "--suite", "graded", "--out", path("g.actd")}), 0);
  for (const char* threads : {"1", "3"}) {
    ASSERT_EQ(run({"analyze", "--input", path("g.actd"), "--transform", "rotate,none", "--threads", threads,
                   "--report", path(std::string("r") + threads + ".csv")}),
              0);
  }
  const auto csv = slurp(path("r1.csv"));
  EXPECT_EQ(csv, slurp(path("r3.csv")));
  std::istringstream in(csv);
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(header, "record,transform,bits,layer_error,act_difficulty,wt_difficulty,act_kurtosis,wt_kurtosis,act_max_abs,effective_bins_min");
  EXPECT_EQ(first.substr(0, first.find(',', first.find(',') + 1)), "layer.0.gate_proj,none");
  EXPECT_EQ(second.substr(0, second.find(',', second.find(',') + 1)), "layer.0.gate_proj,rotate");
  EXPECT_NE(first.find(",a4w4,"), std::string::npos);
}

TEST_F(Cli, SixteenBitsIsNearlyLossless) {
  std::ostringstream log, err;
  cli::AnalyzeOptions o;
  o.suite = "systematic";
  o.bits_act = 16;
  o.bits_wt = 16;
  o.transforms = {TransformKind::None, TransformKind::SmoothRotate};
  o.report = path("r.csv");
  ASSERT_EQ(cli::run_analyze(o, log, err), 0) << err.str();
  std::map<std::string, double> energy;
  for (const auto& p : pair_records(synth_suite("systematic", 0)))
    energy[p.name] = squared_frobenius_norm(matmul(p.activation, p.weight));
  std::istringstream in(slurp(o.report));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    // Uniform-noise estimate is about d / (12 qmax^2) ~ 2e-8 relative here.
    EXPECT_LT(std::stod(cells[3]) / energy.at(cells[0]), 1e-6) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 6);
}

TEST_F(Cli, ExclusionDropsRecordsBeforeSummary) {
  std::ostringstream log, err;
  cli::AnalyzeOptions o;
  o.suite = "massive-basic";
  o.exclude = {"layer.2.", "*.31.*"};
  o.report = path("r.csv");
  ASSERT_EQ(cli::run_analyze(o, log, err), 0) << err.str();
  const auto csv = slurp(o.report);
  EXPECT_EQ(csv.find("layer.2.down_proj"), std::string::npos);
  EXPECT_EQ(csv.find("layer.31.down_proj"), std::string::npos);
  EXPECT_NE(csv.find("layer.30.down_proj"), std::string::npos);
  EXPECT_NE(log.str().find("(n=2)"), std::string::npos) << log.str();
}

TEST_F(Cli, AlphaOverridesReachSmoothing) {
  std::ostringstream log, err;
  cli::AnalyzeOptions o;
  o.suite = "systematic";
  o.transforms = {TransformKind::Smooth};
  o.report = path("a.csv");
  ASSERT_EQ(cli::run_analyze(o, log, err), 0);
  o.alpha_for = {cli::parse_alpha_override("*.o_proj=0.8")};
  o.report = path("b.csv");
  ASSERT_EQ(cli::run_analyze(o, log, err), 0);
  auto line_of = [](const std::string& csv, const std::string& key) {
    const auto at = csv.find(key);
    return csv.substr(at, csv.find('\n', at) - at);
  };
  const auto a = slurp(path("a.csv")), b = slurp(path("b.csv"));
  EXPECT_EQ(line_of(a, "layer.0.k_proj"), line_of(b, "layer.0.k_proj"));
  EXPECT_NE(line_of(a, "layer.1.o_proj"), line_of(b, "layer.1.o_proj"));
  EXPECT_THROW(cli::parse_alpha_override("noequals"), Error);
  EXPECT_THROW(cli::parse_alpha_override("x=1.5"), Error);
  EXPECT_EQ(run({"analyze", "--suite", "graded", "--alpha-for", "layer.1=0", "--report", path("c.csv")}), cli::kExitConfig);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({"analyze", "--input", path("missing.actd"), "--report", path("r.csv")}), cli::kExitConfig);
  EXPECT_EQ(run({"analyze", "--suite", "graded", "--transform", "spin", "--report", path("r.csv")}), cli::kExitConfig);
  EXPECT_EQ(run({"analyze", "--suite", "graded", "--bits-act", "1", "--report", path("r.csv")}), cli::kExitConfig);
  EXPECT_EQ(run({"bogus"}), cli::kExitConfig);
  EXPECT_EQ(run({"hadamard", "--size", "6"}), cli::kExitConfig);
  EXPECT_EQ(run({"hadamard", "--size", "344", "--check"}), cli::kExitOk);

  // Width 6 has no rotation, so that record fails while the other is reported.
  const std::vector<LayerRecord> recs{
      {"odd", TensorKind::Activation, Matrix::from_rows({{1, 2, 3, 4, 5, 6}}), StoredDtype::F64},
      {"odd", TensorKind::Weight, Matrix::from_rows({{1}, {1}, {1}, {1}, {1}, {1}}), StoredDtype::F64},
      {"even", TensorKind::Activation, Matrix::from_rows({{1, 2, 3, 4}}), StoredDtype::F64},
      {"even", TensorKind::Weight, Matrix::from_rows({{1}, {2}, {1}, {1}}), StoredDtype::F64},
  };
  write_actd_file(recs, path("mixed.actd"));
  std::ostringstream log, err;
  cli::AnalyzeOptions o;
  o.input = path("mixed.actd");
  o.transforms = {TransformKind::Rotate};
  o.report = path("r.csv");
  EXPECT_EQ(cli::run_analyze(o, log, err), cli::kExitCompute);
  EXPECT_NE(err.str().find("record 'odd'"), std::string::npos) << err.str();
  EXPECT_NE(slurp(o.report).find("even,rotate"), std::string::npos);
}

TEST_F(Cli, ChartsAreWritten) {
  std::ostringstream log, err;
  cli::AnalyzeOptions o;
  o.suite = "systematic";
  o.transforms = {TransformKind::None, TransformKind::Rotate};
  o.report = path("r.csv");
  o.charts = dir_ / "charts";
  ASSERT_EQ(cli::run_analyze(o, log, err), 0);
  const auto svg = slurp(dir_ / "charts" / "layer.0.k_proj.svg");
  EXPECT_EQ(svg.rfind("<svg", 0) == 0 || svg.find("<svg") != std::string::npos, true);
}

TEST_F(Cli, VerifyPassesAndFlagsCorruptedTable) {
  std::ostringstream ok;
  EXPECT_EQ(cli::run_verify(VerifyLevel::Fast, {}, ok), cli::kExitOk) << ok.str();

  fs::copy(ACTQ_SOURCE_ASSET_DIR, dir_);
  std::string text = slurp(dir_ / "hadamard_172.txt");
  text.replace(text.find("-1"), 2, "+1");
  std::ofstream(dir_ / "hadamard_172.txt") << text;
  std::ostringstream log;
  EXPECT_EQ(cli::run_verify(VerifyLevel::Fast, dir_, log), cli::kExitCompute);
  EXPECT_NE(log.str().find("FAIL asset hadamard_172.txt"), std::string::npos) << log.str();
}

TEST_F(Cli, HadamardPrintsPlanAndSigns) {
  std::ostringstream log, err;
  EXPECT_EQ(cli::run_hadamard(4, true, true, {}, log, err), 0);
  EXPECT_NE(log.str().find("size 4: factors [2, 2]"), std::string::npos);
  EXPECT_NE(log.str().find("+1 -1 +1 -1"), std::string::npos);
  std::ostringstream big;
  EXPECT_EQ(cli::run_hadamard(11008, true, false, {}, big, err), 0);
  EXPECT_NE(big.str().find("factors [64, 172]"), std::string::npos);
}
