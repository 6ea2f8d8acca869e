#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.h"
#include "config.h"
#include "leadrisk/csv.h"
#include "leadrisk/error.h"

namespace leadrisk::cli {
namespace {

namespace fs = std::filesystem;

void Write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    std::string tmpl = (fs::temp_directory_path() / "leadrisk_cli_XXXXXX").string();
    ASSERT_NE(mkdtemp(tmpl.data()), nullptr);
    root_ = new fs::path(tmpl);
    Write(*root_ / "synth.ini", "[run]\nseed = 3\n[synth]\nn_parcels = 400\nn_hydrants = 40\n");
    std::ostringstream sink;
    ASSERT_EQ(Run({"synth", "--config", (*root_ / "synth.ini").string(), "--out",
                   (*root_ / "city").string()},
                  sink),
              kExitOk)
        << sink.str();
    Write(*root_ / "train.ini",
          "[run]\nseed = 3\nfolds = 3\n[data]\nparcels = city/parcels.csv\n"
          "tests = city/tests.csv\nservice_lines = city/service_lines.csv\n"
          "hydrants = city/hydrants.csv\n"
          "[learner.gbt]\ntrees = 10, 20\nmax_depth = 2\n[learner.random_forest]\ntrees = 10\n"
          "[learner.extra_trees]\ntrees = 10\n[learner.logreg_l1]\n[learner.knn]\n"
          "k_neighbors = 15\n[learner.lda]\n[meta]\ntrees = 10\nmax_depth = 2\n"
          "[learning_curve]\nsizes = 100, 300\nreplicates = 3\n");
  }
  static void TearDownTestSuite() {
    fs::remove_all(*root_);
    delete root_;
  }

  static int Run(std::vector<std::string> args, std::ostringstream& sink) {
    args.insert(args.begin(), "leadrisk");
    return RunCli(args, sink, sink);
  }
  static int Run(std::vector<std::string> args) {
    std::ostringstream sink;
    return Run(std::move(args), sink);
  }
  static std::string Cfg(const char* name) { return (*root_ / name).string(); }
  static std::string Dir(const char* name) { return (*root_ / name).string(); }

  static fs::path* root_;
};

fs::path* CliTest::root_ = nullptr;

TEST(Config, ParsesSectionsCommentsAndReportsLines) {
  const ConfigFile c = ParseConfig("# c\n[run]\nseed = 5 # inline\n\n[learner.gbt]\ntrees=1,2\n", "x.ini");
  EXPECT_EQ(c.find("run", "seed")->value, "5");
  EXPECT_EQ(c.find("learner.gbt", "trees")->line, 6);
  try {
    ParseConfig("[run]\nseed = 1\nseed = 2\n", "x.ini");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    EXPECT_NE(std::string(e.what()).find("x.ini:3:"), std::string::npos);
  }
  EXPECT_THROW(ParseConfig("seed = 1\n", "x.ini"), Error);
}

TEST(Config, GridIsCartesianProduct) {
  const ConfigFile c = ParseConfig("[learner.gbt]\ntrees = 10, 20\nmax_depth = 2, 3, 4\n", "g.ini");
  const auto grid = ExpandGrid(LearnerKind::kGbt, c.sections.at("learner.gbt"), "g.ini");
  EXPECT_EQ(grid.size(), 6u);
}

TEST_F(CliTest, MissingSeedAndUnknownKeyExitTwo) {
  Write(*root_ / "noseed.ini", "[run]\nfolds = 3\n");
  std::ostringstream sink;
  EXPECT_EQ(Run({"train", "--config", Cfg("noseed.ini")}, sink), kExitConfig);
  EXPECT_NE(sink.str().find("seed"), std::string::npos);
  Write(*root_ / "bad.ini", "[run]\nseed = 1\nfoldz = 3\n");
  std::ostringstream sink2;
  EXPECT_EQ(Run({"train", "--config", Cfg("bad.ini")}, sink2), kExitConfig);
  EXPECT_NE(sink2.str().find("bad.ini:3:"), std::string::npos);
  EXPECT_EQ(Run({"train", "--bogus"}), kExitConfig);
  EXPECT_EQ(Run({}), kExitConfig);
}

TEST_F(CliTest, SingleClassLabelsExitFour) {
  Write(*root_ / "p1.csv", "pid,Address,Year Built\n1,1 A St,1950\n2,2 A St,1960\n");
  Write(*root_ / "t1.csv", "lead_ppb,address\n1,1 A St\n2,2 A St\n");
  Write(*root_ / "one.ini", "[run]\nseed = 1\n[data]\nparcels = p1.csv\ntests = t1.csv\n");
  std::ostringstream sink;
  EXPECT_EQ(Run({"train", "--config", Cfg("one.ini"), "--out", Dir("one")}, sink), kExitData);
  EXPECT_NE(sink.str().find("single-class"), std::string::npos);
}

TEST_F(CliTest, TrainIsDeterministicAndPredictReportWork) {
  ASSERT_EQ(Run({"train", "--config", Cfg("train.ini"), "--out", Dir("a")}), kExitOk);
  ASSERT_EQ(Run({"train", "--config", Cfg("train.ini"), "--out", Dir("b"), "--threads", "4"}),
            kExitOk);
  for (const char* f : {kCvMetricsFile, kCvSummaryFile, kRocFile, kCalibrationFile, kOofFile,
                        kSelectionFile, kModelFile}) {
    EXPECT_EQ(ReadTextFile(Dir("a") + "/" + f), ReadTextFile(Dir("b") + "/" + f)) << f;
  }
  const std::string summary = ReadTextFile(Dir("a") + "/" + kCvSummaryFile);
  EXPECT_NE(summary.find("\nensemble,"), std::string::npos);

  ASSERT_EQ(Run({"predict", "--model", Dir("a") + "/model.json", "--parcels",
                 Dir("city") + "/parcels.csv", "--out", Dir("a"), "--threshold", "0.05"}),
            kExitOk);
  EXPECT_TRUE(fs::exists(Dir("a") + "/" + kRiskCsvFile));
  EXPECT_TRUE(fs::exists(Dir("a") + "/" + kRiskGeoJsonFile));

  ASSERT_EQ(Run({"report", "--out", Dir("a")}), kExitOk);
  const std::string md = ReadTextFile(Dir("a") + "/" + kReportFile);
  EXPECT_NE(md.find("ensemble"), std::string::npos);
}

TEST_F(CliTest, PredictErrors) {
  EXPECT_EQ(Run({"predict", "--model", Dir("nowhere") + "/model.json", "--parcels",
                 Dir("city") + "/parcels.csv", "--out", Dir("p")}),
            kExitMissingArtifacts);
  ASSERT_EQ(Run({"train", "--config", Cfg("train.ini"), "--out", Dir("m")}), kExitOk);
  Write(*root_ / "thin.csv", "pid,Address\n1,1 A St\n");
  EXPECT_EQ(Run({"predict", "--model", Dir("m") + "/model.json", "--parcels", Cfg("thin.csv"),
                 "--out", Dir("p")}),
            kExitModelCompat);
}

TEST_F(CliTest, ReportNeedsArtifacts) {
  fs::create_directories(*root_ / "empty");
  std::ostringstream sink;
  EXPECT_EQ(Run({"report", "--out", Dir("empty")}, sink), kExitMissingArtifacts);
  EXPECT_NE(sink.str().find(kCvSummaryFile), std::string::npos);
}

TEST_F(CliTest, EvaluateWritesLearningCurveAndIngestWritesAnalyses) {
  ASSERT_EQ(Run({"evaluate", "--config", Cfg("train.ini"), "--out", Dir("e")}), kExitOk);
  EXPECT_TRUE(fs::exists(Dir("e") + "/" + kLearningCurveFile));
  EXPECT_TRUE(fs::exists(Dir("e") + "/" + kCvSummaryFile));
  ASSERT_EQ(Run({"ingest", "--config", Cfg("train.ini"), "--out", Dir("i")}), kExitOk);
  for (const char* f : {kParseReportFile, kDatasetSummaryFile, kSlLabelCountsFile,
                        kSlTypeLeadFile, kDecadeLeadFile, kSlYearFile, kHeatmapFile})
    EXPECT_TRUE(fs::exists(Dir("i") + "/" + f)) << f;
}

TEST_F(CliTest, ImportanceRanksFeatures) {
  ASSERT_EQ(Run({"importance", "--config", Cfg("train.ini"), "--out", Dir("imp")}), kExitOk);
  const std::string csv = ReadTextFile(Dir("imp") + "/" + kImportanceFile);
  EXPECT_EQ(csv.substr(0, 44), "rank,feature,auc_drop,auc_with_all,auc_witho");
}

}  // namespace
}  // namespace leadrisk::cli
