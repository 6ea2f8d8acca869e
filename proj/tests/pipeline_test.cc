#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "leadrisk/error.h"
#include "leadrisk/metrics.h"
#include "leadrisk/pipeline.h"
#include "leadrisk/synth.h"

namespace leadrisk {
namespace {

std::vector<std::string> Groups(std::size_t n, std::size_t distinct) {
  std::vector<std::string> g;
  for (std::size_t i = 0; i < n; ++i) g.push_back("p" + std::to_string(i % distinct));
  return g;
}

TEST(Folds, GroupsNeverSplitAndSizesBalanced) {
  const auto groups = Groups(100, 23);
  const FoldPlan plan = GroupedKFold(groups, 5, 9);
  std::map<std::string, std::set<int>> seen;
  const auto folds = plan.row_folds(groups);
  for (std::size_t i = 0; i < groups.size(); ++i) seen[groups[i]].insert(folds[i]);
  for (const auto& [g, f] : seen) EXPECT_EQ(f.size(), 1u) << g;
  const auto counts = plan.group_counts();
  ASSERT_EQ(counts.size(), 5u);
  for (std::size_t c : counts) EXPECT_TRUE(c == 4 || c == 5);
}

TEST(Folds, DeterministicInSeed) {
  const auto groups = Groups(60, 30);
  EXPECT_EQ(GroupedKFold(groups, 3, 1).assignment, GroupedKFold(groups, 3, 1).assignment);
  EXPECT_NE(GroupedKFold(groups, 3, 1).assignment, GroupedKFold(groups, 3, 2).assignment);
}

TEST(Folds, RejectsBadK) {
  const auto groups = Groups(10, 3);
  EXPECT_THROW(GroupedKFold(groups, 1, 0), Error);
  try {
    GroupedKFold(groups, 4, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
  }
}

TEST(Names, RepeatedKindsGetSuffixes) {
  const std::vector<ClassifierSpec> specs{ClassifierSpec::Default(LearnerKind::kGbt),
                                          ClassifierSpec::Default(LearnerKind::kLda),
                                          ClassifierSpec::Default(LearnerKind::kGbt)};
  const auto names = SpecNames(specs);
  EXPECT_EQ(names, (std::vector<std::string>{"gbt_1", "lda", "gbt_2"}));
}

TEST(Cv, SingleClassFoldAucIsNan) {
  const std::vector<std::string> names{"m"};
  const std::vector<std::vector<double>> preds{{0.1, 0.2, 0.8, 0.3}};
  const std::vector<int> labels{0, 0, 1, 0};
  const std::vector<int> folds{0, 0, 1, 1};
  const CvResult r = EvaluateCv(names, preds, labels, folds, 2);
  ASSERT_EQ(r.per_fold.size(), 2u);
  EXPECT_TRUE(std::isnan(r.per_fold[0].auc));
  EXPECT_DOUBLE_EQ(r.summary[0].pooled_auc, 1.0);
  EXPECT_EQ(r.per_fold_csv().substr(0, 27), "fold,model,rows,logloss,auc");
}

TEST(Oof, ProvenanceMatchesFoldAndTrainingExcludesIt) {
  const SignalData s = MakeSignalDataset(200, 1, 2.0, 0.3, 3);
  const FoldPlan plan = GroupedKFold(s.dataset.groups, 4, 3);
  const auto folds = plan.row_folds(s.dataset.groups);
  const std::vector<ClassifierSpec> specs{
      ClassifierSpec::Default(LearnerKind::kGbt).with("trees", 5),
      ClassifierSpec::Default(LearnerKind::kLda)};
  OofOptions opt;
  opt.threads = 3;
  std::mutex mu;
  std::size_t calls = 0;
  opt.observer = [&](int fold, std::size_t, std::span<const std::size_t> rows) {
    std::lock_guard lock(mu);
    ++calls;
    for (std::size_t r : rows) EXPECT_NE(folds[r], fold);
  };
  const OofMatrix oof = OofPredict(specs, s.dataset, plan, 3, opt);
  EXPECT_EQ(calls, 8u);
  for (std::size_t i = 0; i < 200; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(oof.provenance_at(i, j), folds[i]);
}

TEST(Oof, ThreadCountDoesNotChangeResults) {
  const SignalData s = MakeSignalDataset(150, 2, 1.5, 0.3, 8);
  const FoldPlan plan = GroupedKFold(s.dataset.groups, 3, 8);
  const std::vector<ClassifierSpec> specs{
      ClassifierSpec::Default(LearnerKind::kRandomForest).with("trees", 8),
      ClassifierSpec::Default(LearnerKind::kKnn).with("k_neighbors", 10)};
  OofOptions one, many;
  many.threads = 6;
  const OofMatrix a = OofPredict(specs, s.dataset, plan, 8, one);
  const OofMatrix b = OofPredict(specs, s.dataset, plan, 8, many);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(a.column(j), b.column(j));
}

class StackFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new SignalData(MakeSignalDataset(300, 2, 2.0, 0.3, 21));
    const FoldPlan plan = GroupedKFold(data_->dataset.groups, 3, 21);
    const std::vector<ClassifierSpec> specs{
        ClassifierSpec::Default(LearnerKind::kGbt).with("trees", 10),
        ClassifierSpec::Default(LearnerKind::kLogRegL1)};
    const ClassifierSpec meta =
        ClassifierSpec::Default(LearnerKind::kGbt).with("trees", 10).with("max_depth", 2);
    result_ = new StackResult(FitStack(data_->dataset, specs, meta, plan, 21));
  }
  static void TearDownTestSuite() {
    delete result_;
    delete data_;
  }
  static SignalData* data_;
  static StackResult* result_;
};

SignalData* StackFixture::data_ = nullptr;
StackResult* StackFixture::result_ = nullptr;

TEST_F(StackFixture, CvHasEnsembleRowAndLearns) {
  const auto& summary = result_->cv.summary;
  ASSERT_EQ(summary.size(), 3u);
  EXPECT_EQ(summary.back().model, "ensemble");
  EXPECT_GT(summary.back().pooled_auc, 0.7);
  EXPECT_EQ(result_->ensemble_oof.size(), 300u);
}

TEST_F(StackFixture, SaveLoadPreservesPredictions) {
  const auto path = std::filesystem::temp_directory_path() / "leadrisk_stack_test.json";
  result_->model.Save(path.string());
  const StackedModel back = StackedModel::Load(path.string());
  std::filesystem::remove(path);
  for (std::size_t i = 0; i < 300; ++i) {
    const auto row = data_->dataset.rows.row(i);
    EXPECT_EQ(back.predict(row), result_->model.predict(row));
  }
}

TEST_F(StackFixture, SchemaMismatchIsModelCompat) {
  const FeatureSchema other = data_->dataset.schema.without(0);
  try {
    PredictStack(result_->model, other, data_->dataset.rows.row(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kModelCompat);
  }
  nlohmann::json j = result_->model.to_json();
  j["version"] = 99;
  EXPECT_THROW(StackedModel::FromJson(j), Error);
}

TEST_F(StackFixture, MetaDatasetColumnsPerSpec) {
  const Dataset meta = MetaDataset(result_->oof, data_->dataset);
  EXPECT_EQ(meta.schema.size(), 2u);
  EXPECT_EQ(meta.schema.feature(0).name, "p_gbt");
  EXPECT_EQ(meta.labels, data_->dataset.labels);
}

TEST(Selection, PicksLowerLogLossAndBreaksTiesTowardFewerTrees) {
  const SignalData s = MakeSignalDataset(300, 2, 2.0, 0.3, 31);
  const FoldPlan plan = GroupedKFold(s.dataset.groups, 3, 31);
  const ClassifierSpec base = ClassifierSpec::Default(LearnerKind::kKnn);
  // k = 1 gives hard 0/1 votes and a much worse log loss than k = 30.
  const std::vector<ClassifierSpec> grid{base.with("k_neighbors", 1), base.with("k_neighbors", 30)};
  const SelectionResult r = SelectHyperparams(grid, s.dataset, plan, 31);
  EXPECT_EQ(r.best.at(LearnerKind::kKnn).get("k_neighbors"), 30);
  EXPECT_EQ(r.scores.size(), 2u);

  const ClassifierSpec lda = ClassifierSpec::Default(LearnerKind::kLda);
  const ClassifierSpec gbt = ClassifierSpec::Default(LearnerKind::kGbt).with("max_depth", 0);
  // Depth-0 boosting predicts the training prior whatever the tree count.
  const std::vector<ClassifierSpec> ties{gbt.with("trees", 7), gbt.with("trees", 3), lda};
  const SelectionResult t = SelectHyperparams(ties, s.dataset, plan, 31);
  EXPECT_EQ(t.best.at(LearnerKind::kGbt).get("trees"), 3);
  EXPECT_TRUE(t.best.contains(LearnerKind::kLda));
}

}  // namespace
}  // namespace leadrisk
