#include <gtest/gtest.h>

#include "leadrisk/error.h"
#include "leadrisk/learner.h"
#include "leadrisk/synth.h"

namespace leadrisk {
namespace {

constexpr LearnerKind kAllKinds[] = {LearnerKind::kGbt,      LearnerKind::kRandomForest,
                                     LearnerKind::kExtraTrees, LearnerKind::kLogRegL1,
                                     LearnerKind::kKnn,      LearnerKind::kLda};

ClassifierSpec Small(LearnerKind kind) {
  ClassifierSpec s = ClassifierSpec::Default(kind);
  if (s.find("trees")) s = s.with("trees", 10);
  if (kind == LearnerKind::kKnn) s = s.with("k_neighbors", 15);
  return s;
}

TEST(Spec, KindNamesRoundTripAndAliases) {
  for (LearnerKind k : kAllKinds) EXPECT_EQ(ParseLearnerKind(LearnerKindName(k)), k);
  EXPECT_EQ(ParseLearnerKind("xgboost"), LearnerKind::kGbt);
  EXPECT_EQ(ParseLearnerKind("rf"), LearnerKind::kRandomForest);
  EXPECT_THROW(ParseLearnerKind("svm"), Error);
}

TEST(Spec, EncodingPerKind) {
  EXPECT_EQ(EncodingFor(LearnerKind::kGbt), EncodingMode::kOrdinal);
  EXPECT_EQ(EncodingFor(LearnerKind::kExtraTrees), EncodingMode::kOrdinal);
  EXPECT_EQ(EncodingFor(LearnerKind::kKnn), EncodingMode::kOneHot);
  EXPECT_EQ(EncodingFor(LearnerKind::kLda), EncodingMode::kOneHot);
}

TEST(Spec, DefaultsValidateAndMetaShape) {
  for (LearnerKind k : kAllKinds) EXPECT_NO_THROW(ClassifierSpec::Default(k).validate());
  const ClassifierSpec meta = ClassifierSpec::DefaultMeta();
  EXPECT_EQ(meta.get("trees"), 800);
  EXPECT_EQ(meta.get("max_depth"), 8);
}

TEST(Spec, ValidationRejectsUnknownKeysAndBadValues) {
  auto expect_config = [](const ClassifierSpec& s) {
    try {
      s.validate();
      FAIL() << s.label();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    }
  };
  expect_config(ClassifierSpec::Default(LearnerKind::kGbt).with("k_neighbors", 3));
  expect_config(ClassifierSpec::Default(LearnerKind::kGbt).with("trees", 2.5));
  expect_config(ClassifierSpec::Default(LearnerKind::kGbt).with("learning_rate", 0));
  expect_config(ClassifierSpec::Default(LearnerKind::kKnn).with("k_neighbors", 0));
  expect_config(ClassifierSpec::Default(LearnerKind::kLogRegL1).with("l1_strength", -1));
}

TEST(Spec, LabelAndJson) {
  const ClassifierSpec s = ClassifierSpec::Default(LearnerKind::kKnn).with("k_neighbors", 7);
  EXPECT_EQ(s.label(), "knn(k_neighbors=7)");
  EXPECT_EQ(ClassifierSpec::FromJson(s.to_json()), s);
}

class EveryKind : public ::testing::TestWithParam<LearnerKind> {};

TEST_P(EveryKind, FitsPredictsAndRoundTrips) {
  const SignalData s = MakeSignalDataset(300, 2, 2.0, 0.3, 4);
  const FittedModel m = Fit(Small(GetParam()), s.dataset, 4);
  const FittedModel back = FittedModel::FromJson(nlohmann::json::parse(m.to_json().dump()));
  const auto p = m.predict(s.dataset.rows);
  const auto q = back.predict(s.dataset.rows);
  ASSERT_EQ(p.size(), 300u);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_GE(p[i], 0.0);
    EXPECT_LE(p[i], 1.0);
    EXPECT_EQ(p[i], q[i]);
  }
}

TEST_P(EveryKind, SingleClassGivesConstantWithWarning) {
  SignalData s = MakeSignalDataset(50, 1, 1.0, 0.3, 5);
  std::fill(s.dataset.labels.begin(), s.dataset.labels.end(), 0);
  const FittedModel m = Fit(Small(GetParam()), s.dataset, 1);
  EXPECT_TRUE(std::holds_alternative<ConstantModel>(m.model));
  EXPECT_FALSE(m.warnings.empty());
  EXPECT_LT(m.predict(s.dataset.rows.row(0)), 0.05);
}

INSTANTIATE_TEST_SUITE_P(All, EveryKind, ::testing::ValuesIn(kAllKinds));

TEST(Fit, SpecSeedOverridesArgument) {
  const SignalData s = MakeSignalDataset(200, 2, 1.0, 0.3, 6);
  const ClassifierSpec spec = Small(LearnerKind::kRandomForest).with("seed", 42);
  const FittedModel a = Fit(spec, s.dataset, 1);
  const FittedModel b = Fit(spec, s.dataset, 2);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
}

}  // namespace
}  // namespace leadrisk
