#include <gtest/gtest.h>

#include <cmath>

#include "leadrisk/error.h"
#include "leadrisk/features.h"
#include "leadrisk/ingest.h"

namespace leadrisk {
namespace {

std::vector<ParcelRecord> SmallParcels() {
  return ParseParcels(
             "pid,Address,Zoning,Year Built,Land Value\n"
             "1,1 A St,R1,1920,100\n"
             "2,2 A St,R2,,200\n"
             "3,3 A St,,1960,300\n")
      .parcels;
}

TEST(Labels, ActionLevelIsStrict) {
  EXPECT_EQ(BinarizeLabel(15.0), 0);
  EXPECT_EQ(BinarizeLabel(15.0001), 1);
  EXPECT_EQ(BinarizeLabel(0.0), 0);
  EXPECT_THROW(BinarizeLabel(-1.0), Error);
  EXPECT_DOUBLE_EQ(Log1pLead(0.0), 0.0);
  EXPECT_DOUBLE_EQ(Log1pLead(std::exp(1.0) - 1.0), 1.0);
}

TEST(Schema, VocabulariesSortedWithUnknownLast) {
  const FeatureSchema s = BuildSchema(SmallParcels());
  const auto idx = s.index_of("zoning");
  ASSERT_TRUE(idx.has_value());
  const FeatureDef& f = s.feature(*idx);
  ASSERT_EQ(f.kind, ColumnKind::kCategorical);
  EXPECT_EQ(f.vocabulary.front(), "R1");
  EXPECT_EQ(f.vocabulary.back(), kUnknownCategory);
  EXPECT_EQ(s.category_code(*idx, "R2"), 1);
  EXPECT_EQ(s.category_code(*idx, ""), f.unknown_code());
  EXPECT_EQ(s.category_code(*idx, "never seen"), f.unknown_code());
}

TEST(Schema, HashIsStableAndSensitive) {
  const FeatureSchema a = BuildSchema(SmallParcels());
  const FeatureSchema b = FeatureSchema::FromJson(a.to_json());
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), a.without(0).hash());
  EXPECT_EQ(a.without(0).size(), a.size() - 1);
}

TEST(Schema, RejectsDuplicateNames) {
  EXPECT_THROW(FeatureSchema({FeatureDef{"x", ColumnKind::kNumeric, {}},
                              FeatureDef{"x", ColumnKind::kNumeric, {}}}),
               Error);
}

TEST(Encoding, OrdinalUsesCodesAndMissingSentinel) {
  const auto parcels = SmallParcels();
  const FeatureSchema s = BuildSchema(parcels);
  const auto row = EncodeOrdinal(ParcelRawRow(parcels[1]), s);
  ASSERT_EQ(row.size(), s.size());
  EXPECT_TRUE(IsMissing(row[*s.index_of("year_built")]));
  EXPECT_EQ(row[*s.index_of("land_value")], 200.0);
  EXPECT_EQ(row[*s.index_of("zoning")], 1.0);
}

TEST(Encoding, OneHotStatisticsComeFromFittedRowsOnly) {
  const FeatureSchema s({FeatureDef{"x", ColumnKind::kNumeric, {}},
                         FeatureDef{"c", ColumnKind::kCategorical, {"a", "b", "Unknown"}}});
  Matrix train(3, 2);
  train(0, 0) = 1.0; train(0, 1) = 0;
  train(1, 0) = kMissingSentinel; train(1, 1) = 1;
  train(2, 0) = 3.0; train(2, 1) = 2;
  const OneHotEncoder enc = OneHotEncoder::Fit(s, train);
  EXPECT_EQ(enc.width(), 4u);
  EXPECT_DOUBLE_EQ(enc.median(0), 2.0);

  // A far-out query row does not shift the fitted moments.
  const std::vector<double> query{1000.0, 1.0};
  const auto v = enc.encode(query);
  EXPECT_DOUBLE_EQ(v[0], (1000.0 - enc.mean(0)) / enc.scale(0));
  EXPECT_EQ(v[1], 0.0);
  EXPECT_EQ(v[2], 1.0);
  EXPECT_EQ(v[3], 0.0);

  const std::vector<double> missing{kMissingSentinel, 2.0};
  const auto m = enc.encode(missing);
  EXPECT_DOUBLE_EQ(m[0], (2.0 - enc.mean(0)) / enc.scale(0));
  EXPECT_EQ(m[3], 1.0);
}

TEST(Dataset, AssembleOneRowPerTestGroupedByPid) {
  const auto parcels = SmallParcels();
  const FeatureSchema s = BuildSchema(parcels);
  const auto tests = ParseTests("lead_ppb,address\n20,1 A St\n1,1 A St\n3,3 A St\n").tests;
  const auto m = MatchTestsToParcels(tests, parcels);
  const AssembleResult r = AssembleDataset(m.matches, tests, parcels, s);
  ASSERT_EQ(r.dataset.size(), 3u);
  EXPECT_EQ(r.dataset.groups[0], "1");
  EXPECT_EQ(r.dataset.groups[1], "1");
  EXPECT_EQ(r.dataset.labels[0], 1);
  EXPECT_EQ(r.dataset.positives(), 1u);
  EXPECT_EQ(r.dataset.distinct_groups(), 2u);
  EXPECT_NO_THROW(r.dataset.validate());
  const std::vector<std::size_t> pick{2};
  EXPECT_EQ(r.dataset.subset(pick).groups[0], "3");
}

TEST(Dataset, ValidateRejectsOutOfVocabularyCodes) {
  Dataset d;
  d.schema = FeatureSchema({FeatureDef{"c", ColumnKind::kCategorical, {"a", "Unknown"}}});
  d.rows = Matrix(1, 1, 7.0);
  d.labels = {0};
  d.groups = {"g"};
  EXPECT_THROW(d.validate(), Error);
}

}  // namespace
}  // namespace leadrisk
