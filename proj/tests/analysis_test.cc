#include <gtest/gtest.h>

#include <cmath>

#include "json.hpp"
#include "leadrisk/analysis.h"
#include "leadrisk/ingest.h"

namespace leadrisk {
namespace {

struct Fixture {
  std::vector<ParcelRecord> parcels;
  std::vector<LeadTest> tests;
  MatchResult match;
};

Fixture Make() {
  Fixture f;
  f.parcels = ParseParcels(
                  "pid,Address,Year Built,SL_Type,Latitude,Longitude\n"
                  "1,1 A St,1925,Lead,43.0,-83.7\n"
                  "2,2 A St,1958,Copper,43.01,-83.71\n"
                  "3,3 A St,,,,\n"
                  "4,4 A St,1999,Copper,43.02,-83.72\n")
                  .parcels;
  f.tests = ParseTests(
                "lead_ppb,address\n"
                "20,1 A St\n"
                "0,2 A St\n"
                "4,2 A St\n"
                "9,3 A St\n"
                "1,4 A St\n")
                .tests;
  f.match = MatchTestsToParcels(f.tests, f.parcels);
  return f;
}

TEST(Decades, KeysAndOther) {
  EXPECT_EQ(DecadeKey(1925), "1920");
  EXPECT_EQ(DecadeKey(1979), "1970");
  EXPECT_EQ(DecadeKey(1980), "Other");
  EXPECT_EQ(DecadeKey(1910), "Other");
}

TEST(GroupSummaries, MeanLogLeadBySlType) {
  const Fixture f = Make();
  const auto g = MeanLogLeadBySlType(f.tests, f.match.matches, f.parcels, 50, 1);
  std::map<std::string, GroupSummary> by;
  for (const auto& s : g) by[s.key] = s;
  ASSERT_TRUE(by.contains("Lead"));
  ASSERT_TRUE(by.contains("Copper"));
  ASSERT_TRUE(by.contains("Unknown"));
  EXPECT_EQ(by["Copper"].n, 3u);
  EXPECT_NEAR(by["Copper"].mean_log_lead, (0.0 + std::log(5.0) + std::log(2.0)) / 3.0, 1e-12);
  EXPECT_NEAR(by["Lead"].mean_log_lead, std::log(21.0), 1e-12);
  for (const auto& s : g) {
    EXPECT_LE(s.ci_low, s.mean_log_lead);
    EXPECT_GE(s.ci_high, s.mean_log_lead);
  }
  EXPECT_EQ(GroupSummaryCsv(g).substr(0, 35), "group,n,mean_log_lead,ci_low,ci_hig");
}

TEST(GroupSummaries, DecadeSkipsParcelsWithoutYear) {
  const Fixture f = Make();
  const auto g = MeanLogLeadByDecade(f.tests, f.match.matches, f.parcels, {}, 20, 1);
  std::size_t n = 0;
  for (const auto& s : g) n += s.n;
  EXPECT_EQ(n, 4u);
  EXPECT_EQ(g.back().key, "Other");
}

TEST(SlYear, OnlyParcelsWithYear) {
  const Fixture f = Make();
  const auto pts = SlTypeYearPoints(f.parcels);
  EXPECT_EQ(pts.size(), 3u);
  EXPECT_EQ(SlTypeYearCsv(pts).substr(0, 21), "pid,year_built,sl_typ");
}

TEST(RiskMapExport, GeoJsonHasPointsAboveThreshold) {
  RiskMap m;
  m.threshold = 0.1;
  m.entries = {{"1", 43.0, -83.7, 0.5}, {"2", 43.1, -83.6, 0.05}, {"3", std::nullopt, std::nullopt, 0.9}};
  m.without_coordinates = 1;
  EXPECT_EQ(m.feature_count(), 1u);
  const auto j = nlohmann::json::parse(m.to_geojson());
  EXPECT_EQ(j["type"], "FeatureCollection");
  ASSERT_EQ(j["features"].size(), 1u);
  const auto& feat = j["features"][0];
  EXPECT_EQ(feat["geometry"]["type"], "Point");
  EXPECT_EQ(feat["geometry"]["coordinates"][0].get<double>(), -83.7);
  EXPECT_EQ(feat["geometry"]["coordinates"][1].get<double>(), 43.0);
  EXPECT_EQ(feat["properties"]["pid"], "1");
  const std::string csv = m.to_csv();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Heatmap, MatchedTestsWithCoordinates) {
  const Fixture f = Make();
  const std::string csv = TestHeatmapCsv(f.tests, f.match.matches, f.parcels);
  EXPECT_EQ(csv.substr(0, 25), "latitude,longitude,lead_p");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

}  // namespace
}  // namespace leadrisk
