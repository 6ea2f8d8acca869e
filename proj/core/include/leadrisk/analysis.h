#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leadrisk/ingest.h"
#include "leadrisk/pipeline.h"

namespace leadrisk {

struct GroupSummary {
  std::string key;
  std::size_t n = 0;
  double mean_log_lead = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

std::string GroupSummaryCsv(std::span<const GroupSummary> groups);

// Mean ln(1 + lead) per raw service-line label of the matched parcel, with a
// 95% bootstrap interval over tests. Blank labels are grouped as Unknown.
std::vector<GroupSummary> MeanLogLeadBySlType(std::span<const LeadTest> tests,
                                              std::span<const TestMatch> matches,
                                              std::span<const ParcelRecord> parcels,
                                              int replicates, std::uint64_t seed);

struct DecadeRange {
  int first = 1920;
  int last = 1979;
};

// Decade key floor(year / 10) * 10 inside the range, "Other" outside it.
std::string DecadeKey(double year_built, const DecadeRange& range = {});

// Same statistic keyed by construction decade; tests on parcels without a
// year are not counted.
std::vector<GroupSummary> MeanLogLeadByDecade(std::span<const LeadTest> tests,
                                              std::span<const TestMatch> matches,
                                              std::span<const ParcelRecord> parcels,
                                              const DecadeRange& range, int replicates,
                                              std::uint64_t seed);

struct SlYearPoint {
  std::string pid;
  int year_built = 0;
  std::string sl_type;
};

std::vector<SlYearPoint> SlTypeYearPoints(std::span<const ParcelRecord> parcels);
std::string SlTypeYearCsv(std::span<const SlYearPoint> points);

struct RiskEntry {
  std::string pid;
  std::optional<double> latitude;
  std::optional<double> longitude;
  double probability = 0.0;
};

struct RiskMap {
  std::vector<RiskEntry> entries;  // every parcel, input order
  double threshold = 0.1;
  std::size_t without_coordinates = 0;

  // pid,latitude,longitude,probability (all parcels)
  std::string to_csv() const;
  // RFC 7946 FeatureCollection of points with probability > threshold.
  std::string to_geojson() const;
  std::size_t feature_count() const;
};

RiskMap BuildRiskMap(const StackedModel& model, std::span<const ParcelRecord> parcels,
                     double threshold = 0.1, int threads = 1);

// latitude,longitude,lead_ppb for every matched test whose parcel has coordinates.
std::string TestHeatmapCsv(std::span<const LeadTest> tests, std::span<const TestMatch> matches,
                           std::span<const ParcelRecord> parcels);

}  // namespace leadrisk
