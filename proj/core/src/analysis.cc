#include "leadrisk/analysis.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "json.hpp"
#include "leadrisk/csv.h"
#include "leadrisk/error.h"
#include "leadrisk/features.h"
#include "leadrisk/metrics.h"
#include "leadrisk/parallel.h"
#include "leadrisk/rng.h"

namespace leadrisk {
namespace {

constexpr std::uint64_t kGroupStream = 0x67726f7570ULL;

GroupSummary Summarize(std::string key, const std::vector<double>& values, int replicates,
                       std::uint64_t seed, std::uint64_t stream) {
  GroupSummary s;
  s.key = std::move(key);
  s.n = values.size();
  s.mean_log_lead = Mean(values);
  if (values.size() < 2 || replicates < 1) {
    s.ci_low = s.ci_high = s.mean_log_lead;
    return s;
  }
  Rng rng = MakeRng(seed, kGroupStream, stream);
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  std::vector<double> means(static_cast<std::size_t>(replicates));
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += values[pick(rng)];
    m = sum / static_cast<double>(values.size());
  }
  s.ci_low = std::min(Percentile(means, 2.5), s.mean_log_lead);
  s.ci_high = std::max(Percentile(means, 97.5), s.mean_log_lead);
  return s;
}

std::vector<GroupSummary> SummarizeAll(const std::vector<std::pair<std::string, std::vector<double>>>& groups,
                                       int replicates, std::uint64_t seed) {
  std::vector<GroupSummary> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].second.empty()) continue;
    out.push_back(Summarize(groups[i].first, groups[i].second, replicates, seed, Fnv1a64(groups[i].first)));
  }
  return out;
}

}  // namespace

std::string GroupSummaryCsv(std::span<const GroupSummary> groups) {
  std::ostringstream os;
  os << "group,n,mean_log_lead,ci_low,ci_high\n";
  for (const auto& g : groups)
    WriteCsvRow(os, {g.key, std::to_string(g.n), FormatDouble(g.mean_log_lead),
                     FormatDouble(g.ci_low), FormatDouble(g.ci_high)});
  return os.str();
}

std::vector<GroupSummary> MeanLogLeadBySlType(std::span<const LeadTest> tests,
                                              std::span<const TestMatch> matches,
                                              std::span<const ParcelRecord> parcels,
                                              int replicates, std::uint64_t seed) {
  std::map<std::string, std::vector<double>> by_label;
  for (const auto& m : matches) {
    const auto& label = parcels[m.parcel_index].sl_type;
    by_label[label.empty() ? std::string(kUnknownCategory) : label].push_back(
        Log1pLead(tests[m.test_index].lead_ppb));
  }
  return SummarizeAll({by_label.begin(), by_label.end()}, replicates, seed);
}

std::string DecadeKey(double year_built, const DecadeRange& range) {
  if (!std::isfinite(year_built) || year_built < range.first || year_built >= range.last + 1)
    return "Other";
  return std::to_string(static_cast<int>(std::floor(year_built / 10.0)) * 10);
}

std::vector<GroupSummary> MeanLogLeadByDecade(std::span<const LeadTest> tests,
                                              std::span<const TestMatch> matches,
                                              std::span<const ParcelRecord> parcels,
                                              const DecadeRange& range, int replicates,
                                              std::uint64_t seed) {
  Require(range.first <= range.last, "decade range: first year after last year");
  std::map<int, std::vector<double>> decades;
  std::vector<double> other;
  for (const auto& m : matches) {
    const auto& year = parcels[m.parcel_index].year_built;
    if (!year) continue;
    const double v = Log1pLead(tests[m.test_index].lead_ppb);
    const std::string key = DecadeKey(*year, range);
    if (key == "Other")
      other.push_back(v);
    else
      decades[std::stoi(key)].push_back(v);
  }
  std::vector<std::pair<std::string, std::vector<double>>> groups;
  for (auto& [d, values] : decades) groups.emplace_back(std::to_string(d), std::move(values));
  groups.emplace_back("Other", std::move(other));
  return SummarizeAll(groups, replicates, seed);
}

std::vector<SlYearPoint> SlTypeYearPoints(std::span<const ParcelRecord> parcels) {
  std::vector<SlYearPoint> out;
  for (const auto& p : parcels) {
    if (!p.year_built || p.sl_type.empty()) continue;
    out.push_back({p.pid, static_cast<int>(*p.year_built), p.sl_type});
  }
  return out;
}

std::string SlTypeYearCsv(std::span<const SlYearPoint> points) {
  std::ostringstream os;
  os << "pid,year_built,sl_type\n";
  for (const auto& p : points) WriteCsvRow(os, {p.pid, std::to_string(p.year_built), p.sl_type});
  return os.str();
}

std::string RiskMap::to_csv() const {
  std::ostringstream os;
  os << "pid,latitude,longitude,probability\n";
  for (const auto& e : entries)
    WriteCsvRow(os, {e.pid, e.latitude ? FormatDouble(*e.latitude) : "",
                     e.longitude ? FormatDouble(*e.longitude) : "", FormatDouble(e.probability)});
  return os.str();
}

std::size_t RiskMap::feature_count() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [&](const auto& e) {
    return e.latitude && e.longitude && e.probability > threshold;
  }));
}

std::string RiskMap::to_geojson() const {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& e : entries) {
    if (!(e.latitude && e.longitude) || !(e.probability > threshold)) continue;
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", {*e.longitude, *e.latitude}}}},
                        {"properties", {{"pid", e.pid}, {"probability", e.probability}}}});
  }
  nlohmann::json doc = {{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump(1) + "\n";
}

RiskMap BuildRiskMap(const StackedModel& model, std::span<const ParcelRecord> parcels,
                     double threshold, int threads) {
  Require(std::isfinite(threshold), "risk_map: threshold must be finite");
  RiskMap map;
  map.threshold = threshold;
  map.entries.resize(parcels.size());
  ParallelFor(parcels.size(), threads, [&](std::size_t i) {
    const auto& p = parcels[i];
    const auto row = EncodeOrdinal(ParcelRawRow(p), model.schema);
    map.entries[i] = {p.pid, p.latitude, p.longitude, model.predict(row)};
  });
  for (const auto& e : map.entries)
    if (!(e.latitude && e.longitude)) ++map.without_coordinates;
  return map;
}

std::string TestHeatmapCsv(std::span<const LeadTest> tests, std::span<const TestMatch> matches,
                           std::span<const ParcelRecord> parcels) {
  std::ostringstream os;
  os << "latitude,longitude,lead_ppb\n";
  for (const auto& m : matches) {
    const auto& p = parcels[m.parcel_index];
    if (!p.has_coordinates()) continue;
    WriteCsvRow(os, {FormatDouble(*p.latitude), FormatDouble(*p.longitude),
                     FormatDouble(tests[m.test_index].lead_ppb)});
  }
  return os.str();
}

}  // namespace leadrisk
