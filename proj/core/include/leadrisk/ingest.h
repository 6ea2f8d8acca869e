#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "leadrisk/csv.h"
#include "json.hpp"

namespace leadrisk {

// One land parcel: the 35 raw attributes used as model features plus the
// street address used to link water tests.
struct ParcelRecord {
  std::string pid;
  std::string address;

  std::string zip;
  std::string owner_type;
  std::string homestead;
  std::optional<double> homestead_percent;
  std::optional<double> home_sev;
  std::optional<double> land_value;
  std::optional<double> land_improvements_value;
  std::optional<double> residential_building_value;
  std::optional<double> commercial_building_value;
  std::optional<double> building_storeys;
  std::optional<double> parcel_acres;
  std::string use_type;
  std::string prop_class;
  std::string old_prop_class;
  std::optional<double> year_built;
  std::string usps_vacancy;
  std::string zoning;
  std::string future_landuse;
  std::string draft_zone;
  std::string housing_condition_2012;
  std::string housing_condition_2014;
  std::string commercial_condition_2013;
  std::string rental;
  std::string residential_building_style;
  std::optional<double> latitude;
  std::optional<double> longitude;
  std::string hydrant_type;
  std::string ward;
  std::string precinct;
  std::optional<double> centract;
  std::string cenblock;
  std::string sl_type;
  std::string sl_type2;
  std::string sl_lead;

  // Set when coordinates fall outside the configured bounding box.
  bool out_of_bounds = false;
  // Set when sl_type was a single material token applied to both segments.
  bool sl_single_token = false;

  bool has_coordinates() const { return latitude && longitude; }
};

enum class ColumnKind { kNumeric, kCategorical };

using NumericField = std::optional<double> ParcelRecord::*;
using TextField = std::string ParcelRecord::*;

// Static description of one of the 35 parcel feature columns.
struct ParcelColumn {
  std::string_view key;            // snake_case feature name
  std::string_view display_name;   // dataset column title
  ColumnKind kind;
  std::variant<NumericField, TextField> field;
};

// The 35 feature columns, in dataset order. PID is numeric (digits of the id).
std::span<const ParcelColumn> ParcelColumns();

// Numeric value of a PID after stripping non-digits; nullopt when no digits.
std::optional<double> PidNumeric(std::string_view pid);

struct BoundingBox {
  double min_latitude = 42.95;
  double max_latitude = 43.10;
  double min_longitude = -83.80;
  double max_longitude = -83.55;

  bool contains(double latitude, double longitude) const {
    return latitude >= min_latitude && latitude <= max_latitude &&
           longitude >= min_longitude && longitude <= max_longitude;
  }
};

struct RejectedRow {
  std::size_t line = 0;
  std::string reason;
};

struct ParseReport {
  std::size_t rows_read = 0;
  std::size_t rows_rejected = 0;
  std::map<std::string, std::size_t> per_column_missing;
  std::vector<RejectedRow> rejected;
  // Values that parsed but broke a range rule and were turned into missing.
  std::map<std::string, std::size_t> per_column_out_of_range;
  std::size_t out_of_bounds = 0;
  // Known columns that the header does not carry at all.
  std::vector<std::string> absent_columns;

  nlohmann::json to_json() const;
};

struct ParcelParseResult {
  std::vector<ParcelRecord> parcels;
  ParseReport report;
};

ParcelParseResult ParseParcels(const CsvTable& table, const BoundingBox& box = {});
ParcelParseResult ParseParcels(std::string_view csv_text, const BoundingBox& box = {});

struct LeadTest {
  std::string sample_date;  // ISO yyyy-mm-dd
  double lead_ppb = 0.0;
  std::optional<double> copper_ppb;
  std::string address;
  std::optional<std::string> pid;
};

struct TestParseResult {
  std::vector<LeadTest> tests;
  ParseReport report;
};

TestParseResult ParseTests(const CsvTable& table);
TestParseResult ParseTests(std::string_view csv_text);

// Service line materials as they appear in city records.
enum class Material { kCopper, kLead, kGalvanized, kTubeloy, kPlastic, kOther, kUnknown };

std::string_view MaterialName(Material m);

struct SlSplit {
  Material private_material = Material::kUnknown;
  Material public_material = Material::kUnknown;
  // A lone token ("Copper") was applied to both segments.
  bool single_token = false;
  // Number of tokens that were not recognized and became Other.
  int unrecognized_tokens = 0;
};

// "X/Y" -> private X, public Y. A single token fills both segments; blank and
// "?" become Unknown; unrecognized tokens become Other.
SlSplit SplitSlLabel(std::string_view raw_label);

struct ServiceLineRecord {
  std::string pid;
  std::string raw_label;
  std::string raw_label2;
  std::string sl_lead;
  Material private_material = Material::kUnknown;
  Material public_material = Material::kUnknown;
  bool single_token = false;
};

struct ServiceLineParseResult {
  std::vector<ServiceLineRecord> records;
  ParseReport report;
  std::size_t unrecognized_tokens = 0;
};

ServiceLineParseResult ParseServiceLines(const CsvTable& table);

// Copies service-line labels onto parcels by pid. When a record has no explicit
// sl_lead value it is derived: "Lead" when either segment is lead, "Unknown"
// when both are unknown, "No Lead" otherwise.
void AttachServiceLines(std::vector<ParcelRecord>& parcels,
                        std::span<const ServiceLineRecord> records);

enum class InspectedMaterial { kCopper, kGalvanized, kLead };
std::string_view InspectedMaterialName(InspectedMaterial m);

struct InspectionRecord {
  std::string pid;
  InspectedMaterial private_material_inspected = InspectedMaterial::kCopper;
};

struct InspectionParseResult {
  std::vector<InspectionRecord> records;
  ParseReport report;
};

// Throws Error(kParse) when a pid appears twice.
InspectionParseResult ParseInspections(const CsvTable& table);

struct HydrantRecord {
  std::string hydrant_id;
  std::string hydrant_type;
  double latitude = 0.0;
  double longitude = 0.0;
};

struct HydrantParseResult {
  std::vector<HydrantRecord> hydrants;
  ParseReport report;
};

HydrantParseResult ParseHydrants(const CsvTable& table);

// Great-circle distance in metres.
double HaversineMeters(double lat1, double lon1, double lat2, double lon2);

// Type of the closest hydrant; exact distance ties go to the smallest id.
// "Unknown" when the parcel has no coordinates. Throws on an empty list.
std::string NearestHydrant(std::optional<double> latitude, std::optional<double> longitude,
                           std::span<const HydrantRecord> hydrants);

// Fills hydrant_type on every parcel.
void AssignHydrants(std::vector<ParcelRecord>& parcels, std::span<const HydrantRecord> hydrants,
                    int threads = 1);

// Address canonical form: uppercase, punctuation removed, whitespace collapsed,
// street suffixes and directions abbreviated.
std::string NormalizeAddress(std::string_view address);

struct TestMatch {
  std::size_t test_index = 0;
  std::size_t parcel_index = 0;
};

struct MatchResult {
  std::vector<TestMatch> matches;
  std::size_t discarded = 0;  // no parcel with this address / pid
  std::size_t ambiguous = 0;  // address shared by more than one parcel
};

// Tests carrying a known pid match by pid; otherwise by normalized address.
MatchResult MatchTestsToParcels(std::span<const LeadTest> tests,
                                std::span<const ParcelRecord> parcels);

struct ConfusionTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t at(std::string_view row, std::string_view col) const;
  std::size_t total() const;
};

// Record label (rows, sorted) versus inspected private material (columns
// Copper, Galvanized, Lead) over pids present in both inputs.
ConfusionTable SlConfusionMatrix(std::span<const ServiceLineRecord> records,
                                 std::span<const InspectionRecord> inspections);

// Parcel count per raw service-line label, sorted by count descending.
std::vector<std::pair<std::string, std::size_t>> SlLabelCounts(
    std::span<const ParcelRecord> parcels);

}  // namespace leadrisk
