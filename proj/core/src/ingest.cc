#include "leadrisk/ingest.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <unordered_map>

#include "leadrisk/error.h"
#include "leadrisk/parallel.h"

namespace leadrisk {
namespace {

using enum ColumnKind;

const std::array<ParcelColumn, 35> kParcelColumns = {{
    {"pid", "PID", kNumeric, TextField{&ParcelRecord::pid}},
    {"zip", "Property Zip Code", kCategorical, &ParcelRecord::zip},
    {"owner_type", "Owner Type", kCategorical, &ParcelRecord::owner_type},
    {"homestead", "Homestead", kCategorical, &ParcelRecord::homestead},
    {"homestead_percent", "Homestead Percent", kNumeric, &ParcelRecord::homestead_percent},
    {"home_sev", "HomeSEV", kNumeric, &ParcelRecord::home_sev},
    {"land_value", "Land Value", kNumeric, &ParcelRecord::land_value},
    {"land_improvements_value", "Land Improvements Value", kNumeric,
     &ParcelRecord::land_improvements_value},
    {"residential_building_value", "Residential Building Value", kNumeric,
     &ParcelRecord::residential_building_value},
    {"commercial_building_value", "Commercial Building Value", kNumeric,
     &ParcelRecord::commercial_building_value},
    {"building_storeys", "Building Storeys", kNumeric, &ParcelRecord::building_storeys},
    {"parcel_acres", "Parcel Acres", kNumeric, &ParcelRecord::parcel_acres},
    {"use_type", "Use Type", kCategorical, &ParcelRecord::use_type},
    {"prop_class", "Prop Class", kCategorical, &ParcelRecord::prop_class},
    {"old_prop_class", "Old Prop class", kCategorical, &ParcelRecord::old_prop_class},
    {"year_built", "Year Built", kNumeric, &ParcelRecord::year_built},
    {"usps_vacancy", "USPS Vacancy", kCategorical, &ParcelRecord::usps_vacancy},
    {"zoning", "Zoning", kCategorical, &ParcelRecord::zoning},
    {"future_landuse", "Future Landuse", kCategorical, &ParcelRecord::future_landuse},
    {"draft_zone", "DRAFT Zone", kCategorical, &ParcelRecord::draft_zone},
    {"housing_condition_2012", "Housing Condition 2012", kCategorical,
     &ParcelRecord::housing_condition_2012},
    {"housing_condition_2014", "Housing Condition 2014", kCategorical,
     &ParcelRecord::housing_condition_2014},
    {"commercial_condition_2013", "Commercial Condition 2013", kCategorical,
     &ParcelRecord::commercial_condition_2013},
    {"rental", "Rental", kCategorical, &ParcelRecord::rental},
    {"residential_building_style", "Residential Building Style", kCategorical,
     &ParcelRecord::residential_building_style},
    {"latitude", "Latitude", kNumeric, &ParcelRecord::latitude},
    {"longitude", "Longitude", kNumeric, &ParcelRecord::longitude},
    {"hydrant_type", "Hydrant Type", kCategorical, &ParcelRecord::hydrant_type},
    {"ward", "Ward", kCategorical, &ParcelRecord::ward},
    {"precinct", "PRECINCT", kCategorical, &ParcelRecord::precinct},
    {"centract", "CENTRACT", kNumeric, &ParcelRecord::centract},
    {"cenblock", "CENBLOCK", kCategorical, &ParcelRecord::cenblock},
    {"sl_type", "SL_Type", kCategorical, &ParcelRecord::sl_type},
    {"sl_type2", "SL_Type2", kCategorical, &ParcelRecord::sl_type2},
    {"sl_lead", "SL_Lead", kCategorical, &ParcelRecord::sl_lead},
}};

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// nullopt for blank or unparseable text; `bad` reports the latter.
std::optional<double> ParseNumber(std::string_view text, bool* bad) {
  *bad = false;
  text = Trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    *bad = true;
    return std::nullopt;
  }
  return value;
}

const std::string& Cell(const std::vector<std::string>& row, int column) {
  static const std::string kEmpty;
  if (column < 0 || static_cast<std::size_t>(column) >= row.size()) return kEmpty;
  return row[static_cast<std::size_t>(column)];
}

int FindPidColumn(const CsvTable& table) {
  return table.find_column({"pid", "parcel_id", "parcelid", "parcel id"});
}

void RequireUniquePids(const std::vector<std::string>& pids, std::string_view what) {
  std::unordered_map<std::string, int> seen;
  std::vector<std::string> dupes;
  for (const auto& p : pids) {
    if (++seen[p] == 2) dupes.push_back(p);
  }
  if (dupes.empty()) return;
  std::sort(dupes.begin(), dupes.end());
  std::string msg = std::string(what) + ": duplicate pid(s):";
  for (std::size_t i = 0; i < dupes.size() && i < 20; ++i) msg += " " + dupes[i];
  if (dupes.size() > 20) msg += " ... (" + std::to_string(dupes.size()) + " total)";
  Fail(ErrorKind::kParse, msg);
}

std::optional<std::string> NormalizeDate(std::string_view text) {
  text = Trim(text);
  int y = 0, m = 0, d = 0;
  auto parse_int = [](std::string_view s, int* out) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
    return ec == std::errc() && p == s.data() + s.size();
  };
  auto split3 = [](std::string_view s, char sep, std::array<std::string_view, 3>* parts) {
    const auto a = s.find(sep);
    if (a == std::string_view::npos) return false;
    const auto b = s.find(sep, a + 1);
    if (b == std::string_view::npos || s.find(sep, b + 1) != std::string_view::npos) return false;
    *parts = {s.substr(0, a), s.substr(a + 1, b - a - 1), s.substr(b + 1)};
    return true;
  };
  std::array<std::string_view, 3> parts;
  // Accept a trailing time component ("2016-01-05 00:00:00").
  text = text.substr(0, text.find(' '));
  if (split3(text, '-', &parts)) {
    if (!parse_int(parts[0], &y) || !parse_int(parts[1], &m) || !parse_int(parts[2], &d))
      return std::nullopt;
  } else if (split3(text, '/', &parts)) {
    if (!parse_int(parts[0], &m) || !parse_int(parts[1], &d) || !parse_int(parts[2], &y))
      return std::nullopt;
  } else {
    return std::nullopt;
  }
  static constexpr std::array<int, 12> kDays = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (y < 1900 || y > 2100 || m < 1 || m > 12 || d < 1 || d > kDays[m - 1]) return std::nullopt;
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (m == 2 && d == 29 && !leap) return std::nullopt;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return std::string(buf);
}

}  // namespace

std::span<const ParcelColumn> ParcelColumns() { return kParcelColumns; }

std::optional<double> PidNumeric(std::string_view pid) {
  std::string digits;
  for (char c : pid) {
    if (std::isdigit(static_cast<unsigned char>(c))) digits.push_back(c);
  }
  if (digits.empty()) return std::nullopt;
  // Keep within the exactly representable integer range.
  if (digits.size() > 15) digits.erase(0, digits.size() - 15);
  return std::stod(digits);
}

nlohmann::json ParseReport::to_json() const {
  nlohmann::json j;
  j["rows_read"] = rows_read;
  j["rows_rejected"] = rows_rejected;
  j["per_column_missing"] = per_column_missing;
  j["per_column_out_of_range"] = per_column_out_of_range;
  j["out_of_bounds"] = out_of_bounds;
  j["absent_columns"] = absent_columns;
  auto rejected_json = nlohmann::json::array();
  for (const auto& r : rejected) rejected_json.push_back({{"line", r.line}, {"reason", r.reason}});
  j["rejected"] = std::move(rejected_json);
  return j;
}

ParcelParseResult ParseParcels(const CsvTable& table, const BoundingBox& box) {
  ParcelParseResult result;
  if (table.header.empty() && table.rows.empty()) return result;
  const int pid_col = FindPidColumn(table);
  if (pid_col < 0) Fail(ErrorKind::kParse, "parcels: missing required column 'pid'");
  const int address_col = table.find_column({"address", "property_address", "propertyaddress"});

  std::array<int, kParcelColumns.size()> cols{};
  for (std::size_t c = 0; c < kParcelColumns.size(); ++c) {
    cols[c] = table.find_column({kParcelColumns[c].key, kParcelColumns[c].display_name});
    if (cols[c] < 0) result.report.absent_columns.emplace_back(kParcelColumns[c].key);
  }

  auto& report = result.report;
  report.rows_read = table.rows.size();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    ParcelRecord rec;
    rec.pid = std::string(Trim(Cell(row, pid_col)));
    if (rec.pid.empty()) {
      report.rejected.push_back({table.line_numbers[r], "missing pid"});
      continue;
    }
    rec.address = std::string(Trim(Cell(row, address_col)));
    for (std::size_t c = 1; c < kParcelColumns.size(); ++c) {
      if (cols[c] < 0) continue;
      const auto& col = kParcelColumns[c];
      const std::string_view text = Trim(Cell(row, cols[c]));
      if (const auto* text_field = std::get_if<TextField>(&col.field)) {
        rec.*(*text_field) = std::string(text);
        if (text.empty()) ++report.per_column_missing[std::string(col.key)];
        continue;
      }
      bool bad = false;
      std::optional<double> value = ParseNumber(text, &bad);
      const std::string key(col.key);
      if (value && key == "year_built" && (*value < 1800.0 || *value > 2100.0)) {
        value.reset();
        ++report.per_column_out_of_range[key];
      }
      if (value && key == "homestead_percent" && (*value < 0.0 || *value > 100.0)) {
        value.reset();
        ++report.per_column_out_of_range[key];
      }
      if (!value) ++report.per_column_missing[key];
      rec.*std::get<NumericField>(col.field) = value;
    }
    if (rec.has_coordinates() && !box.contains(*rec.latitude, *rec.longitude)) {
      rec.out_of_bounds = true;
      ++report.out_of_bounds;
    }
    result.parcels.push_back(std::move(rec));
  }
  report.rows_rejected = report.rejected.size();

  std::vector<std::string> pids;
  pids.reserve(result.parcels.size());
  for (const auto& p : result.parcels) pids.push_back(p.pid);
  RequireUniquePids(pids, "parcels");
  return result;
}

ParcelParseResult ParseParcels(std::string_view csv_text, const BoundingBox& box) {
  return ParseParcels(ParseCsv(csv_text), box);
}

TestParseResult ParseTests(const CsvTable& table) {
  TestParseResult result;
  if (table.header.empty() && table.rows.empty()) return result;
  const int date_col = table.find_column({"sample_date", "date", "date submitted", "date_submitted"});
  const int lead_col = table.find_column({"lead_ppb", "lead", "lead (ppb)", "lead_in_ppb"});
  const int copper_col = table.find_column({"copper_ppb", "copper", "copper (ppb)"});
  const int address_col = table.find_column({"address", "property_address"});
  const int pid_col = FindPidColumn(table);
  if (lead_col < 0) Fail(ErrorKind::kParse, "tests: missing required column 'lead_ppb'");
  if (address_col < 0 && pid_col < 0)
    Fail(ErrorKind::kParse, "tests: need an 'address' or 'pid' column");
  if (date_col < 0) result.report.absent_columns.emplace_back("sample_date");
  if (copper_col < 0) result.report.absent_columns.emplace_back("copper_ppb");

  auto& report = result.report;
  report.rows_read = table.rows.size();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    LeadTest test;
    bool bad = false;
    const auto lead = ParseNumber(Cell(row, lead_col), &bad);
    if (!lead) {
      report.rejected.push_back({line, bad ? "unparseable lead_ppb" : "missing lead_ppb"});
      continue;
    }
    if (*lead < 0.0) {
      report.rejected.push_back({line, "negative lead_ppb"});
      continue;
    }
    test.lead_ppb = *lead;
    if (copper_col >= 0) {
      test.copper_ppb = ParseNumber(Cell(row, copper_col), &bad);
      if (test.copper_ppb && *test.copper_ppb < 0.0) {
        report.rejected.push_back({line, "negative copper_ppb"});
        continue;
      }
      if (!test.copper_ppb) ++report.per_column_missing["copper_ppb"];
    }
    if (date_col >= 0) {
      const std::string_view raw = Trim(Cell(row, date_col));
      if (raw.empty()) {
        ++report.per_column_missing["sample_date"];
      } else if (auto iso = NormalizeDate(raw)) {
        test.sample_date = *iso;
      } else {
        report.rejected.push_back({line, "invalid sample_date"});
        continue;
      }
    }
    test.address = std::string(Trim(Cell(row, address_col)));
    if (address_col >= 0 && test.address.empty()) ++report.per_column_missing["address"];
    if (pid_col >= 0) {
      std::string pid(Trim(Cell(row, pid_col)));
      if (!pid.empty()) test.pid = std::move(pid);
    }
    result.tests.push_back(std::move(test));
  }
  report.rows_rejected = report.rejected.size();
  return result;
}

TestParseResult ParseTests(std::string_view csv_text) { return ParseTests(ParseCsv(csv_text)); }

std::string_view MaterialName(Material m) {
  switch (m) {
    case Material::kCopper: return "Copper";
    case Material::kLead: return "Lead";
    case Material::kGalvanized: return "Galvanized";
    case Material::kTubeloy: return "Tubeloy";
    case Material::kPlastic: return "Plastic";
    case Material::kOther: return "Other";
    case Material::kUnknown: return "Unknown";
  }
  return "Unknown";
}

namespace {

Material ParseMaterialToken(std::string_view token, int* unrecognized) {
  const std::string t = Lower(Trim(token));
  if (t.empty() || t == "?" || t == "unknown" || t == "unkown" || t == "unk") return Material::kUnknown;
  if (t == "copper" || t == "c" || t == "cu") return Material::kCopper;
  if (t == "lead" || t == "l" || t == "pb") return Material::kLead;
  if (t == "galvanized" || t == "galvanised" || t == "galv") return Material::kGalvanized;
  if (t == "tubeloy") return Material::kTubeloy;
  if (t == "plastic" || t == "pvc" || t == "pe" || t == "pex") return Material::kPlastic;
  if (t == "other") return Material::kOther;
  ++*unrecognized;
  return Material::kOther;
}

}  // namespace

SlSplit SplitSlLabel(std::string_view raw_label) {
  SlSplit split;
  const std::string_view label = Trim(raw_label);
  if (label.empty()) return split;
  const auto first = label.find('/');
  if (first == std::string_view::npos) {
    const Material m = ParseMaterialToken(label, &split.unrecognized_tokens);
    split.private_material = m;
    split.public_material = m;
    split.single_token = true;
    return split;
  }
  const auto last = label.rfind('/');
  split.private_material = ParseMaterialToken(label.substr(0, first), &split.unrecognized_tokens);
  split.public_material = ParseMaterialToken(label.substr(last + 1), &split.unrecognized_tokens);
  return split;
}

ServiceLineParseResult ParseServiceLines(const CsvTable& table) {
  ServiceLineParseResult result;
  if (table.header.empty() && table.rows.empty()) return result;
  const int pid_col = FindPidColumn(table);
  if (pid_col < 0) Fail(ErrorKind::kParse, "service lines: missing required column 'pid'");
  const int label_col = table.find_column({"sl_type", "raw_label", "sl_record", "sl record", "label"});
  if (label_col < 0) Fail(ErrorKind::kParse, "service lines: missing column 'sl_type'");
  const int label2_col = table.find_column({"sl_type2", "raw_label2"});
  const int lead_col = table.find_column({"sl_lead"});

  auto& report = result.report;
  report.rows_read = table.rows.size();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    ServiceLineRecord rec;
    rec.pid = std::string(Trim(Cell(row, pid_col)));
    if (rec.pid.empty()) {
      report.rejected.push_back({table.line_numbers[r], "missing pid"});
      continue;
    }
    rec.raw_label = std::string(Trim(Cell(row, label_col)));
    rec.raw_label2 = std::string(Trim(Cell(row, label2_col)));
    rec.sl_lead = std::string(Trim(Cell(row, lead_col)));
    if (rec.raw_label.empty()) ++report.per_column_missing["sl_type"];
    const SlSplit split = SplitSlLabel(rec.raw_label);
    rec.private_material = split.private_material;
    rec.public_material = split.public_material;
    rec.single_token = split.single_token;
    result.unrecognized_tokens += static_cast<std::size_t>(split.unrecognized_tokens);
    result.records.push_back(std::move(rec));
  }
  report.rows_rejected = report.rejected.size();
  std::vector<std::string> pids;
  for (const auto& r : result.records) pids.push_back(r.pid);
  RequireUniquePids(pids, "service lines");
  return result;
}

void AttachServiceLines(std::vector<ParcelRecord>& parcels,
                        std::span<const ServiceLineRecord> records) {
  std::unordered_map<std::string_view, const ServiceLineRecord*> by_pid;
  for (const auto& r : records) by_pid.emplace(r.pid, &r);
  for (auto& p : parcels) {
    const auto it = by_pid.find(p.pid);
    if (it == by_pid.end()) continue;
    const ServiceLineRecord& r = *it->second;
    p.sl_type = r.raw_label;
    p.sl_type2 = r.raw_label2;
    p.sl_single_token = r.single_token;
    if (!r.sl_lead.empty()) {
      p.sl_lead = r.sl_lead;
    } else if (r.private_material == Material::kLead || r.public_material == Material::kLead) {
      p.sl_lead = "Lead";
    } else if (r.private_material == Material::kUnknown && r.public_material == Material::kUnknown) {
      p.sl_lead = "Unknown";
    } else {
      p.sl_lead = "No Lead";
    }
  }
}

std::string_view InspectedMaterialName(InspectedMaterial m) {
  switch (m) {
    case InspectedMaterial::kCopper: return "Copper";
    case InspectedMaterial::kGalvanized: return "Galvanized";
    case InspectedMaterial::kLead: return "Lead";
  }
  return "Copper";
}

InspectionParseResult ParseInspections(const CsvTable& table) {
  InspectionParseResult result;
  if (table.header.empty() && table.rows.empty()) return result;
  const int pid_col = FindPidColumn(table);
  if (pid_col < 0) Fail(ErrorKind::kParse, "inspections: missing required column 'pid'");
  const int mat_col = table.find_column(
      {"private_material_inspected", "inspected", "material", "private_material"});
  if (mat_col < 0) Fail(ErrorKind::kParse, "inspections: missing column 'private_material_inspected'");
  auto& report = result.report;
  report.rows_read = table.rows.size();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    InspectionRecord rec;
    rec.pid = std::string(Trim(Cell(row, pid_col)));
    const std::string mat = Lower(Trim(Cell(row, mat_col)));
    if (rec.pid.empty()) {
      report.rejected.push_back({table.line_numbers[r], "missing pid"});
      continue;
    }
    if (mat == "copper") {
      rec.private_material_inspected = InspectedMaterial::kCopper;
    } else if (mat == "galvanized" || mat == "galvanised") {
      rec.private_material_inspected = InspectedMaterial::kGalvanized;
    } else if (mat == "lead") {
      rec.private_material_inspected = InspectedMaterial::kLead;
    } else {
      report.rejected.push_back({table.line_numbers[r], "unrecognized inspected material"});
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  report.rows_rejected = report.rejected.size();
  std::vector<std::string> pids;
  for (const auto& r : result.records) pids.push_back(r.pid);
  RequireUniquePids(pids, "inspections");
  return result;
}

HydrantParseResult ParseHydrants(const CsvTable& table) {
  HydrantParseResult result;
  if (table.header.empty() && table.rows.empty()) return result;
  const int id_col = table.find_column({"hydrant_id", "id", "hydrant"});
  const int type_col = table.find_column({"hydrant_type", "type"});
  const int lat_col = table.find_column({"latitude", "lat"});
  const int lon_col = table.find_column({"longitude", "lon", "lng"});
  if (id_col < 0 || type_col < 0 || lat_col < 0 || lon_col < 0)
    Fail(ErrorKind::kParse, "hydrants: need hydrant_id, hydrant_type, latitude, longitude columns");
  auto& report = result.report;
  report.rows_read = table.rows.size();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    HydrantRecord h;
    h.hydrant_id = std::string(Trim(Cell(row, id_col)));
    h.hydrant_type = std::string(Trim(Cell(row, type_col)));
    bool bad = false;
    const auto lat = ParseNumber(Cell(row, lat_col), &bad);
    const auto lon = ParseNumber(Cell(row, lon_col), &bad);
    if (h.hydrant_id.empty()) {
      report.rejected.push_back({table.line_numbers[r], "missing hydrant_id"});
      continue;
    }
    if (!lat || !lon) {
      report.rejected.push_back({table.line_numbers[r], "missing coordinates"});
      continue;
    }
    if (h.hydrant_type.empty()) ++report.per_column_missing["hydrant_type"];
    h.latitude = *lat;
    h.longitude = *lon;
    result.hydrants.push_back(std::move(h));
  }
  report.rows_rejected = report.rejected.size();
  return result;
}

double HaversineMeters(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kEarthRadius = 6371008.8;
  constexpr double kRad = std::numbers::pi / 180.0;
  const double dlat = (lat2 - lat1) * kRad;
  const double dlon = (lon2 - lon1) * kRad;
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  const double a = s1 * s1 + std::cos(lat1 * kRad) * std::cos(lat2 * kRad) * s2 * s2;
  return 2.0 * kEarthRadius * std::asin(std::min(1.0, std::sqrt(a)));
}

std::string NearestHydrant(std::optional<double> latitude, std::optional<double> longitude,
                           std::span<const HydrantRecord> hydrants) {
  Require(!hydrants.empty(), "nearest_hydrant: hydrant list is empty");
  if (!latitude || !longitude) return "Unknown";
  const HydrantRecord* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& h : hydrants) {
    const double d = HaversineMeters(*latitude, *longitude, h.latitude, h.longitude);
    if (d < best_dist || (d == best_dist && best && h.hydrant_id < best->hydrant_id)) {
      best = &h;
      best_dist = d;
    }
  }
  return best->hydrant_type;
}

void AssignHydrants(std::vector<ParcelRecord>& parcels, std::span<const HydrantRecord> hydrants,
                    int threads) {
  Require(!hydrants.empty(), "nearest_hydrant: hydrant list is empty");
  ParallelFor(parcels.size(), threads, [&](std::size_t i) {
    parcels[i].hydrant_type = NearestHydrant(parcels[i].latitude, parcels[i].longitude, hydrants);
  });
}

MatchResult MatchTestsToParcels(std::span<const LeadTest> tests,
                                std::span<const ParcelRecord> parcels) {
  constexpr std::size_t kAmbiguous = std::numeric_limits<std::size_t>::max();
  std::unordered_map<std::string, std::size_t> by_address;
  std::unordered_map<std::string_view, std::size_t> by_pid;
  for (std::size_t i = 0; i < parcels.size(); ++i) {
    by_pid.emplace(parcels[i].pid, i);
    if (parcels[i].address.empty()) continue;
    auto [it, inserted] = by_address.emplace(NormalizeAddress(parcels[i].address), i);
    if (!inserted) it->second = kAmbiguous;
  }
  MatchResult result;
  for (std::size_t t = 0; t < tests.size(); ++t) {
    const LeadTest& test = tests[t];
    if (test.pid) {
      if (auto it = by_pid.find(*test.pid); it != by_pid.end()) {
        result.matches.push_back({t, it->second});
        continue;
      }
    }
    const std::string key = NormalizeAddress(test.address);
    const auto it = key.empty() ? by_address.end() : by_address.find(key);
    if (it == by_address.end()) {
      ++result.discarded;
    } else if (it->second == kAmbiguous) {
      ++result.ambiguous;
    } else {
      result.matches.push_back({t, it->second});
    }
  }
  return result;
}

std::size_t ConfusionTable::at(std::string_view row, std::string_view col) const {
  const auto r = std::find(row_labels.begin(), row_labels.end(), row);
  const auto c = std::find(col_labels.begin(), col_labels.end(), col);
  if (r == row_labels.end() || c == col_labels.end()) return 0;
  return counts[static_cast<std::size_t>(r - row_labels.begin())]
               [static_cast<std::size_t>(c - col_labels.begin())];
}

std::size_t ConfusionTable::total() const {
  std::size_t sum = 0;
  for (const auto& row : counts)
    for (std::size_t v : row) sum += v;
  return sum;
}

ConfusionTable SlConfusionMatrix(std::span<const ServiceLineRecord> records,
                                 std::span<const InspectionRecord> inspections) {
  std::vector<std::string> record_pids;
  for (const auto& r : records) record_pids.push_back(r.pid);
  RequireUniquePids(record_pids, "service lines");
  std::unordered_map<std::string_view, InspectedMaterial> inspected;
  for (const auto& i : inspections) {
    if (!inspected.emplace(i.pid, i.private_material_inspected).second)
      Fail(ErrorKind::kData, "inspections: duplicate pid " + i.pid);
  }

  ConfusionTable table;
  std::set<std::string> labels;
  for (const auto& r : records) labels.insert(r.raw_label);
  table.row_labels.assign(labels.begin(), labels.end());
  for (auto m : {InspectedMaterial::kCopper, InspectedMaterial::kGalvanized, InspectedMaterial::kLead})
    table.col_labels.emplace_back(InspectedMaterialName(m));
  table.counts.assign(table.row_labels.size(), std::vector<std::size_t>(3, 0));
  for (const auto& r : records) {
    const auto it = inspected.find(r.pid);
    if (it == inspected.end()) continue;
    const auto row = static_cast<std::size_t>(
        std::lower_bound(table.row_labels.begin(), table.row_labels.end(), r.raw_label) -
        table.row_labels.begin());
    ++table.counts[row][static_cast<std::size_t>(it->second)];
  }
  return table;
}

std::vector<std::pair<std::string, std::size_t>> SlLabelCounts(
    std::span<const ParcelRecord> parcels) {
  std::map<std::string, std::size_t> counts;
  for (const auto& p : parcels) ++counts[p.sl_type];
  std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

}  // namespace leadrisk
