#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "leadrisk/ingest.h"
#include "leadrisk/matrix.h"

namespace leadrisk {

inline constexpr double kActionLevelPpb = 15.0;
inline constexpr std::string_view kUnknownCategory = "Unknown";
// Stored in ordinal rows for a missing numeric value. Trees treat it as an
// ordinary (smallest) value; gradient boosting routes it explicitly.
inline constexpr double kMissingSentinel = std::numeric_limits<double>::lowest();

inline bool IsMissing(double v) { return v == kMissingSentinel; }

// 1 iff lead_ppb > 15 (strict). Throws on negative input.
int BinarizeLabel(double lead_ppb);
// ln(1 + lead_ppb). Throws on negative input.
double Log1pLead(double lead_ppb);

struct FeatureDef {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  // Sorted data values followed by the reserved Unknown entry (categorical only).
  std::vector<std::string> vocabulary;

  int unknown_code() const { return static_cast<int>(vocabulary.size()) - 1; }
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  // Validates name and vocabulary uniqueness and that every categorical
  // vocabulary ends with the Unknown entry.
  explicit FeatureSchema(std::vector<FeatureDef> features);

  std::span<const FeatureDef> features() const { return features_; }
  const FeatureDef& feature(std::size_t i) const { return features_.at(i); }
  std::size_t size() const { return features_.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  // Vocabulary index of `value`; blank or unseen values map to the Unknown code.
  int category_code(std::size_t feature, std::string_view value) const;

  FeatureSchema without(std::size_t feature) const;

  nlohmann::json to_json() const;
  static FeatureSchema FromJson(const nlohmann::json& j);
  // FNV-1a over the canonical JSON text.
  std::uint64_t hash() const;

  friend bool operator==(const FeatureSchema& a, const FeatureSchema& b);

 private:
  std::vector<FeatureDef> features_;
};

// Schema over the 35 parcel feature columns, vocabularies collected from the
// records and sorted lexicographically.
FeatureSchema BuildSchema(std::span<const ParcelRecord> parcels);

using RawCell = std::variant<std::optional<double>, std::string>;
using RawRow = std::vector<RawCell>;

// Raw values of the 35 parcel feature columns, in ParcelColumns() order.
RawRow ParcelRawRow(const ParcelRecord& parcel);

// One column per feature: category codes, numeric values, kMissingSentinel for
// missing numerics.
std::vector<double> EncodeOrdinal(const RawRow& sample, const FeatureSchema& schema);

// Labeled rows in ordinal encoding with parcel group keys.
struct Dataset {
  FeatureSchema schema;
  Matrix rows;
  std::vector<int> labels;
  std::vector<std::string> groups;
  std::vector<double> lead_ppb;  // empty when not tracked

  std::size_t size() const { return labels.size(); }
  std::size_t positives() const;
  // Throws Error(kData) when lengths disagree or a cell is out of vocabulary.
  void validate() const;
  Dataset subset(std::span<const std::size_t> indices) const;
  Dataset without_feature(std::size_t feature) const;
  std::size_t distinct_groups() const;
};

struct AssembleResult {
  Dataset dataset;
  std::size_t excluded = 0;
};

// One row per matched test; a parcel with k tests yields k rows sharing the
// pid group key.
AssembleResult AssembleDataset(std::span<const TestMatch> matches, std::span<const LeadTest> tests,
                               std::span<const ParcelRecord> parcels, const FeatureSchema& schema);

enum class EncodingMode { kOrdinal, kOneHot };

struct ColumnDescriptor {
  std::size_t feature = 0;
  int category = -1;  // -1 for a numeric column
};

struct EncodedMatrix {
  Matrix values;
  std::vector<ColumnDescriptor> columns;
};

// Standardized numerics plus one indicator block per categorical feature (the
// last slot of each block is Unknown). Imputation medians and standardization
// moments come only from the rows the encoder was fitted on.
class OneHotEncoder {
 public:
  OneHotEncoder() = default;

  static OneHotEncoder Fit(const FeatureSchema& schema, const Matrix& ordinal_rows);

  std::size_t width() const { return columns_.size(); }
  std::span<const ColumnDescriptor> columns() const { return columns_; }

  void encode_into(std::span<const double> ordinal_row, std::span<double> out) const;
  std::vector<double> encode(std::span<const double> ordinal_row) const;
  EncodedMatrix encode(const Matrix& ordinal_rows) const;

  double median(std::size_t feature) const { return medians_.at(feature); }
  double mean(std::size_t feature) const { return means_.at(feature); }
  double scale(std::size_t feature) const { return scales_.at(feature); }

  nlohmann::json to_json() const;
  static OneHotEncoder FromJson(const nlohmann::json& j);

 private:
  void build_columns();

  std::vector<ColumnKind> kinds_;
  std::vector<int> vocab_sizes_;
  std::vector<double> medians_;
  std::vector<double> means_;
  std::vector<double> scales_;
  std::vector<std::size_t> offsets_;
  std::vector<ColumnDescriptor> columns_;
};

}  // namespace leadrisk
