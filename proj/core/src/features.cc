#include "leadrisk/features.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "leadrisk/error.h"
#include "leadrisk/rng.h"

namespace leadrisk {

int BinarizeLabel(double lead_ppb) {
  Require(lead_ppb >= 0.0, "binarize_label: negative lead_ppb");
  return lead_ppb > kActionLevelPpb ? 1 : 0;
}

double Log1pLead(double lead_ppb) {
  Require(lead_ppb >= 0.0, "log1p_lead: negative lead_ppb");
  return std::log1p(lead_ppb);
}

FeatureSchema::FeatureSchema(std::vector<FeatureDef> features) : features_(std::move(features)) {
  std::unordered_set<std::string> names;
  for (const auto& f : features_) {
    Require(!f.name.empty(), "schema: empty feature name");
    Require(names.insert(f.name).second, "schema: duplicate feature name '" + f.name + "'");
    if (f.kind == ColumnKind::kNumeric) {
      Require(f.vocabulary.empty(), "schema: numeric feature '" + f.name + "' has a vocabulary");
      continue;
    }
    Require(!f.vocabulary.empty() && f.vocabulary.back() == kUnknownCategory,
            "schema: vocabulary of '" + f.name + "' must end with Unknown");
    std::unordered_set<std::string> seen;
    for (const auto& v : f.vocabulary)
      Require(seen.insert(v).second, "schema: duplicate vocabulary entry '" + v + "' in " + f.name);
  }
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].name == name) return i;
  return std::nullopt;
}

int FeatureSchema::category_code(std::size_t feature, std::string_view value) const {
  const auto& vocab = features_.at(feature).vocabulary;
  const int unknown = static_cast<int>(vocab.size()) - 1;
  if (value.empty()) return unknown;
  for (int i = 0; i < unknown; ++i)
    if (vocab[static_cast<std::size_t>(i)] == value) return i;
  return unknown;
}

FeatureSchema FeatureSchema::without(std::size_t feature) const {
  Require(feature < features_.size(), "schema: feature index out of range");
  std::vector<FeatureDef> kept;
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (i != feature) kept.push_back(features_[i]);
  return FeatureSchema(std::move(kept));
}

nlohmann::json FeatureSchema::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& f : features_) {
    nlohmann::json j;
    j["name"] = f.name;
    j["kind"] = f.kind == ColumnKind::kNumeric ? "numeric" : "categorical";
    if (f.kind == ColumnKind::kCategorical) j["vocabulary"] = f.vocabulary;
    arr.push_back(std::move(j));
  }
  return {{"features", std::move(arr)}};
}

FeatureSchema FeatureSchema::FromJson(const nlohmann::json& j) {
  std::vector<FeatureDef> defs;
  for (const auto& f : j.at("features")) {
    FeatureDef def;
    def.name = f.at("name").get<std::string>();
    const auto kind = f.at("kind").get<std::string>();
    Require(kind == "numeric" || kind == "categorical", "schema: bad kind '" + kind + "'");
    def.kind = kind == "numeric" ? ColumnKind::kNumeric : ColumnKind::kCategorical;
    if (def.kind == ColumnKind::kCategorical)
      def.vocabulary = f.at("vocabulary").get<std::vector<std::string>>();
    defs.push_back(std::move(def));
  }
  return FeatureSchema(std::move(defs));
}

std::uint64_t FeatureSchema::hash() const { return Fnv1a64(to_json().dump()); }

bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
  if (a.features_.size() != b.features_.size()) return false;
  for (std::size_t i = 0; i < a.features_.size(); ++i) {
    const auto& x = a.features_[i];
    const auto& y = b.features_[i];
    if (x.name != y.name || x.kind != y.kind || x.vocabulary != y.vocabulary) return false;
  }
  return true;
}

FeatureSchema BuildSchema(std::span<const ParcelRecord> parcels) {
  Require(!parcels.empty(), "build_schema: no parcel records");
  std::vector<FeatureDef> defs;
  for (const auto& col : ParcelColumns()) {
    FeatureDef def;
    def.name = std::string(col.key);
    def.kind = col.kind;
    if (col.kind == ColumnKind::kCategorical) {
      const auto field = std::get<TextField>(col.field);
      std::set<std::string> values;
      for (const auto& p : parcels) {
        const std::string& v = p.*field;
        if (!v.empty() && v != kUnknownCategory) values.insert(v);
      }
      def.vocabulary.assign(values.begin(), values.end());
      def.vocabulary.emplace_back(kUnknownCategory);
    }
    defs.push_back(std::move(def));
  }
  return FeatureSchema(std::move(defs));
}

RawRow ParcelRawRow(const ParcelRecord& parcel) {
  RawRow row;
  row.reserve(ParcelColumns().size());
  for (const auto& col : ParcelColumns()) {
    if (col.key == "pid") {
      row.emplace_back(PidNumeric(parcel.pid));
    } else if (const auto* num = std::get_if<NumericField>(&col.field)) {
      row.emplace_back(parcel.*(*num));
    } else {
      row.emplace_back(parcel.*std::get<TextField>(col.field));
    }
  }
  return row;
}

std::vector<double> EncodeOrdinal(const RawRow& sample, const FeatureSchema& schema) {
  Require(sample.size() == schema.size(), "encode_row: sample width does not match schema");
  std::vector<double> out(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& def = schema.feature(i);
    if (def.kind == ColumnKind::kNumeric) {
      const auto* v = std::get_if<std::optional<double>>(&sample[i]);
      Require(v != nullptr, "encode_row: expected a numeric value for " + def.name);
      out[i] = (*v && std::isfinite(**v)) ? **v : kMissingSentinel;
    } else {
      const auto* s = std::get_if<std::string>(&sample[i]);
      Require(s != nullptr, "encode_row: expected a category for " + def.name);
      out[i] = schema.category_code(i, *s);
    }
  }
  return out;
}

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

void Dataset::validate() const {
  const std::size_t n = labels.size();
  Require(rows.rows() == n && groups.size() == n, "dataset: rows, labels and groups differ in length",
          ErrorKind::kData);
  Require(lead_ppb.empty() || lead_ppb.size() == n, "dataset: lead_ppb length mismatch",
          ErrorKind::kData);
  Require(n == 0 || rows.cols() == schema.size(), "dataset: column count does not match schema",
          ErrorKind::kData);
  for (int y : labels) Require(y == 0 || y == 1, "dataset: labels must be 0/1", ErrorKind::kData);
  for (std::size_t j = 0; j < schema.size() && n > 0; ++j) {
    const auto& def = schema.feature(j);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = rows(i, j);
      if (def.kind == ColumnKind::kNumeric) {
        Require(std::isfinite(v), "dataset: non-finite value in " + def.name, ErrorKind::kData);
      } else {
        Require(v >= 0 && v < static_cast<double>(def.vocabulary.size()) && v == std::floor(v),
                "dataset: category code out of vocabulary in " + def.name, ErrorKind::kData);
      }
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.schema = schema;
  out.rows = rows.select_rows(indices);
  out.labels.reserve(indices.size());
  out.groups.reserve(indices.size());
  for (std::size_t i : indices) {
    out.labels.push_back(labels[i]);
    out.groups.push_back(groups[i]);
    if (!lead_ppb.empty()) out.lead_ppb.push_back(lead_ppb[i]);
  }
  return out;
}

Dataset Dataset::without_feature(std::size_t feature) const {
  Dataset out = *this;
  out.schema = schema.without(feature);
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < schema.size(); ++j)
    if (j != feature) keep.push_back(j);
  out.rows = rows.select_cols(keep);
  return out;
}

std::size_t Dataset::distinct_groups() const {
  return std::unordered_set<std::string>(groups.begin(), groups.end()).size();
}

AssembleResult AssembleDataset(std::span<const TestMatch> matches, std::span<const LeadTest> tests,
                               std::span<const ParcelRecord> parcels, const FeatureSchema& schema) {
  AssembleResult result;
  Dataset& d = result.dataset;
  d.schema = schema;
  d.rows = Matrix(0, schema.size());
  std::vector<char> matched(tests.size(), 0);
  for (const auto& m : matches) {
    Require(m.test_index < tests.size() && m.parcel_index < parcels.size(),
            "assemble_dataset: match index out of range");
    Require(!matched[m.test_index], "assemble_dataset: test matched twice", ErrorKind::kInternal);
    matched[m.test_index] = 1;
    const auto& test = tests[m.test_index];
    const auto& parcel = parcels[m.parcel_index];
    d.rows.append_row(EncodeOrdinal(ParcelRawRow(parcel), schema));
    d.labels.push_back(BinarizeLabel(test.lead_ppb));
    d.groups.push_back(parcel.pid);
    d.lead_ppb.push_back(test.lead_ppb);
  }
  result.excluded = tests.size() - matches.size();
  return result;
}

OneHotEncoder OneHotEncoder::Fit(const FeatureSchema& schema, const Matrix& ordinal_rows) {
  Require(ordinal_rows.empty() || ordinal_rows.cols() == schema.size(),
          "onehot: matrix width does not match schema");
  OneHotEncoder enc;
  const std::size_t d = schema.size();
  enc.kinds_.resize(d);
  enc.vocab_sizes_.assign(d, 0);
  enc.medians_.assign(d, 0.0);
  enc.means_.assign(d, 0.0);
  enc.scales_.assign(d, 1.0);
  std::vector<double> values;
  for (std::size_t j = 0; j < d; ++j) {
    const auto& def = schema.feature(j);
    enc.kinds_[j] = def.kind;
    if (def.kind == ColumnKind::kCategorical) {
      enc.vocab_sizes_[j] = static_cast<int>(def.vocabulary.size());
      continue;
    }
    values.clear();
    for (std::size_t i = 0; i < ordinal_rows.rows(); ++i) {
      const double v = ordinal_rows(i, j);
      if (!IsMissing(v)) values.push_back(v);
    }
    double median = 0.0;
    if (!values.empty()) {
      std::sort(values.begin(), values.end());
      const std::size_t m = values.size() / 2;
      median = values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
    }
    const std::size_t n = ordinal_rows.rows();
    double sum = 0.0;
    for (double v : values) sum += v;
    sum += median * static_cast<double>(n - values.size());
    const double mean = n ? sum / static_cast<double>(n) : 0.0;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    ss += static_cast<double>(n - values.size()) * (median - mean) * (median - mean);
    const double sd = n ? std::sqrt(ss / static_cast<double>(n)) : 0.0;
    enc.medians_[j] = median;
    enc.means_[j] = mean;
    enc.scales_[j] = sd > 1e-12 ? sd : 1.0;
  }
  enc.build_columns();
  return enc;
}

void OneHotEncoder::build_columns() {
  offsets_.assign(kinds_.size(), 0);
  columns_.clear();
  for (std::size_t j = 0; j < kinds_.size(); ++j) {
    offsets_[j] = columns_.size();
    if (kinds_[j] == ColumnKind::kNumeric) {
      columns_.push_back({j, -1});
    } else {
      for (int c = 0; c < vocab_sizes_[j]; ++c) columns_.push_back({j, c});
    }
  }
}

void OneHotEncoder::encode_into(std::span<const double> ordinal_row, std::span<double> out) const {
  Require(ordinal_row.size() == kinds_.size(), "onehot: row width does not match encoder");
  Require(out.size() == columns_.size(), "onehot: output width mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < kinds_.size(); ++j) {
    const double v = ordinal_row[j];
    if (kinds_[j] == ColumnKind::kNumeric) {
      const double x = IsMissing(v) ? medians_[j] : v;
      out[offsets_[j]] = (x - means_[j]) / scales_[j];
    } else {
      int code = static_cast<int>(v);
      if (code < 0 || code >= vocab_sizes_[j]) code = vocab_sizes_[j] - 1;
      out[offsets_[j] + static_cast<std::size_t>(code)] = 1.0;
    }
  }
}

std::vector<double> OneHotEncoder::encode(std::span<const double> ordinal_row) const {
  std::vector<double> out(columns_.size());
  encode_into(ordinal_row, out);
  return out;
}

EncodedMatrix OneHotEncoder::encode(const Matrix& ordinal_rows) const {
  EncodedMatrix out{Matrix(ordinal_rows.rows(), columns_.size()), columns_};
  for (std::size_t i = 0; i < ordinal_rows.rows(); ++i)
    encode_into(ordinal_rows.row(i), out.values.row(i));
  return out;
}

nlohmann::json OneHotEncoder::to_json() const {
  std::vector<std::string> kinds;
  for (auto k : kinds_) kinds.emplace_back(k == ColumnKind::kNumeric ? "numeric" : "categorical");
  return {{"kinds", kinds},
          {"vocab_sizes", vocab_sizes_},
          {"medians", medians_},
          {"means", means_},
          {"scales", scales_}};
}

OneHotEncoder OneHotEncoder::FromJson(const nlohmann::json& j) {
  OneHotEncoder enc;
  for (const auto& k : j.at("kinds").get<std::vector<std::string>>())
    enc.kinds_.push_back(k == "numeric" ? ColumnKind::kNumeric : ColumnKind::kCategorical);
  enc.vocab_sizes_ = j.at("vocab_sizes").get<std::vector<int>>();
  enc.medians_ = j.at("medians").get<std::vector<double>>();
  enc.means_ = j.at("means").get<std::vector<double>>();
  enc.scales_ = j.at("scales").get<std::vector<double>>();
  const std::size_t d = enc.kinds_.size();
  Require(enc.vocab_sizes_.size() == d && enc.medians_.size() == d && enc.means_.size() == d &&
              enc.scales_.size() == d,
          "onehot: inconsistent encoder document", ErrorKind::kModelCompat);
  enc.build_columns();
  return enc;
}

}  // namespace leadrisk
