#include "leadrisk/learner.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "leadrisk/csv.h"
#include "leadrisk/error.h"

namespace leadrisk {
namespace {

constexpr std::array<std::pair<LearnerKind, std::string_view>, 6> kKindNames{{
    {LearnerKind::kGbt, "gbt"},
    {LearnerKind::kRandomForest, "random_forest"},
    {LearnerKind::kExtraTrees, "extra_trees"},
    {LearnerKind::kLogRegL1, "logreg_l1"},
    {LearnerKind::kKnn, "knn"},
    {LearnerKind::kLda, "lda"},
}};

std::set<std::string_view> AllowedKeys(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kGbt:
      return {"trees", "max_depth", "learning_rate", "l2_lambda", "min_leaf", "base_score", "seed"};
    case LearnerKind::kRandomForest:
    case LearnerKind::kExtraTrees:
      return {"trees", "max_depth", "min_leaf", "feature_subsample", "seed"};
    case LearnerKind::kLogRegL1:
      return {"l1_strength", "max_iter", "tolerance", "seed"};
    case LearnerKind::kKnn:
      return {"k_neighbors", "seed"};
    case LearnerKind::kLda:
      return {"seed"};
  }
  return {};
}

bool IsInteger(double v) { return std::isfinite(v) && v == std::floor(v); }

void CheckInt(const ClassifierSpec& s, std::string_view key, double lo) {
  auto v = s.find(key);
  if (!v) return;
  if (!IsInteger(*v) || *v < lo || *v > 1e9)
    Fail(ErrorKind::kConfig, s.label() + ": " + std::string(key) + " must be an integer >= " +
                                 FormatDouble(lo));
}

void CheckRange(const ClassifierSpec& s, std::string_view key, double lo, double hi,
                bool open_lo) {
  auto v = s.find(key);
  if (!v) return;
  const bool ok = std::isfinite(*v) && (open_lo ? *v > lo : *v >= lo) && *v <= hi;
  if (!ok)
    Fail(ErrorKind::kConfig, s.label() + ": " + std::string(key) + " out of range (" +
                                 FormatDouble(*v) + ")");
}

int AsInt(const ClassifierSpec& s, std::string_view key) {
  return static_cast<int>(s.get(key));
}

GbtParams ToGbtParams(const ClassifierSpec& s) {
  GbtParams p;
  p.trees = AsInt(s, "trees");
  p.max_depth = AsInt(s, "max_depth");
  p.learning_rate = s.get("learning_rate");
  p.l2_lambda = s.get("l2_lambda");
  p.min_leaf = AsInt(s, "min_leaf");
  p.base_score = s.find("base_score");
  return p;
}

ForestParams ToForestParams(const ClassifierSpec& s) {
  ForestParams p;
  p.variant = s.kind == LearnerKind::kExtraTrees ? ForestVariant::kExtraTrees
                                                 : ForestVariant::kRandomForest;
  p.trees = AsInt(s, "trees");
  p.max_depth = AsInt(s, "max_depth");
  p.min_leaf = AsInt(s, "min_leaf");
  p.max_features = AsInt(s, "feature_subsample");
  return p;
}

LogRegParams ToLogRegParams(const ClassifierSpec& s) {
  LogRegParams p;
  p.l1_strength = s.get("l1_strength");
  p.max_iter = AsInt(s, "max_iter");
  p.tolerance = s.get("tolerance");
  return p;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::string_view LearnerKindName(LearnerKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

LearnerKind ParseLearnerKind(std::string_view name) {
  std::string norm;
  for (char c : name) {
    if (c == '-' || c == ' ') c = '_';
    norm.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (const auto& [k, kname] : kKindNames)
    if (kname == norm) return k;
  if (norm == "xgboost" || norm == "boosting") return LearnerKind::kGbt;
  if (norm == "rf" || norm == "randomforest") return LearnerKind::kRandomForest;
  if (norm == "extratrees" || norm == "et") return LearnerKind::kExtraTrees;
  if (norm == "logreg" || norm == "logistic" || norm == "logregl1") return LearnerKind::kLogRegL1;
  Fail(ErrorKind::kConfig, "unknown learner kind '" + std::string(name) + "'");
}

EncodingMode EncodingFor(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kGbt:
    case LearnerKind::kRandomForest:
    case LearnerKind::kExtraTrees:
      return EncodingMode::kOrdinal;
    default:
      return EncodingMode::kOneHot;
  }
}

ClassifierSpec ClassifierSpec::Default(LearnerKind kind) {
  ClassifierSpec s;
  s.kind = kind;
  switch (kind) {
    case LearnerKind::kGbt:
      s.hyperparameters = {{"trees", 200}, {"max_depth", 5}, {"learning_rate", 0.1},
                           {"l2_lambda", 1.0}, {"min_leaf", 1}};
      break;
    case LearnerKind::kRandomForest:
    case LearnerKind::kExtraTrees:
      s.hyperparameters = {{"trees", 1000}, {"max_depth", 9}, {"min_leaf", 1},
                           {"feature_subsample", 0}};
      break;
    case LearnerKind::kLogRegL1:
      s.hyperparameters = {{"l1_strength", 1e-3}, {"max_iter", 2000}, {"tolerance", 1e-6}};
      break;
    case LearnerKind::kKnn:
      s.hyperparameters = {{"k_neighbors", 100}};
      break;
    case LearnerKind::kLda:
      break;
  }
  return s;
}

ClassifierSpec ClassifierSpec::DefaultMeta() {
  return Default(LearnerKind::kGbt).with("trees", 800).with("max_depth", 8);
}

ClassifierSpec ClassifierSpec::with(std::string key, double value) const {
  ClassifierSpec s = *this;
  s.hyperparameters[std::move(key)] = value;
  return s;
}

std::optional<double> ClassifierSpec::find(std::string_view key) const {
  auto it = hyperparameters.find(std::string(key));
  if (it == hyperparameters.end()) return std::nullopt;
  return it->second;
}

double ClassifierSpec::get(std::string_view key) const {
  if (auto v = find(key)) return *v;
  const ClassifierSpec d = Default(kind);
  if (auto v = d.find(key)) return *v;
  Fail(ErrorKind::kConfig, label() + ": missing hyperparameter '" + std::string(key) + "'");
}

void ClassifierSpec::validate() const {
  const auto allowed = AllowedKeys(kind);
  for (const auto& [key, value] : hyperparameters) {
    if (!allowed.contains(key))
      Fail(ErrorKind::kConfig, "unknown hyperparameter '" + key + "' for " +
                                   std::string(LearnerKindName(kind)));
    if (!std::isfinite(value))
      Fail(ErrorKind::kConfig, "hyperparameter '" + key + "' must be finite");
  }
  CheckInt(*this, "trees", 0);
  CheckInt(*this, "max_depth", 0);
  CheckInt(*this, "min_leaf", 1);
  CheckInt(*this, "feature_subsample", 0);
  CheckInt(*this, "max_iter", 1);
  CheckInt(*this, "k_neighbors", 1);
  CheckInt(*this, "seed", 0);
  CheckRange(*this, "learning_rate", 0.0, 1.0, true);
  CheckRange(*this, "l2_lambda", 0.0, 1e12, false);
  CheckRange(*this, "l1_strength", 0.0, 1e12, false);
  CheckRange(*this, "tolerance", 0.0, 1.0, true);
}

std::string ClassifierSpec::label() const {
  std::string out(LearnerKindName(kind));
  out += '(';
  bool first = true;
  for (const auto& [key, value] : hyperparameters) {
    if (!first) out += ',';
    first = false;
    out += key + '=' + FormatDouble(value);
  }
  out += ')';
  return out;
}

nlohmann::json ClassifierSpec::to_json() const {
  nlohmann::json hp = nlohmann::json::object();
  for (const auto& [key, value] : hyperparameters) hp[key] = value;
  return {{"kind", LearnerKindName(kind)}, {"hyperparameters", hp}};
}

ClassifierSpec ClassifierSpec::FromJson(const nlohmann::json& j) {
  ClassifierSpec s;
  s.kind = ParseLearnerKind(j.at("kind").get<std::string>());
  for (const auto& [key, value] : j.at("hyperparameters").items())
    s.hyperparameters[key] = value.get<double>();
  return s;
}

double FittedModel::predict(std::span<const double> ordinal_row) const {
  Require(ordinal_row.size() == n_features,
          "predict: row has " + std::to_string(ordinal_row.size()) + " columns, model expects " +
              std::to_string(n_features));
  std::vector<double> encoded;
  std::span<const double> row = ordinal_row;
  if (encoder) {
    encoded = encoder->encode(ordinal_row);
    row = encoded;
  }
  return std::visit(Overloaded{
                        [&](const ConstantModel& m) { return m.probability; },
                        [&](const auto& m) { return m.predict(row); },
                    },
                    model);
}

std::vector<double> FittedModel::predict(const Matrix& ordinal_rows) const {
  std::vector<double> out(ordinal_rows.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = predict(ordinal_rows.row(i));
  return out;
}

nlohmann::json FittedModel::to_json() const {
  nlohmann::json j = {{"spec", spec.to_json()}, {"n_features", n_features}, {"warnings", warnings}};
  if (encoder) j["encoder"] = encoder->to_json();
  std::visit(Overloaded{
                 [&](const ConstantModel& m) {
                   j["model_type"] = "constant";
                   j["model"] = {{"probability", m.probability}};
                 },
                 [&](const GbtModel& m) {
                   j["model_type"] = "gbt";
                   j["model"] = m.to_json();
                 },
                 [&](const ForestModel& m) {
                   j["model_type"] = "forest";
                   j["model"] = m.to_json();
                 },
                 [&](const LogRegModel& m) {
                   j["model_type"] = "logreg_l1";
                   j["model"] = m.to_json();
                 },
                 [&](const KnnModel& m) {
                   j["model_type"] = "knn";
                   j["model"] = m.to_json();
                 },
                 [&](const LdaModel& m) {
                   j["model_type"] = "lda";
                   j["model"] = m.to_json();
                 },
             },
             model);
  return j;
}

FittedModel FittedModel::FromJson(const nlohmann::json& j) {
  FittedModel f;
  f.spec = ClassifierSpec::FromJson(j.at("spec"));
  f.n_features = j.at("n_features").get<std::size_t>();
  f.warnings = j.value("warnings", std::vector<std::string>{});
  if (j.contains("encoder")) f.encoder = OneHotEncoder::FromJson(j.at("encoder"));
  const auto type = j.at("model_type").get<std::string>();
  const auto& m = j.at("model");
  if (type == "constant")
    f.model = ConstantModel{m.at("probability").get<double>()};
  else if (type == "gbt")
    f.model = GbtModel::FromJson(m);
  else if (type == "forest")
    f.model = ForestModel::FromJson(m);
  else if (type == "logreg_l1")
    f.model = LogRegModel::FromJson(m);
  else if (type == "knn")
    f.model = KnnModel::FromJson(m);
  else if (type == "lda")
    f.model = LdaModel::FromJson(m);
  else
    Fail(ErrorKind::kModelCompat, "unknown model_type '" + type + "'");
  return f;
}

FittedModel Fit(const ClassifierSpec& spec, const Dataset& data, std::uint64_t seed, int threads) {
  spec.validate();
  Require(data.size() > 0, "fit: empty dataset", ErrorKind::kData);
  FittedModel out;
  out.spec = spec;
  out.n_features = data.schema.size();
  if (auto s = spec.find("seed")) seed = static_cast<std::uint64_t>(*s);

  const std::size_t pos = data.positives();
  if (pos == 0 || pos == data.size()) {
    const double prior = std::clamp(static_cast<double>(pos) / static_cast<double>(data.size()),
                                    1e-6, 1.0 - 1e-6);
    out.model = ConstantModel{prior};
    out.warnings.push_back(spec.label() + ": single-class training data (" +
                           std::to_string(data.size()) + " rows), predicting prior " +
                           FormatDouble(prior));
    return out;
  }

  const Matrix* x = &data.rows;
  EncodedMatrix encoded;
  if (EncodingFor(spec.kind) == EncodingMode::kOneHot) {
    out.encoder = OneHotEncoder::Fit(data.schema, data.rows);
    encoded = out.encoder->encode(data.rows);
    x = &encoded.values;
  }
  const std::span<const int> y = data.labels;

  switch (spec.kind) {
    case LearnerKind::kGbt:
      out.model = FitGbt(*x, y, ToGbtParams(spec), threads);
      break;
    case LearnerKind::kRandomForest:
    case LearnerKind::kExtraTrees:
      out.model = FitForest(*x, y, ToForestParams(spec), seed, threads);
      break;
    case LearnerKind::kLogRegL1: {
      auto m = FitLogRegL1(*x, y, ToLogRegParams(spec));
      if (!m.converged)
        out.warnings.push_back(spec.label() + ": did not converge in " +
                               std::to_string(m.iterations) + " iterations");
      out.model = std::move(m);
      break;
    }
    case LearnerKind::kKnn: {
      const int k = AsInt(spec, "k_neighbors");
      out.model = FitKnn(*x, data.labels, k);
      break;
    }
    case LearnerKind::kLda: {
      auto m = FitLda(*x, y);
      if (m.jittered)
        out.warnings.push_back(spec.label() + ": singular pooled covariance, diagonal jitter added");
      out.model = std::move(m);
      break;
    }
  }
  return out;
}

}  // namespace leadrisk
