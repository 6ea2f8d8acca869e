#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "leadrisk/features.h"
#include "leadrisk/forest.h"
#include "leadrisk/gbt.h"
#include "leadrisk/knn.h"
#include "leadrisk/lda.h"
#include "leadrisk/logreg.h"

namespace leadrisk {

enum class LearnerKind { kGbt, kRandomForest, kExtraTrees, kLogRegL1, kKnn, kLda };

std::string_view LearnerKindName(LearnerKind kind);
LearnerKind ParseLearnerKind(std::string_view name);
// Trees consume ordinal codes; the linear and distance learners consume one-hot.
EncodingMode EncodingFor(LearnerKind kind);

struct ClassifierSpec {
  LearnerKind kind = LearnerKind::kGbt;
  std::map<std::string, double> hyperparameters;

  // Default hyperparameters:
  //   gbt           trees 200, max_depth 5, learning_rate 0.1, l2_lambda 1, min_leaf 1
  //   random_forest trees 1000, max_depth 9, min_leaf 1, feature_subsample 0 (sqrt)
  //   extra_trees   as random_forest
  //   logreg_l1     l1_strength 1e-3, max_iter 2000, tolerance 1e-6
  //   knn           k_neighbors 100
  //   lda           (none)
  // Every kind also accepts an optional `seed` override.
  static ClassifierSpec Default(LearnerKind kind);
  // Default second layer: gbt with 800 trees of depth 8.
  static ClassifierSpec DefaultMeta();

  ClassifierSpec with(std::string key, double value) const;
  double get(std::string_view key) const;
  std::optional<double> find(std::string_view key) const;

  // Throws Error(kConfig) on unknown keys or out-of-range values.
  void validate() const;

  // e.g. "gbt(learning_rate=0.1,max_depth=5,...)"
  std::string label() const;

  nlohmann::json to_json() const;
  static ClassifierSpec FromJson(const nlohmann::json& j);

  friend bool operator==(const ClassifierSpec&, const ClassifierSpec&) = default;
};

// Used when a training side holds a single class.
struct ConstantModel {
  double probability = 0.5;
};

using ModelVariant =
    std::variant<GbtModel, ForestModel, LogRegModel, KnnModel, LdaModel, ConstantModel>;

// A fitted learner together with the encoder it was trained behind. Input rows
// are always in the schema's ordinal encoding.
struct FittedModel {
  ClassifierSpec spec;
  std::size_t n_features = 0;
  std::optional<OneHotEncoder> encoder;
  ModelVariant model;
  std::vector<std::string> warnings;

  double predict(std::span<const double> ordinal_row) const;
  std::vector<double> predict(const Matrix& ordinal_rows) const;

  nlohmann::json to_json() const;
  static FittedModel FromJson(const nlohmann::json& j);
};

// Fits `spec` on every row of `data`. A single-class training set yields a
// model that returns the (clipped) class prior, with a warning recorded.
FittedModel Fit(const ClassifierSpec& spec, const Dataset& data, std::uint64_t seed,
                int threads = 1);

}  // namespace leadrisk
