#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "leadrisk/matrix.h"
#include "leadrisk/tree.h"

namespace leadrisk {

enum class ForestVariant { kRandomForest, kExtraTrees };

struct ForestParams {
  ForestVariant variant = ForestVariant::kRandomForest;
  int trees = 1000;
  int max_depth = 9;
  int min_leaf = 1;
  // Candidate features per split; 0 means floor(sqrt(columns)).
  int max_features = 0;
};

struct ForestModel {
  ForestVariant variant = ForestVariant::kRandomForest;
  bool bootstrap = true;
  std::size_t n_features = 0;
  std::vector<Tree> trees;  // leaves hold (pos + 1) / (n + 2)
  bool single_class = false;

  double predict(std::span<const double> row) const;

  nlohmann::json to_json() const;
  static ForestModel FromJson(const nlohmann::json& j);
};

// Random forest: bootstrap rows and exhaustive Gini search over a feature
// subsample. Extra trees: all rows, one uniform threshold per candidate
// feature. Tree i draws from the stream DeriveSeed(seed, i).
ForestModel FitForest(const Matrix& x, std::span<const int> y, const ForestParams& params,
                      std::uint64_t seed, int threads = 1);

}  // namespace leadrisk
