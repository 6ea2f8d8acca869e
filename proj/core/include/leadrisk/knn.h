#pragma once

#include <span>
#include <vector>

#include "json.hpp"
#include "leadrisk/matrix.h"

namespace leadrisk {

// Brute-force k-nearest-neighbour vote under the Manhattan (L1) metric.
struct KnnModel {
  Matrix train;
  std::vector<int> labels;
  int k = 100;

  // Positive fraction among the k rows with smallest L1 distance; equal
  // distances are ordered by training-row index.
  double predict(std::span<const double> query) const;

  nlohmann::json to_json() const;
  static KnnModel FromJson(const nlohmann::json& j);
};

// Throws when k < 1 or k exceeds the number of training rows.
KnnModel FitKnn(Matrix x, std::vector<int> y, int k);

double ManhattanDistance(std::span<const double> a, std::span<const double> b);

}  // namespace leadrisk
