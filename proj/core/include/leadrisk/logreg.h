#pragma once

#include <span>
#include <vector>

#include "json.hpp"
#include "leadrisk/matrix.h"

namespace leadrisk {

struct LogRegParams {
  double l1_strength = 1e-3;
  int max_iter = 2000;
  double tolerance = 1e-6;
};

struct LogRegModel {
  std::vector<double> weights;
  double intercept = 0.0;
  double l1_strength = 0.0;
  int iterations = 0;
  bool converged = false;

  double predict(std::span<const double> row) const;
  std::size_t nonzero_weights() const;

  nlohmann::json to_json() const;
  static LogRegModel FromJson(const nlohmann::json& j);
};

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> weight_gradient;
  double intercept_gradient = 0.0;
};

// Mean logistic loss (the smooth part of the objective) and its gradient.
LossAndGradient LogisticLoss(const Matrix& x, std::span<const int> y,
                             std::span<const double> weights, double intercept);

// Proximal gradient descent with backtracking on
//   mean log loss + l1_strength * ||w||_1   (intercept unpenalized).
// Stops when the largest coordinate change falls below the tolerance.
LogRegModel FitLogRegL1(const Matrix& x, std::span<const int> y, const LogRegParams& params);

double SoftThreshold(double v, double t);

}  // namespace leadrisk
