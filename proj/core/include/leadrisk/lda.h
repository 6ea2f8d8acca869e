#pragma once

#include <array>
#include <span>
#include <vector>

#include "json.hpp"
#include "leadrisk/matrix.h"

namespace leadrisk {

// Two-class linear discriminant with a pooled (unshrunk) covariance. The
// log posterior ratio is weights . x + bias, with
//   weights = S^-1 (mu1 - mu0),
//   bias    = -1/2 (mu1 + mu0) . weights + ln(prior1 / prior0).
struct LdaModel {
  std::array<std::vector<double>, 2> means;
  std::array<double, 2> priors{0.5, 0.5};
  std::vector<double> pooled_covariance;  // d x d row-major, jitter included
  std::vector<double> weights;
  double bias = 0.0;
  bool jittered = false;

  std::array<double, 2> posterior(std::span<const double> row) const;
  double predict(std::span<const double> row) const { return posterior(row)[1]; }

  nlohmann::json to_json() const;
  static LdaModel FromJson(const nlohmann::json& j);
};

// Throws Error(kData) when a class has fewer than two rows. A singular pooled
// covariance gets 1e-8 * trace / d added to its diagonal (jittered = true).
LdaModel FitLda(const Matrix& x, std::span<const int> y);

}  // namespace leadrisk
