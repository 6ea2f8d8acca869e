#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "leadrisk/matrix.h"
#include "leadrisk/tree.h"

namespace leadrisk {

struct GbtParams {
  int trees = 200;
  int max_depth = 5;
  double learning_rate = 0.1;
  double l2_lambda = 1.0;
  int min_leaf = 1;
  // Initial log-odds; the training prior's log-odds when unset.
  std::optional<double> base_score;
};

// Second-order boosted trees for the logistic loss.
struct GbtModel {
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::size_t n_features = 0;
  std::vector<Tree> trees;
  // Training log loss after each round (size == trees.size()).
  std::vector<double> train_log_loss;
  bool single_class = false;

  double raw_score(std::span<const double> row) const;
  double predict(std::span<const double> row) const;

  nlohmann::json to_json() const;
  static GbtModel FromJson(const nlohmann::json& j);
};

// Gradient g = p - y, hessian h = p(1 - p); leaves take -G / (H + lambda) and
// splits maximize 1/2 [G_L^2/(H_L+l) + G_R^2/(H_R+l) - G^2/(H+l)] over every
// boundary between distinct sorted values. Missing values try both sides.
GbtModel FitGbt(const Matrix& x, std::span<const int> y, const GbtParams& params, int threads = 1);

double Sigmoid(double z);

}  // namespace leadrisk
