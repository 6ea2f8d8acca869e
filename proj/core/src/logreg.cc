#include "leadrisk/logreg.h"

#include <algorithm>
#include <cmath>

#include "leadrisk/error.h"
#include "leadrisk/gbt.h"

namespace leadrisk {
namespace {

double Softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double MeanLoss(const Matrix& x, std::span<const int> y, std::span<const double> w, double b) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double z = Dot(x.row(i), w) + b;
    loss += Softplus(z) - y[i] * z;
  }
  return loss / static_cast<double>(x.rows());
}

}  // namespace

double SoftThreshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

double LogRegModel::predict(std::span<const double> row) const {
  Require(row.size() == weights.size(), "logreg: row width does not match model");
  return Sigmoid(Dot(row, weights) + intercept);
}

std::size_t LogRegModel::nonzero_weights() const {
  return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(),
                                                [](double w) { return w != 0.0; }));
}

nlohmann::json LogRegModel::to_json() const {
  return {{"weights", weights},       {"intercept", intercept}, {"l1_strength", l1_strength},
          {"iterations", iterations}, {"converged", converged}};
}

LogRegModel LogRegModel::FromJson(const nlohmann::json& j) {
  LogRegModel m;
  m.weights = j.at("weights").get<std::vector<double>>();
  m.intercept = j.at("intercept").get<double>();
  m.l1_strength = j.at("l1_strength").get<double>();
  m.iterations = j.value("iterations", 0);
  m.converged = j.value("converged", false);
  return m;
}

LossAndGradient LogisticLoss(const Matrix& x, std::span<const int> y,
                             std::span<const double> weights, double intercept) {
  Require(weights.size() == x.cols() && y.size() == x.rows(), "logistic_loss: shape mismatch");
  LossAndGradient out;
  out.weight_gradient.assign(x.cols(), 0.0);
  const double n = static_cast<double>(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    const double z = Dot(row, weights) + intercept;
    out.loss += Softplus(z) - y[i] * z;
    const double r = Sigmoid(z) - y[i];
    out.intercept_gradient += r;
    for (std::size_t j = 0; j < row.size(); ++j) out.weight_gradient[j] += r * row[j];
  }
  out.loss /= n;
  out.intercept_gradient /= n;
  for (double& g : out.weight_gradient) g /= n;
  return out;
}

LogRegModel FitLogRegL1(const Matrix& x, std::span<const int> y, const LogRegParams& params) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  Require(n > 0 && y.size() == n, "fit_logreg_l1: empty dataset or label mismatch");
  Require(params.l1_strength >= 0.0, "fit_logreg_l1: l1_strength must be >= 0");
  for (double v : x.data())
    Require(std::isfinite(v), "fit_logreg_l1: non-finite feature value", ErrorKind::kData);

  LogRegModel model;
  model.l1_strength = params.l1_strength;
  model.weights.assign(d, 0.0);
  const double pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
  const double prior = std::clamp(pos / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
  model.intercept = std::log(prior / (1.0 - prior));

  std::vector<double> w_next(d);
  double step = 1.0;
  LossAndGradient cur = LogisticLoss(x, y, model.weights, model.intercept);
  for (int it = 0; it < params.max_iter; ++it) {
    double b_next = 0.0;
    double f_next = 0.0;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      for (std::size_t j = 0; j < d; ++j)
        w_next[j] = SoftThreshold(model.weights[j] - step * cur.weight_gradient[j],
                                  step * params.l1_strength);
      b_next = model.intercept - step * cur.intercept_gradient;
      f_next = MeanLoss(x, y, w_next, b_next);
      double lin = cur.intercept_gradient * (b_next - model.intercept);
      double quad = (b_next - model.intercept) * (b_next - model.intercept);
      for (std::size_t j = 0; j < d; ++j) {
        const double delta = w_next[j] - model.weights[j];
        lin += cur.weight_gradient[j] * delta;
        quad += delta * delta;
      }
      if (f_next <= cur.loss + lin + quad / (2.0 * step) + 1e-15) break;
      step *= 0.5;
    }
    double max_change = std::abs(b_next - model.intercept);
    for (std::size_t j = 0; j < d; ++j)
      max_change = std::max(max_change, std::abs(w_next[j] - model.weights[j]));
    model.weights.swap(w_next);
    model.intercept = b_next;
    model.iterations = it + 1;
    if (max_change < params.tolerance) {
      model.converged = true;
      break;
    }
    cur = LogisticLoss(x, y, model.weights, model.intercept);
    // Let the step recover after a conservative backtrack.
    step = std::min(step * 1.25, 1e3);
  }
  return model;
}

}  // namespace leadrisk
