#include "leadrisk/lda.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "leadrisk/error.h"
#include "leadrisk/gbt.h"

namespace leadrisk {

std::array<double, 2> LdaModel::posterior(std::span<const double> row) const {
  Require(row.size() == weights.size(), "lda: row width does not match model");
  double z = bias;
  for (std::size_t j = 0; j < row.size(); ++j) z += weights[j] * row[j];
  return {Sigmoid(-z), Sigmoid(z)};
}

nlohmann::json LdaModel::to_json() const {
  return {{"means", {means[0], means[1]}},
          {"priors", {priors[0], priors[1]}},
          {"pooled_covariance", pooled_covariance},
          {"weights", weights},
          {"bias", bias},
          {"jittered", jittered}};
}

LdaModel LdaModel::FromJson(const nlohmann::json& j) {
  LdaModel m;
  m.means[0] = j.at("means").at(0).get<std::vector<double>>();
  m.means[1] = j.at("means").at(1).get<std::vector<double>>();
  m.priors = {j.at("priors").at(0).get<double>(), j.at("priors").at(1).get<double>()};
  m.pooled_covariance = j.at("pooled_covariance").get<std::vector<double>>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.jittered = j.value("jittered", false);
  Require(m.means[0].size() == m.weights.size() && m.means[1].size() == m.weights.size(),
          "lda: inconsistent dimensions", ErrorKind::kModelCompat);
  return m;
}

LdaModel FitLda(const Matrix& x, std::span<const int> y) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  Require(y.size() == n, "fit_lda: label length mismatch");
  std::array<std::size_t, 2> count{0, 0};
  for (int v : y) ++count[v == 1 ? 1 : 0];
  if (count[0] < 2 || count[1] < 2)
    Fail(ErrorKind::kData, "fit_lda: each class needs at least two rows (got " +
                               std::to_string(count[0]) + " negative, " +
                               std::to_string(count[1]) + " positive)");

  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  std::array<VectorXd, 2> mu{VectorXd::Zero(static_cast<Eigen::Index>(d)),
                             VectorXd::Zero(static_cast<Eigen::Index>(d))};
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(i);
    mu[y[i] == 1 ? 1 : 0] += Eigen::Map<const VectorXd>(row.data(), static_cast<Eigen::Index>(d));
  }
  for (int c = 0; c < 2; ++c) mu[c] /= static_cast<double>(count[c]);

  MatrixXd s = MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(i);
    const VectorXd r =
        Eigen::Map<const VectorXd>(row.data(), static_cast<Eigen::Index>(d)) - mu[y[i] == 1 ? 1 : 0];
    s.selfadjointView<Eigen::Lower>().rankUpdate(r);
  }
  s = s.selfadjointView<Eigen::Lower>();
  s /= static_cast<double>(n - 2 > 0 ? n - 2 : 1);

  LdaModel m;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  const double max_ev = d > 0 ? eig.eigenvalues().cwiseAbs().maxCoeff() : 0.0;
  const double min_ev = d > 0 ? eig.eigenvalues().minCoeff() : 1.0;
  if (d > 0 && min_ev <= 1e-10 * std::max(max_ev, 1e-300)) {
    const double trace = s.trace();
    const double jitter = trace > 0.0 ? 1e-8 * trace / static_cast<double>(d) : 1e-8;
    s.diagonal().array() += jitter;
    m.jittered = true;
  }

  const VectorXd w = s.ldlt().solve(mu[1] - mu[0]);
  m.weights.assign(w.data(), w.data() + w.size());
  for (double v : m.weights)
    Require(std::isfinite(v), "fit_lda: non-finite discriminant weights", ErrorKind::kData);
  m.priors = {static_cast<double>(count[0]) / static_cast<double>(n),
              static_cast<double>(count[1]) / static_cast<double>(n)};
  m.bias = -0.5 * (mu[0] + mu[1]).dot(w) + std::log(m.priors[1] / m.priors[0]);
  for (int c = 0; c < 2; ++c) m.means[c].assign(mu[c].data(), mu[c].data() + mu[c].size());
  m.pooled_covariance.resize(d * d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      m.pooled_covariance[r * d + c] = s(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  return m;
}

}  // namespace leadrisk
