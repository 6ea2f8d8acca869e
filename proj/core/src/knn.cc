#include "leadrisk/knn.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "leadrisk/error.h"

namespace leadrisk {

double ManhattanDistance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

KnnModel FitKnn(Matrix x, std::vector<int> y, int k) {
  Require(x.rows() == y.size(), "fit_knn: label length mismatch");
  Require(k >= 1, "fit_knn: k must be >= 1");
  Require(static_cast<std::size_t>(k) <= x.rows(),
          "fit_knn: k = " + std::to_string(k) + " exceeds training size " + std::to_string(x.rows()),
          ErrorKind::kData);
  KnnModel m;
  m.train = std::move(x);
  m.labels = std::move(y);
  m.k = k;
  return m;
}

double KnnModel::predict(std::span<const double> query) const {
  const std::size_t n = train.rows();
  Require(k >= 1 && static_cast<std::size_t>(k) <= n, "knn: k exceeds training size");
  Require(query.size() == train.cols(), "knn: query width does not match training matrix");
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = {ManhattanDistance(train.row(i), query), i};
  const auto kth = dist.begin() + k;
  std::nth_element(dist.begin(), kth - 1, dist.end());
  int positives = 0;
  for (auto it = dist.begin(); it != kth; ++it) positives += labels[it->second];
  return static_cast<double>(positives) / static_cast<double>(k);
}

nlohmann::json KnnModel::to_json() const {
  std::vector<double> flat(train.data().begin(), train.data().end());
  return {{"k", k}, {"rows", train.rows()}, {"cols", train.cols()}, {"train", flat},
          {"labels", labels}};
}

KnnModel KnnModel::FromJson(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto flat = j.at("train").get<std::vector<double>>();
  Require(flat.size() == rows * cols, "knn: training matrix size mismatch", ErrorKind::kModelCompat);
  Matrix x(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(r * cols), cols, x.row(r).begin());
  return FitKnn(std::move(x), j.at("labels").get<std::vector<int>>(), j.at("k").get<int>());
}

}  // namespace leadrisk
