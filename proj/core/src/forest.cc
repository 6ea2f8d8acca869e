#include "leadrisk/forest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "leadrisk/error.h"
#include "leadrisk/features.h"
#include "leadrisk/parallel.h"
#include "leadrisk/rng.h"

namespace leadrisk {
namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // sum over children of (pos^2 + neg^2) / n; larger is purer
};

double PurityScore(double pos, double n) {
  if (n <= 0.0) return 0.0;
  const double neg = n - pos;
  return (pos * pos + neg * neg) / n;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, const ForestParams& params, Rng rng)
      : x_(x), y_(y), params_(params), rng_(std::move(rng)) {
    const int d = static_cast<int>(x.cols());
    mtry_ = params.max_features > 0 ? std::min(params.max_features, d)
                                    : std::max(1, static_cast<int>(std::sqrt(static_cast<double>(d))));
    features_.resize(x.cols());
    std::iota(features_.begin(), features_.end(), 0);
  }

  Tree Build() {
    std::vector<std::size_t> rows;
    const std::size_t n = x_.rows();
    if (params_.variant == ForestVariant::kRandomForest) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      rows.resize(n);
      for (auto& r : rows) r = pick(rng_);
    } else {
      rows.resize(n);
      std::iota(rows.begin(), rows.end(), 0);
    }
    Tree tree;
    struct Work {
      int node;
      int depth;
      std::vector<std::size_t> rows;
    };
    std::vector<Work> stack;
    stack.push_back({0, 0, std::move(rows)});
    while (!stack.empty()) {
      Work w = std::move(stack.back());
      stack.pop_back();
      double pos = 0.0;
      for (std::size_t r : w.rows) pos += y_[r];
      const double count = static_cast<double>(w.rows.size());
      tree.node(w.node).value = (pos + 1.0) / (count + 2.0);
      const bool pure = pos == 0.0 || pos == count;
      if (w.depth >= params_.max_depth || pure ||
          w.rows.size() < 2 * static_cast<std::size_t>(params_.min_leaf)) {
        continue;
      }
      const Split split = FindSplit(w.rows, pos);
      if (split.feature < 0) continue;
      std::vector<std::size_t> left, right;
      for (std::size_t r : w.rows) {
        const double v = x_(r, static_cast<std::size_t>(split.feature));
        (IsMissing(v) || v <= split.threshold ? left : right).push_back(r);
      }
      const int l = tree.split(w.node, split.feature, split.threshold, true);
      // Right first so the left subtree is expanded first.
      stack.push_back({l + 1, w.depth + 1, std::move(right)});
      stack.push_back({l, w.depth + 1, std::move(left)});
    }
    return tree;
  }

 private:
  Split FindSplit(const std::vector<std::size_t>& rows, double pos_total) {
    // Partial Fisher-Yates: the first mtry entries become the candidates.
    for (int k = 0; k < mtry_; ++k) {
      std::uniform_int_distribution<int> pick(k, static_cast<int>(features_.size()) - 1);
      std::swap(features_[static_cast<std::size_t>(k)], features_[static_cast<std::size_t>(pick(rng_))]);
    }
    const double n = static_cast<double>(rows.size());
    Split best;
    best.score = PurityScore(pos_total, n) + 1e-12;
    const std::size_t min_leaf = static_cast<std::size_t>(params_.min_leaf);
    for (int k = 0; k < mtry_; ++k) {
      const int f = features_[static_cast<std::size_t>(k)];
      const auto col = static_cast<std::size_t>(f);
      if (params_.variant == ForestVariant::kExtraTrees) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t r : rows) {
          const double v = x_(r, col);
          if (IsMissing(v)) continue;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        if (!(lo < hi)) continue;
        std::uniform_real_distribution<double> u(lo, hi);
        double threshold = u(rng_);
        if (!(threshold < hi)) threshold = lo;
        double lpos = 0.0, ln = 0.0;
        for (std::size_t r : rows) {
          const double v = x_(r, col);
          if (IsMissing(v) || v <= threshold) {
            lpos += y_[r];
            ln += 1.0;
          }
        }
        if (ln < static_cast<double>(min_leaf) || n - ln < static_cast<double>(min_leaf)) continue;
        const double score = PurityScore(lpos, ln) + PurityScore(pos_total - lpos, n - ln);
        if (score > best.score) best = {f, threshold, score};
        continue;
      }
      pairs_.clear();
      for (std::size_t r : rows) pairs_.emplace_back(x_(r, col), y_[r]);
      std::sort(pairs_.begin(), pairs_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double lpos = 0.0;
      for (std::size_t i = 0; i + 1 < pairs_.size(); ++i) {
        lpos += pairs_[i].second;
        if (pairs_[i].first == pairs_[i + 1].first) continue;
        const std::size_t left_n = i + 1;
        if (left_n < min_leaf || pairs_.size() - left_n < min_leaf) continue;
        const double ln = static_cast<double>(left_n);
        const double score = PurityScore(lpos, ln) + PurityScore(pos_total - lpos, n - ln);
        if (score > best.score)
          best = {f, SplitThreshold(pairs_[i].first, pairs_[i + 1].first), score};
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> y_;
  const ForestParams& params_;
  Rng rng_;
  int mtry_ = 1;
  std::vector<int> features_;
  std::vector<std::pair<double, int>> pairs_;
};

std::string_view VariantName(ForestVariant v) {
  return v == ForestVariant::kRandomForest ? "random_forest" : "extra_trees";
}

}  // namespace

double ForestModel::predict(std::span<const double> row) const {
  Require(row.size() == n_features, "forest: row has " + std::to_string(row.size()) +
                                        " columns, model expects " + std::to_string(n_features));
  if (trees.empty()) return 0.5;
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(row);
  return sum / static_cast<double>(trees.size());
}

nlohmann::json ForestModel::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& t : trees) arr.push_back(t.to_json());
  return {{"variant", VariantName(variant)},
          {"bootstrap", bootstrap},
          {"n_features", n_features},
          {"single_class", single_class},
          {"trees", std::move(arr)}};
}

ForestModel ForestModel::FromJson(const nlohmann::json& j) {
  ForestModel m;
  const auto variant = j.at("variant").get<std::string>();
  Require(variant == "random_forest" || variant == "extra_trees", "forest: bad variant",
          ErrorKind::kModelCompat);
  m.variant = variant == "random_forest" ? ForestVariant::kRandomForest : ForestVariant::kExtraTrees;
  m.bootstrap = j.at("bootstrap").get<bool>();
  m.n_features = j.at("n_features").get<std::size_t>();
  m.single_class = j.value("single_class", false);
  for (const auto& t : j.at("trees")) m.trees.push_back(Tree::FromJson(t));
  return m;
}

ForestModel FitForest(const Matrix& x, std::span<const int> y, const ForestParams& params,
                      std::uint64_t seed, int threads) {
  Require(x.rows() > 0 && y.size() == x.rows(), "fit_forest: empty dataset or label mismatch");
  Require(params.trees >= 0 && params.max_depth >= 0 && params.min_leaf >= 1,
          "fit_forest: invalid trees, max_depth or min_leaf");
  ForestModel model;
  model.variant = params.variant;
  model.bootstrap = params.variant == ForestVariant::kRandomForest;
  model.n_features = x.cols();
  const auto pos = std::count(y.begin(), y.end(), 1);
  model.single_class = pos == 0 || static_cast<std::size_t>(pos) == y.size();
  model.trees.resize(static_cast<std::size_t>(params.trees));
  ParallelFor(model.trees.size(), threads, [&](std::size_t t) {
    TreeBuilder builder(x, y, params, MakeRng(seed, t));
    model.trees[t] = builder.Build();
  });
  return model;
}

}  // namespace leadrisk
