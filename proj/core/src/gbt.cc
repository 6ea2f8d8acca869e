#include "leadrisk/gbt.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "leadrisk/error.h"
#include "leadrisk/features.h"
#include "leadrisk/parallel.h"

namespace leadrisk {
namespace {

constexpr double kPriorClip = 1e-6;

struct SplitCandidate {
  double gain = 0.0;
  double threshold = 0.0;
  bool missing_left = true;
  bool valid = false;
};

struct NodeStats {
  double g = 0.0;
  double h = 0.0;
  std::size_t count = 0;
};

double ScoreTerm(double g, double h, double lambda) {
  const double denom = h + lambda;
  return denom > 0.0 ? g * g / denom : 0.0;
}

double LogLossAt(double p, int y) {
  const double q = std::clamp(p, 1e-15, 1.0 - 1e-15);
  return y ? -std::log(q) : -std::log1p(-q);
}

// Presorted non-missing row indices per feature plus the missing rows.
struct SortedColumns {
  std::vector<std::vector<std::size_t>> order;
  std::vector<std::vector<std::size_t>> missing;
};

SortedColumns Presort(const Matrix& x) {
  SortedColumns s;
  s.order.resize(x.cols());
  s.missing.resize(x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    auto& ord = s.order[j];
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (IsMissing(x(i, j))) {
        s.missing[j].push_back(i);
      } else {
        ord.push_back(i);
      }
    }
    std::stable_sort(ord.begin(), ord.end(),
                     [&](std::size_t a, std::size_t b) { return x(a, j) < x(b, j); });
  }
  return s;
}

}  // namespace

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double GbtModel::raw_score(std::span<const double> row) const {
  Require(row.size() == n_features, "gbt: row has " + std::to_string(row.size()) +
                                        " columns, model expects " + std::to_string(n_features));
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(row);
  return base_score + learning_rate * sum;
}

double GbtModel::predict(std::span<const double> row) const { return Sigmoid(raw_score(row)); }

nlohmann::json GbtModel::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& t : trees) arr.push_back(t.to_json());
  return {{"base_score", base_score},
          {"learning_rate", learning_rate},
          {"n_features", n_features},
          {"single_class", single_class},
          {"train_log_loss", train_log_loss},
          {"trees", std::move(arr)}};
}

GbtModel GbtModel::FromJson(const nlohmann::json& j) {
  GbtModel m;
  m.base_score = j.at("base_score").get<double>();
  m.learning_rate = j.at("learning_rate").get<double>();
  m.n_features = j.at("n_features").get<std::size_t>();
  m.single_class = j.value("single_class", false);
  m.train_log_loss = j.value("train_log_loss", std::vector<double>{});
  for (const auto& t : j.at("trees")) m.trees.push_back(Tree::FromJson(t));
  return m;
}

GbtModel FitGbt(const Matrix& x, std::span<const int> y, const GbtParams& params, int threads) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  Require(n > 0 && y.size() == n, "fit_gbt: empty dataset or label length mismatch");
  Require(params.trees >= 0 && params.max_depth >= 0, "fit_gbt: negative trees or depth");
  Require(params.learning_rate > 0.0 && params.learning_rate <= 1.0,
          "fit_gbt: learning_rate must be in (0, 1]");
  Require(params.l2_lambda >= 0.0, "fit_gbt: l2_lambda must be >= 0");
  Require(params.min_leaf >= 1, "fit_gbt: min_leaf must be >= 1");

  GbtModel model;
  model.learning_rate = params.learning_rate;
  model.n_features = d;
  const double positives = static_cast<double>(std::count(y.begin(), y.end(), 1));
  const double prior = std::clamp(positives / static_cast<double>(n), kPriorClip, 1.0 - kPriorClip);
  model.base_score = params.base_score.value_or(std::log(prior / (1.0 - prior)));
  if (positives == 0.0 || positives == static_cast<double>(n)) {
    model.single_class = true;
    return model;
  }

  const SortedColumns sorted = Presort(x);
  const double lambda = params.l2_lambda;
  const std::size_t min_leaf = static_cast<std::size_t>(params.min_leaf);

  std::vector<double> score(n, model.base_score);
  std::vector<double> grad(n), hess(n);
  std::vector<int> node_of(n);
  model.trees.reserve(static_cast<std::size_t>(params.trees));
  model.train_log_loss.reserve(static_cast<std::size_t>(params.trees));

  for (int round = 0; round < params.trees; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = Sigmoid(score[i]);
      grad[i] = p - y[i];
      hess[i] = p * (1.0 - p);
    }
    Tree tree;
    std::fill(node_of.begin(), node_of.end(), 0);
    std::vector<int> frontier{0};

    for (int depth = 0; depth < params.max_depth && !frontier.empty(); ++depth) {
      const std::size_t slots = frontier.size();
      std::vector<int> slot_of(tree.nodes().size(), -1);
      for (std::size_t s = 0; s < slots; ++s) slot_of[static_cast<std::size_t>(frontier[s])] = static_cast<int>(s);

      std::vector<NodeStats> totals(slots);
      for (std::size_t i = 0; i < n; ++i) {
        const int s = slot_of[static_cast<std::size_t>(node_of[i])];
        if (s < 0) continue;
        auto& t = totals[static_cast<std::size_t>(s)];
        t.g += grad[i];
        t.h += hess[i];
        ++t.count;
      }

      std::vector<std::vector<SplitCandidate>> best(d, std::vector<SplitCandidate>(slots));
      ParallelFor(d, threads, [&](std::size_t j) {
        std::vector<NodeStats> missing(slots);
        for (std::size_t i : sorted.missing[j]) {
          const int s = slot_of[static_cast<std::size_t>(node_of[i])];
          if (s < 0) continue;
          auto& m = missing[static_cast<std::size_t>(s)];
          m.g += grad[i];
          m.h += hess[i];
          ++m.count;
        }
        std::vector<NodeStats> left(slots);
        std::vector<double> last(slots, 0.0);
        auto& out = best[j];
        for (std::size_t i : sorted.order[j]) {
          const int si = slot_of[static_cast<std::size_t>(node_of[i])];
          if (si < 0) continue;
          const auto s = static_cast<std::size_t>(si);
          const double v = x(i, j);
          NodeStats& l = left[s];
          if (l.count > 0 && v != last[s]) {
            const NodeStats& tot = totals[s];
            const NodeStats& mis = missing[s];
            const double parent = ScoreTerm(tot.g, tot.h, lambda);
            const double rg = tot.g - mis.g - l.g;
            const double rh = tot.h - mis.h - l.h;
            const std::size_t rc = tot.count - mis.count - l.count;
            // Missing rows to the left, then to the right.
            for (int side = 0; side < 2; ++side) {
              if (side == 1 && mis.count == 0) break;
              const bool miss_left = side == 0;
              const double lg = l.g + (miss_left ? mis.g : 0.0);
              const double lh = l.h + (miss_left ? mis.h : 0.0);
              const std::size_t lc = l.count + (miss_left ? mis.count : 0);
              const double rg2 = rg + (miss_left ? 0.0 : mis.g);
              const double rh2 = rh + (miss_left ? 0.0 : mis.h);
              const std::size_t rc2 = rc + (miss_left ? 0 : mis.count);
              if (lc < min_leaf || rc2 < min_leaf) continue;
              const double gain =
                  0.5 * (ScoreTerm(lg, lh, lambda) + ScoreTerm(rg2, rh2, lambda) - parent);
              if (gain > out[s].gain) {
                out[s] = {gain, SplitThreshold(last[s], v), miss_left, true};
              }
            }
          }
          l.g += grad[i];
          l.h += hess[i];
          ++l.count;
          last[s] = v;
        }
      });

      std::vector<int> next;
      std::vector<int> split_feature(slots, -1);
      std::vector<SplitCandidate> chosen(slots);
      for (std::size_t s = 0; s < slots; ++s) {
        for (std::size_t j = 0; j < d; ++j) {
          if (best[j][s].valid && best[j][s].gain > chosen[s].gain) {
            chosen[s] = best[j][s];
            split_feature[s] = static_cast<int>(j);
          }
        }
      }
      std::vector<int> left_child(slots, -1);
      for (std::size_t s = 0; s < slots; ++s) {
        if (split_feature[s] < 0) continue;
        left_child[s] = tree.split(frontier[s], split_feature[s], chosen[s].threshold,
                                   chosen[s].missing_left);
        next.push_back(left_child[s]);
        next.push_back(left_child[s] + 1);
      }
      if (next.empty()) break;
      for (std::size_t i = 0; i < n; ++i) {
        const int s = slot_of[static_cast<std::size_t>(node_of[i])];
        if (s < 0 || left_child[static_cast<std::size_t>(s)] < 0) continue;
        const auto& node = tree.node(node_of[i]);
        const double v = x(i, static_cast<std::size_t>(node.feature));
        const bool go_left = IsMissing(v) ? node.missing_left : v <= node.threshold;
        node_of[i] = go_left ? node.left : node.right;
      }
      frontier = std::move(next);
    }

    const std::size_t node_count = tree.nodes().size();
    std::vector<double> leaf_g(node_count, 0.0), leaf_h(node_count, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      leaf_g[static_cast<std::size_t>(node_of[i])] += grad[i];
      leaf_h[static_cast<std::size_t>(node_of[i])] += hess[i];
    }
    for (std::size_t k = 0; k < node_count; ++k) {
      TreeNode& node = tree.node(static_cast<int>(k));
      if (!node.is_leaf()) continue;
      const double denom = leaf_h[k] + lambda;
      node.value = denom > 0.0 ? -leaf_g[k] / denom : 0.0;
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      score[i] += params.learning_rate * tree.node(node_of[i]).value;
      loss += LogLossAt(Sigmoid(score[i]), y[i]);
    }
    model.train_log_loss.push_back(loss / static_cast<double>(n));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace leadrisk
