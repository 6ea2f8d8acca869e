#include "leadrisk/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "leadrisk/csv.h"
#include "leadrisk/error.h"
#include "leadrisk/parallel.h"
#include "leadrisk/rng.h"

namespace leadrisk {
namespace {

constexpr std::uint64_t kCalibrationStream = 0x63616c6962ULL;
constexpr std::uint64_t kLearningStream = 0x6c63757276ULL;

void CheckBinary(std::span<const double> scores, std::span<const int> labels, const char* what) {
  Require(scores.size() == labels.size(), std::string(what) + ": length mismatch");
  for (int y : labels) Require(y == 0 || y == 1, std::string(what) + ": labels must be 0/1");
}

}  // namespace

double Auc(std::span<const double> scores, std::span<const int> labels) {
  CheckBinary(scores, labels, "auc");
  const std::size_t n = scores.size();
  for (double s : scores) Require(!std::isnan(s), "auc: NaN score", ErrorKind::kData);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1 .. j
    for (std::size_t t = i; t < j; ++t)
      if (labels[order[t]] == 1) {
        pos_rank_sum += avg_rank;
        ++pos;
      }
    i = j;
  }
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0)
    Fail(ErrorKind::kData, "auc: both classes must be present (" + std::to_string(pos) +
                               " positive, " + std::to_string(neg) + " negative)");
  const double p = static_cast<double>(pos);
  return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

double LogLoss(std::span<const double> probabilities, std::span<const int> labels) {
  CheckBinary(probabilities, labels, "log_loss");
  Require(!labels.empty(), "log_loss: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(probabilities[i], kLogLossClip, 1.0 - kLogLossClip);
    sum += labels[i] == 1 ? std::log(p) : std::log1p(-p);
  }
  return -sum / static_cast<double>(labels.size());
}

RocCurve RocPoints(std::span<const double> scores, std::span<const int> labels) {
  CheckBinary(scores, labels, "roc_points");
  const std::size_t n = scores.size();
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) Fail(ErrorKind::kData, "roc_points: both classes must be present");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? tp : fp) += 1;
      ++j;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                            static_cast<double>(tp) / static_cast<double>(pos), scores[order[i]]});
    i = j;
  }
  return curve;
}

double RocCurve::trapezoid_area() const {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& a = points[i - 1];
    const auto& b = points[i];
    area += (b.false_positive_rate - a.false_positive_rate) *
            (a.true_positive_rate + b.true_positive_rate) / 2.0;
  }
  return area;
}

std::string RocCurve::to_csv() const {
  std::ostringstream os;
  os << "fpr,tpr,threshold\n";
  for (const auto& p : points)
    WriteCsvRow(os, {FormatDouble(p.false_positive_rate), FormatDouble(p.true_positive_rate),
                     FormatDouble(p.threshold)});
  return os.str();
}

double Percentile(std::vector<double> values, double q) {
  Require(!values.empty(), "percentile: empty sample");
  Require(q >= 0.0 && q <= 100.0, "percentile: q must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

double Mean(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double StdDev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = Mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

CalibrationCurve ComputeCalibration(std::span<const double> probabilities,
                                    std::span<const int> labels, int n_bins, int replicates,
                                    std::uint64_t seed) {
  CheckBinary(probabilities, labels, "calibration_curve");
  Require(n_bins >= 2, "calibration_curve: n_bins must be >= 2");
  Require(replicates >= 1, "calibration_curve: B must be >= 1");
  const auto nb = static_cast<std::size_t>(n_bins);
  std::vector<std::vector<std::size_t>> members(nb);
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities[i];
    Require(p >= 0.0 && p <= 1.0, "calibration_curve: probability outside [0, 1]", ErrorKind::kData);
    const auto b = std::min(static_cast<std::size_t>(p * static_cast<double>(n_bins)), nb - 1);
    members[b].push_back(i);
  }
  CalibrationCurve curve;
  curve.bootstrap_replicates = replicates;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t b = 0; b < nb; ++b) {
    CalibrationBin bin;
    bin.lower = static_cast<double>(b) / static_cast<double>(n_bins);
    bin.upper = static_cast<double>(b + 1) / static_cast<double>(n_bins);
    const auto& idx = members[b];
    bin.count = idx.size();
    if (idx.empty()) {
      bin.mean_predicted = bin.fraction_positive = nan;
      bin.ci_low = 0.0;
      bin.ci_high = 1.0;
      bin.wide = true;
      curve.bins.push_back(bin);
      continue;
    }
    double sp = 0.0;
    double sy = 0.0;
    for (std::size_t i : idx) {
      sp += probabilities[i];
      sy += labels[i];
    }
    const double cnt = static_cast<double>(idx.size());
    bin.mean_predicted = sp / cnt;
    bin.fraction_positive = sy / cnt;
    if (idx.size() < 2) {
      bin.ci_low = 0.0;
      bin.ci_high = 1.0;
      bin.wide = true;
    } else {
      Rng rng = MakeRng(seed, kCalibrationStream, b);
      std::uniform_int_distribution<std::size_t> pick(0, idx.size() - 1);
      std::vector<double> fractions(static_cast<std::size_t>(replicates));
      for (auto& f : fractions) {
        double pos = 0.0;
        for (std::size_t t = 0; t < idx.size(); ++t) pos += labels[idx[pick(rng)]];
        f = pos / cnt;
      }
      bin.ci_low = std::min(Percentile(fractions, 2.5), bin.fraction_positive);
      bin.ci_high = std::max(Percentile(fractions, 97.5), bin.fraction_positive);
    }
    curve.bins.push_back(bin);
  }
  return curve;
}

double CalibrationCurve::max_deviation() const {
  double worst = 0.0;
  for (const auto& b : bins)
    if (b.count > 0) worst = std::max(worst, std::abs(b.fraction_positive - b.mean_predicted));
  return worst;
}

std::string CalibrationCurve::to_csv() const {
  std::ostringstream os;
  os << "bin_lower,bin_upper,count,mean_predicted,fraction_positive,ci_low,ci_high,wide\n";
  for (const auto& b : bins)
    WriteCsvRow(os, {FormatDouble(b.lower), FormatDouble(b.upper), std::to_string(b.count),
                     FormatDouble(b.mean_predicted), FormatDouble(b.fraction_positive),
                     FormatDouble(b.ci_low), FormatDouble(b.ci_high), b.wide ? "1" : "0"});
  return os.str();
}

std::vector<LearningCurvePoint> LearningCurve(const ClassifierSpec& spec, const Dataset& data,
                                              const LearningCurveOptions& options) {
  spec.validate();
  Require(options.replicates >= 1, "learning_curve: B must be >= 1");
  Require(options.validation_fraction > 0.0 && options.validation_fraction < 1.0,
          "learning_curve: validation_fraction must lie in (0, 1)");

  std::map<std::string, std::vector<std::size_t>> by_group;
  for (std::size_t i = 0; i < data.size(); ++i) by_group[data.groups[i]].push_back(i);
  std::vector<const std::vector<std::size_t>*> groups;
  for (const auto& [g, rows] : by_group) groups.push_back(&rows);
  Rng rng = MakeRng(options.seed, kLearningStream);
  for (std::size_t i = groups.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(groups[i - 1], groups[pick(rng)]);
  }
  const double target = options.validation_fraction * static_cast<double>(data.size());
  std::vector<std::size_t> validation;
  std::vector<const std::vector<std::size_t>*> pool;
  std::size_t pool_rows = 0;
  for (const auto* g : groups) {
    if (static_cast<double>(validation.size()) < target) {
      validation.insert(validation.end(), g->begin(), g->end());
    } else {
      pool.push_back(g);
      pool_rows += g->size();
    }
  }
  std::sort(validation.begin(), validation.end());
  const Dataset val = data.subset(validation);
  const auto val_pos = val.positives();
  Require(val_pos > 0 && val_pos < val.size(),
          "learning_curve: validation split holds a single class", ErrorKind::kData);
  for (std::size_t s : options.sizes)
    Require(s >= 1 && s <= pool_rows, "learning_curve: size " + std::to_string(s) +
                                          " exceeds the training pool of " +
                                          std::to_string(pool_rows) + " rows");

  const std::size_t reps = static_cast<std::size_t>(options.replicates);
  const std::size_t tasks = options.sizes.size() * reps;
  std::vector<double> aucs(tasks);
  ParallelFor(tasks, options.threads, [&](std::size_t t) {
    const std::size_t si = t / reps;
    const std::size_t b = t % reps;
    const std::size_t size = options.sizes[si];
    Rng r = MakeRng(options.seed, kLearningStream + 1 + si, b);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::vector<std::size_t> rows;
    while (rows.size() < size) {
      const auto* g = pool[pick(r)];
      rows.insert(rows.end(), g->begin(), g->end());
    }
    rows.resize(size);
    const FittedModel model = Fit(spec, data.subset(rows), DeriveSeed(options.seed, si, b), 1);
    aucs[t] = Auc(model.predict(val.rows), val.labels);
  });

  std::vector<LearningCurvePoint> out;
  for (std::size_t si = 0; si < options.sizes.size(); ++si) {
    std::span<const double> slice(aucs.data() + si * reps, reps);
    out.push_back({options.sizes[si], Mean(slice), StdDev(slice), options.replicates});
  }
  return out;
}

void SortImportance(std::vector<ImportanceEntry>& entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.delta != b.delta) return a.delta > b.delta;
    return a.feature < b.feature;
  });
}

std::string ImportanceReport::to_csv() const {
  std::ostringstream os;
  os << "rank,feature,auc_drop,auc_with_all,auc_without\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    WriteCsvRow(os, {std::to_string(i + 1), e.feature, FormatDouble(e.delta),
                     FormatDouble(e.auc_with_all), FormatDouble(e.auc_without)});
  }
  return os.str();
}

ImportanceReport DropOneImportance(const ClassifierSpec& spec, const Dataset& data,
                                   const FoldPlan& plan, std::uint64_t seed, int threads) {
  Require(data.schema.size() >= 2, "drop_one_importance: need at least two features");
  const ClassifierSpec specs[] = {spec};
  OofOptions opts;
  opts.threads = threads;
  const double baseline = Auc(OofPredict(specs, data, plan, seed, opts).column(0), data.labels);

  const std::size_t d = data.schema.size();
  std::vector<double> without(d);
  ParallelFor(d, threads, [&](std::size_t j) {
    const Dataset reduced = data.without_feature(j);
    without[j] = Auc(OofPredict(specs, reduced, plan, seed).column(0), data.labels);
  });
  ImportanceReport report;
  for (std::size_t j = 0; j < d; ++j)
    report.entries.push_back(
        {data.schema.feature(j).name, baseline, without[j], baseline - without[j]});
  SortImportance(report.entries);
  return report;
}

}  // namespace leadrisk
