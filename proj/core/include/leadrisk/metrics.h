#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "leadrisk/learner.h"
#include "leadrisk/pipeline.h"

namespace leadrisk {

inline constexpr double kLogLossClip = 1e-15;

// Mann-Whitney AUC from average ranks; ties count one half.
// Throws Error(kData) unless both classes are present.
double Auc(std::span<const double> scores, std::span<const int> labels);

// Negative mean Bernoulli log-likelihood with p clipped to [1e-15, 1 - 1e-15].
double LogLoss(std::span<const double> probabilities, std::span<const int> labels);

struct RocPoint {
  double false_positive_rate = 0.0;
  double true_positive_rate = 0.0;
  double threshold = 0.0;  // +inf for the (0, 0) origin
};

struct RocCurve {
  std::vector<RocPoint> points;

  double trapezoid_area() const;
  std::string to_csv() const;  // fpr,tpr,threshold
};

// One point per distinct score, scanning scores from high to low.
RocCurve RocPoints(std::span<const double> scores, std::span<const int> labels);

struct CalibrationBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double mean_predicted = 0.0;     // NaN when count == 0
  double fraction_positive = 0.0;  // NaN when count == 0
  double ci_low = 0.0;
  double ci_high = 0.0;
  // Fewer than two samples: the interval is reported as [0, 1].
  bool wide = false;
};

struct CalibrationCurve {
  std::vector<CalibrationBin> bins;
  int bootstrap_replicates = 0;

  // Largest |fraction_positive - mean_predicted| over non-empty bins.
  double max_deviation() const;
  std::string to_csv() const;
};

// Equal-width bins over [0, 1]; 95% percentile bootstrap interval per bin from
// B resamples drawn within the bin.
CalibrationCurve ComputeCalibration(std::span<const double> probabilities,
                                    std::span<const int> labels, int n_bins, int replicates,
                                    std::uint64_t seed);

// Linear-interpolation percentile (q in [0, 100]) of an unsorted sample.
double Percentile(std::vector<double> values, double q);

double Mean(std::span<const double> values);
// Sample standard deviation (n - 1); 0 for fewer than two values.
double StdDev(std::span<const double> values);

struct LearningCurvePoint {
  std::size_t size = 0;
  double mean_auc = 0.0;
  double sd_auc = 0.0;
  int replicates = 0;
};

struct LearningCurveOptions {
  std::vector<std::size_t> sizes;
  int replicates = 400;
  double validation_fraction = 0.25;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Groups are split once into a training pool and a validation set; for each
// size, B bootstrap draws of training groups (truncated to exactly `size`
// rows) are fitted and scored by AUC on the fixed validation set.
std::vector<LearningCurvePoint> LearningCurve(const ClassifierSpec& spec, const Dataset& data,
                                              const LearningCurveOptions& options);

struct ImportanceEntry {
  std::string feature;
  double auc_with_all = 0.0;
  double auc_without = 0.0;
  double delta = 0.0;
};

struct ImportanceReport {
  std::vector<ImportanceEntry> entries;  // delta descending, ties by name

  std::string to_csv() const;  // rank,feature,auc_drop,auc_with_all,auc_without
};

// Orders entries by delta descending, breaking ties alphabetically.
void SortImportance(std::vector<ImportanceEntry>& entries);

// Pooled-OOF AUC with every feature versus with each raw feature removed,
// reusing the same fold plan and seed for every refit.
ImportanceReport DropOneImportance(const ClassifierSpec& spec, const Dataset& data,
                                   const FoldPlan& plan, std::uint64_t seed, int threads = 1);

}  // namespace leadrisk
