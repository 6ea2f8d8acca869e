#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "leadrisk/learner.h"

namespace leadrisk {

// Assignment of whole groups (parcels) to folds.
struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  std::map<std::string, int> assignment;

  int fold_of(const std::string& group) const;
  std::vector<int> row_folds(std::span<const std::string> groups) const;
  std::vector<std::size_t> group_counts() const;
};

// Distinct groups (sorted) are shuffled with the seed, then dealt round-robin.
// Throws when k < 2 or there are fewer distinct groups than k.
FoldPlan GroupedKFold(std::span<const std::string> groups, int k, std::uint64_t seed);

// Out-of-fold first-layer probabilities: cell (i, j) comes from spec j fitted
// on every fold except provenance(i, j).
struct OofMatrix {
  Matrix probabilities;
  std::vector<int> provenance;  // row-major n x m
  std::vector<ClassifierSpec> specs;
  std::vector<std::string> warnings;

  int provenance_at(std::size_t row, std::size_t spec) const {
    return provenance[row * specs.size() + spec];
  }
  std::vector<double> column(std::size_t spec) const;
};

struct OofOptions {
  int threads = 1;
  // Called once per (fold, spec) with the training-row indices of that fit.
  std::function<void(int fold, std::size_t spec, std::span<const std::size_t> train_rows)>
      observer;
};

// Per-fold encoders and models are fitted on training rows only. A fold whose
// training side has a single class gets the training prior and a warning.
OofMatrix OofPredict(std::span<const ClassifierSpec> specs, const Dataset& data,
                     const FoldPlan& plan, std::uint64_t seed, const OofOptions& options = {});

struct FoldMetric {
  int fold = 0;
  std::string model;
  std::size_t rows = 0;
  double log_loss = 0.0;
  double auc = 0.0;  // NaN when the fold holds one class
};

struct ModelSummary {
  std::string model;
  double pooled_auc = 0.0;
  double mean_fold_auc = 0.0;
  double sd_fold_auc = 0.0;
  double pooled_log_loss = 0.0;
  double mean_log_loss = 0.0;
  double sd_log_loss = 0.0;
};

struct CvResult {
  int folds = 0;
  std::vector<FoldMetric> per_fold;
  std::vector<ModelSummary> summary;

  // fold,model,rows,logloss,auc
  std::string per_fold_csv() const;
  // model,pooled_auc,mean_fold_auc,sd_fold_auc,pooled_logloss,mean_logloss,sd_logloss
  std::string summary_csv() const;
};

// Per-fold log loss / AUC and pooled-OOF AUC for each named prediction column.
CvResult EvaluateCv(std::span<const std::string> names,
                    std::span<const std::vector<double>> predictions, std::span<const int> labels,
                    std::span<const int> row_folds, int k);

// Display name per spec: the kind name, suffixed with an index when repeated.
std::vector<std::string> SpecNames(std::span<const ClassifierSpec> specs);

struct StackedModel {
  FeatureSchema schema;
  std::vector<ClassifierSpec> specs;
  ClassifierSpec meta_spec;
  std::vector<FittedModel> first_layer;
  FittedModel meta;
  int folds = 0;
  std::uint64_t seed = 0;

  std::uint64_t schema_hash() const { return schema.hash(); }

  std::vector<double> first_layer_outputs(std::span<const double> ordinal_row) const;
  double predict(std::span<const double> ordinal_row) const;

  nlohmann::json to_json() const;
  // Throws Error(kModelCompat) on a wrong format/version or a schema hash that
  // does not match the embedded schema.
  static StackedModel FromJson(const nlohmann::json& j);
  static StackedModel Load(const std::string& path);
  void Save(const std::string& path) const;
};

// Final probability for a row encoded under `schema`; throws Error(kModelCompat)
// when the schema hash differs from the model's.
double PredictStack(const StackedModel& model, const FeatureSchema& schema,
                    std::span<const double> ordinal_row);

struct StackResult {
  StackedModel model;
  OofMatrix oof;
  // Out-of-fold second-layer predictions: the meta learner refitted per fold on
  // the other folds' OOF rows, using the same plan.
  std::vector<double> ensemble_oof;
  CvResult cv;
};

StackResult FitStack(const Dataset& data, std::span<const ClassifierSpec> specs,
                     const ClassifierSpec& meta_spec, const FoldPlan& plan, std::uint64_t seed,
                     int threads = 1);

// Meta-learner input: one numeric feature per first-layer spec.
Dataset MetaDataset(const OofMatrix& oof, const Dataset& data);

struct GridScore {
  ClassifierSpec spec;
  double mean_log_loss = 0.0;
};

struct SelectionResult {
  std::map<LearnerKind, ClassifierSpec> best;
  std::vector<GridScore> scores;
};

// For each kind, the grid point with the lowest mean per-fold OOF log loss.
// Ties prefer fewer trees, then stronger regularization, then the smaller
// label() in lexicographic order.
SelectionResult SelectHyperparams(std::span<const ClassifierSpec> grid, const Dataset& data,
                                  const FoldPlan& plan, std::uint64_t seed, int threads = 1);

}  // namespace leadrisk
