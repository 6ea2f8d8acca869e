#include "leadrisk/pipeline.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "leadrisk/csv.h"
#include "leadrisk/error.h"
#include "leadrisk/metrics.h"
#include "leadrisk/parallel.h"
#include "leadrisk/rng.h"

namespace leadrisk {
namespace {

constexpr std::string_view kFormat = "leadrisk-stacked-model";
constexpr int kFormatVersion = 1;
constexpr std::uint64_t kFoldStream = 0x6b666f6c64ULL;
constexpr std::uint64_t kDeployStream = 0x6465706c6f79ULL;
constexpr std::uint64_t kMetaStream = 0x6d657461ULL;

std::string HashHex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

struct FoldRows {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

std::vector<FoldRows> SplitRows(std::span<const int> row_folds, int k) {
  std::vector<FoldRows> out(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < row_folds.size(); ++i) {
    for (int f = 0; f < k; ++f) {
      auto& bucket = row_folds[i] == f ? out[static_cast<std::size_t>(f)].test
                                       : out[static_cast<std::size_t>(f)].train;
      bucket.push_back(i);
    }
  }
  return out;
}

// Per-fold fit that degrades to the training prior when the training side
// cannot support the learner (a class too small for LDA, fewer rows than k).
FittedModel FitFold(const ClassifierSpec& spec, const Dataset& train, std::uint64_t seed,
                    int fold, std::vector<std::string>& warnings) {
  try {
    FittedModel m = Fit(spec, train, seed, 1);
    for (const auto& w : m.warnings) warnings.push_back("fold " + std::to_string(fold) + ": " + w);
    return m;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kData) throw;
    FittedModel m;
    m.spec = spec;
    m.n_features = train.schema.size();
    const double prior = train.size() == 0 ? 0.5
                                           : static_cast<double>(train.positives()) /
                                                 static_cast<double>(train.size());
    m.model = ConstantModel{std::clamp(prior, 1e-6, 1.0 - 1e-6)};
    warnings.push_back("fold " + std::to_string(fold) + ": " + spec.label() + ": " + e.what() +
                       "; predicting training prior");
    return m;
  }
}

double SpecTrees(const ClassifierSpec& s) {
  auto v = s.find("trees");
  return v ? *v : 0.0;
}

double SpecRegularization(const ClassifierSpec& s) {
  double r = 0.0;
  if (auto v = s.find("l1_strength")) r += *v;
  if (auto v = s.find("l2_lambda")) r += *v;
  if (auto v = s.find("max_depth")) r -= *v;
  if (auto v = s.find("k_neighbors")) r += *v;
  return r;
}

}  // namespace

int FoldPlan::fold_of(const std::string& group) const {
  auto it = assignment.find(group);
  if (it == assignment.end()) Fail(ErrorKind::kData, "fold plan: unknown group '" + group + "'");
  return it->second;
}

std::vector<int> FoldPlan::row_folds(std::span<const std::string> groups) const {
  std::vector<int> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(fold_of(g));
  return out;
}

std::vector<std::size_t> FoldPlan::group_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(k, 0)), 0);
  for (const auto& [g, f] : assignment) ++counts.at(static_cast<std::size_t>(f));
  return counts;
}

FoldPlan GroupedKFold(std::span<const std::string> groups, int k, std::uint64_t seed) {
  Require(k >= 2, "grouped_kfold: k must be >= 2 (got " + std::to_string(k) + ")");
  std::vector<std::string> distinct(groups.begin(), groups.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  Require(distinct.size() >= static_cast<std::size_t>(k),
          "grouped_kfold: " + std::to_string(distinct.size()) + " distinct groups for k = " +
              std::to_string(k),
          ErrorKind::kData);
  Rng rng = MakeRng(seed, kFoldStream);
  for (std::size_t i = distinct.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(distinct[i - 1], distinct[pick(rng)]);
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  for (std::size_t i = 0; i < distinct.size(); ++i)
    plan.assignment.emplace(distinct[i], static_cast<int>(i % static_cast<std::size_t>(k)));
  return plan;
}

std::vector<double> OofMatrix::column(std::size_t spec) const {
  std::vector<double> out(probabilities.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = probabilities(i, spec);
  return out;
}

OofMatrix OofPredict(std::span<const ClassifierSpec> specs, const Dataset& data,
                     const FoldPlan& plan, std::uint64_t seed, const OofOptions& options) {
  Require(!specs.empty(), "oof_predict: no specs");
  data.validate();
  for (const auto& s : specs) s.validate();
  const std::size_t n = data.size();
  const std::size_t m = specs.size();
  const std::vector<int> row_folds = plan.row_folds(data.groups);
  const auto split = SplitRows(row_folds, plan.k);

  OofMatrix out;
  out.specs.assign(specs.begin(), specs.end());
  out.probabilities = Matrix(n, m, std::numeric_limits<double>::quiet_NaN());
  out.provenance.assign(n * m, -1);

  const std::size_t tasks = static_cast<std::size_t>(plan.k) * m;
  std::vector<std::vector<std::string>> task_warnings(tasks);
  ParallelFor(tasks, options.threads, [&](std::size_t t) {
    const int f = static_cast<int>(t / m);
    const std::size_t j = t % m;
    const auto& rows = split[static_cast<std::size_t>(f)];
    if (rows.test.empty()) return;
    if (options.observer) options.observer(f, j, rows.train);
    const Dataset train = data.subset(rows.train);
    const FittedModel model =
        FitFold(specs[j], train, DeriveSeed(seed, static_cast<std::uint64_t>(f), j), f,
                task_warnings[t]);
    for (std::size_t i : rows.test) {
      out.probabilities(i, j) = model.predict(data.rows.row(i));
      out.provenance[i * m + j] = f;
    }
  });
  for (auto& w : task_warnings) out.warnings.insert(out.warnings.end(), w.begin(), w.end());
  return out;
}

std::vector<std::string> SpecNames(std::span<const ClassifierSpec> specs) {
  std::map<LearnerKind, int> total;
  for (const auto& s : specs) ++total[s.kind];
  std::map<LearnerKind, int> seen;
  std::vector<std::string> names;
  for (const auto& s : specs) {
    std::string name(LearnerKindName(s.kind));
    if (total[s.kind] > 1) name += "_" + std::to_string(++seen[s.kind]);
    names.push_back(std::move(name));
  }
  return names;
}

CvResult EvaluateCv(std::span<const std::string> names,
                    std::span<const std::vector<double>> predictions, std::span<const int> labels,
                    std::span<const int> row_folds, int k) {
  Require(names.size() == predictions.size(), "evaluate_cv: names/predictions mismatch");
  Require(row_folds.size() == labels.size(), "evaluate_cv: fold/label length mismatch");
  CvResult result;
  result.folds = k;
  const auto split = SplitRows(row_folds, k);
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto& pred = predictions[j];
    Require(pred.size() == labels.size(), "evaluate_cv: prediction length mismatch");
    std::vector<double> fold_ll;
    std::vector<double> fold_auc;
    for (int f = 0; f < k; ++f) {
      const auto& idx = split[static_cast<std::size_t>(f)].test;
      if (idx.empty()) continue;
      std::vector<double> p;
      std::vector<int> y;
      for (std::size_t i : idx) {
        p.push_back(pred[i]);
        y.push_back(labels[i]);
      }
      FoldMetric fm;
      fm.fold = f;
      fm.model = names[j];
      fm.rows = idx.size();
      fm.log_loss = LogLoss(p, y);
      const auto pos = std::count(y.begin(), y.end(), 1);
      fm.auc = (pos == 0 || pos == static_cast<long>(y.size()))
                   ? std::numeric_limits<double>::quiet_NaN()
                   : Auc(p, y);
      fold_ll.push_back(fm.log_loss);
      if (!std::isnan(fm.auc)) fold_auc.push_back(fm.auc);
      result.per_fold.push_back(std::move(fm));
    }
    ModelSummary s;
    s.model = names[j];
    s.pooled_auc = Auc(pred, labels);
    s.pooled_log_loss = LogLoss(pred, labels);
    s.mean_log_loss = Mean(fold_ll);
    s.sd_log_loss = StdDev(fold_ll);
    s.mean_fold_auc = fold_auc.empty() ? std::numeric_limits<double>::quiet_NaN() : Mean(fold_auc);
    s.sd_fold_auc = StdDev(fold_auc);
    result.summary.push_back(std::move(s));
  }
  return result;
}

std::string CvResult::per_fold_csv() const {
  std::ostringstream os;
  os << "fold,model,rows,logloss,auc\n";
  for (const auto& f : per_fold)
    WriteCsvRow(os, {std::to_string(f.fold), f.model, std::to_string(f.rows),
                     FormatDouble(f.log_loss), FormatDouble(f.auc)});
  return os.str();
}

std::string CvResult::summary_csv() const {
  std::ostringstream os;
  os << "model,pooled_auc,mean_fold_auc,sd_fold_auc,pooled_logloss,mean_logloss,sd_logloss\n";
  for (const auto& s : summary)
    WriteCsvRow(os, {s.model, FormatDouble(s.pooled_auc), FormatDouble(s.mean_fold_auc),
                     FormatDouble(s.sd_fold_auc), FormatDouble(s.pooled_log_loss),
                     FormatDouble(s.mean_log_loss), FormatDouble(s.sd_log_loss)});
  return os.str();
}

Dataset MetaDataset(const OofMatrix& oof, const Dataset& data) {
  Require(oof.probabilities.rows() == data.size(), "meta_dataset: row count mismatch");
  std::vector<FeatureDef> defs;
  for (const auto& name : SpecNames(oof.specs)) defs.push_back({"p_" + name, ColumnKind::kNumeric, {}});
  Dataset meta;
  meta.schema = FeatureSchema(std::move(defs));
  meta.rows = oof.probabilities;
  meta.labels = data.labels;
  meta.groups = data.groups;
  meta.lead_ppb = data.lead_ppb;
  return meta;
}

std::vector<double> StackedModel::first_layer_outputs(std::span<const double> ordinal_row) const {
  std::vector<double> out;
  out.reserve(first_layer.size());
  for (const auto& m : first_layer) out.push_back(m.predict(ordinal_row));
  return out;
}

double StackedModel::predict(std::span<const double> ordinal_row) const {
  const auto layer = first_layer_outputs(ordinal_row);
  return meta.predict(layer);
}

nlohmann::json StackedModel::to_json() const {
  nlohmann::json specs_json = nlohmann::json::array();
  for (const auto& s : specs) specs_json.push_back(s.to_json());
  nlohmann::json layer = nlohmann::json::array();
  for (const auto& m : first_layer) layer.push_back(m.to_json());
  return {{"format", kFormat},
          {"version", kFormatVersion},
          {"schema_hash", HashHex(schema_hash())},
          {"schema", schema.to_json()},
          {"specs", specs_json},
          {"meta_spec", meta_spec.to_json()},
          {"first_layer", layer},
          {"meta", meta.to_json()},
          {"folds", folds},
          {"seed", seed},
          {"metadata",
           {{"meta_inputs", "out-of-fold first-layer probabilities only"},
            {"deployment_first_layer", "full-data refit"},
            {"tree_categoricals", "ordinal threshold splits on category codes"},
            {"linear_and_knn_inputs", "one-hot categoricals, median-imputed standardized numerics"},
            {"gbt_defaults", "learning_rate 0.1, l2_lambda 1"},
            {"forest_leaves", "laplace-smoothed class fraction"}}}};
}

StackedModel StackedModel::FromJson(const nlohmann::json& j) {
  try {
    if (!j.is_object() || j.value("format", std::string{}) != kFormat)
      Fail(ErrorKind::kModelCompat, "not a stacked model document");
    const int version = j.at("version").get<int>();
    if (version != kFormatVersion)
      Fail(ErrorKind::kModelCompat, "unsupported model format version " + std::to_string(version));
    StackedModel m;
    m.schema = FeatureSchema::FromJson(j.at("schema"));
    if (j.at("schema_hash").get<std::string>() != HashHex(m.schema_hash()))
      Fail(ErrorKind::kModelCompat, "schema hash does not match embedded schema");
    for (const auto& s : j.at("specs")) m.specs.push_back(ClassifierSpec::FromJson(s));
    m.meta_spec = ClassifierSpec::FromJson(j.at("meta_spec"));
    for (const auto& f : j.at("first_layer")) m.first_layer.push_back(FittedModel::FromJson(f));
    m.meta = FittedModel::FromJson(j.at("meta"));
    m.folds = j.at("folds").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    if (m.first_layer.size() != m.specs.size() || m.meta.n_features != m.specs.size())
      Fail(ErrorKind::kModelCompat, "first layer / meta width mismatch");
    for (const auto& f : m.first_layer)
      if (f.n_features != m.schema.size())
        Fail(ErrorKind::kModelCompat, "first-layer model width does not match schema");
    return m;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kModelCompat, std::string("malformed model document: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kModelCompat) throw;
    Fail(ErrorKind::kModelCompat, std::string("malformed model document: ") + e.what());
  }
}

StackedModel StackedModel::Load(const std::string& path) {
  const std::string text = ReadTextFile(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kModelCompat, path + ": invalid JSON: " + e.what());
  }
  return FromJson(j);
}

void StackedModel::Save(const std::string& path) const { WriteTextFile(path, to_json().dump(1) + "\n"); }

double PredictStack(const StackedModel& model, const FeatureSchema& schema,
                    std::span<const double> ordinal_row) {
  if (schema.hash() != model.schema_hash())
    Fail(ErrorKind::kModelCompat, "schema hash " + HashHex(schema.hash()) +
                                      " does not match model schema " +
                                      HashHex(model.schema_hash()));
  return model.predict(ordinal_row);
}

StackResult FitStack(const Dataset& data, std::span<const ClassifierSpec> specs,
                     const ClassifierSpec& meta_spec, const FoldPlan& plan, std::uint64_t seed,
                     int threads) {
  meta_spec.validate();
  StackResult r;
  OofOptions opts;
  opts.threads = threads;
  r.oof = OofPredict(specs, data, plan, seed, opts);
  const Dataset meta_data = MetaDataset(r.oof, data);

  StackedModel& model = r.model;
  model.schema = data.schema;
  model.specs.assign(specs.begin(), specs.end());
  model.meta_spec = meta_spec;
  model.folds = plan.k;
  model.seed = seed;
  model.first_layer.resize(specs.size());
  for (std::size_t j = 0; j < specs.size(); ++j)
    model.first_layer[j] = Fit(specs[j], data, DeriveSeed(seed, kDeployStream, j), threads);
  model.meta = Fit(meta_spec, meta_data, DeriveSeed(seed, kMetaStream), threads);

  const std::vector<int> row_folds = plan.row_folds(data.groups);
  const auto split = SplitRows(row_folds, plan.k);
  r.ensemble_oof.assign(data.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<std::vector<std::string>> fold_warnings(static_cast<std::size_t>(plan.k));
  ParallelFor(static_cast<std::size_t>(plan.k), threads, [&](std::size_t f) {
    const auto& rows = split[f];
    if (rows.test.empty()) return;
    const FittedModel m = FitFold(meta_spec, meta_data.subset(rows.train),
                                  DeriveSeed(seed, kMetaStream, f + 1), static_cast<int>(f),
                                  fold_warnings[f]);
    for (std::size_t i : rows.test) r.ensemble_oof[i] = m.predict(meta_data.rows.row(i));
  });
  for (auto& w : fold_warnings)
    for (auto& s : w) r.oof.warnings.push_back("meta " + s);

  std::vector<std::string> names = SpecNames(specs);
  std::vector<std::vector<double>> columns;
  for (std::size_t j = 0; j < specs.size(); ++j) columns.push_back(r.oof.column(j));
  names.push_back("ensemble");
  columns.push_back(r.ensemble_oof);
  r.cv = EvaluateCv(names, columns, data.labels, row_folds, plan.k);
  return r;
}

SelectionResult SelectHyperparams(std::span<const ClassifierSpec> grid, const Dataset& data,
                                  const FoldPlan& plan, std::uint64_t seed, int threads) {
  Require(!grid.empty(), "select_hyperparams: empty grid");
  SelectionResult result;
  const std::vector<int> row_folds = plan.row_folds(data.groups);
  const auto split = SplitRows(row_folds, plan.k);
  for (const auto& spec : grid) {
    const ClassifierSpec one[] = {spec};
    OofOptions opts;
    opts.threads = threads;
    const OofMatrix oof = OofPredict(one, data, plan, seed, opts);
    std::vector<double> fold_ll;
    for (const auto& rows : split) {
      if (rows.test.empty()) continue;
      std::vector<double> p;
      std::vector<int> y;
      for (std::size_t i : rows.test) {
        p.push_back(oof.probabilities(i, 0));
        y.push_back(data.labels[i]);
      }
      fold_ll.push_back(LogLoss(p, y));
    }
    result.scores.push_back({spec, Mean(fold_ll)});
  }
  for (const auto& score : result.scores) {
    auto it = result.best.find(score.spec.kind);
    if (it == result.best.end()) {
      result.best.emplace(score.spec.kind, score.spec);
      continue;
    }
    const auto& cur = *std::find_if(result.scores.begin(), result.scores.end(),
                                    [&](const GridScore& g) { return g.spec == it->second; });
    const double a = score.mean_log_loss;
    const double b = cur.mean_log_loss;
    bool better = false;
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(b))) {
      better = a < b;
    } else if (SpecTrees(score.spec) != SpecTrees(cur.spec)) {
      better = SpecTrees(score.spec) < SpecTrees(cur.spec);
    } else if (SpecRegularization(score.spec) != SpecRegularization(cur.spec)) {
      better = SpecRegularization(score.spec) > SpecRegularization(cur.spec);
    } else {
      better = score.spec.label() < cur.spec.label();
    }
    if (better) it->second = score.spec;
  }
  return result;
}

}  // namespace leadrisk
