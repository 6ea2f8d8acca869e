// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commands.h"
#include "leadrisk/csv.h"
#include "leadrisk/features.h"
#include "leadrisk/gbt.h"
#include "leadrisk/ingest.h"
#include "leadrisk/lda.h"
#include "leadrisk/learner.h"
#include "leadrisk/logreg.h"
#include "leadrisk/metrics.h"
#include "leadrisk/pipeline.h"
#include "leadrisk/synth.h"

namespace fs = std::filesystem;
using namespace leadrisk;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void Report(int id, const std::string& name, const std::function<Outcome()>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %2d  %-34s %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), Seconds(t0));
  std::fflush(stdout);
}

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

fs::path MakeTempDir(const std::string& tag) {
  std::string tmpl = (fs::temp_directory_path() / ("leadrisk_" + tag + "_XXXXXX")).string();
  if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  return tmpl;
}

// Scores drawn from a small value set so that ties are common.
void RandomInstance(std::mt19937_64& rng, std::size_t n, std::vector<double>& s,
                    std::vector<int>& y) {
  std::uniform_int_distribution<int> level(0, 9);
  std::bernoulli_distribution coin(0.4);
  do {
    s.assign(n, 0.0);
    y.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = level(rng) / 10.0;
      y[i] = coin(rng) ? 1 : 0;
    }
  } while (std::count(y.begin(), y.end(), 1) == 0 || std::count(y.begin(), y.end(), 0) == 0);
}

double PairwiseAuc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1.0;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return wins / pairs;
}

// --- the synthetic city shared by criteria 7, 8 and 14 ---

struct City {
  GroundTruth truth;
  Dataset data;
  double seconds = 0.0;
};

const City& SyntheticCity() {
  static const City city = [] {
    const auto t0 = Clock::now();
    GeneratorConfig g;
    g.n_parcels = 4000;
    g.seed = 7;
    const SynthOutput s = Generate(g);
    auto parcels = ParseParcels(s.parcels_csv).parcels;
    AttachServiceLines(parcels, ParseServiceLines(ParseCsv(s.service_lines_csv)).records);
    AssignHydrants(parcels, ParseHydrants(ParseCsv(s.hydrants_csv)).hydrants);
    const auto tests = ParseTests(s.tests_csv).tests;
    const auto match = MatchTestsToParcels(tests, parcels);
    City c;
    c.truth = s.truth;
    c.data = AssembleDataset(match.matches, tests, parcels, BuildSchema(parcels)).dataset;
    c.seconds = Seconds(t0);
    return c;
  }();
  return city;
}

std::vector<ClassifierSpec> ReducedSpecs() {
  return {ClassifierSpec::Default(LearnerKind::kGbt).with("trees", 100).with("max_depth", 3),
          ClassifierSpec::Default(LearnerKind::kRandomForest).with("trees", 100),
          ClassifierSpec::Default(LearnerKind::kExtraTrees).with("trees", 100),
          ClassifierSpec::Default(LearnerKind::kLogRegL1),
          ClassifierSpec::Default(LearnerKind::kKnn),
          ClassifierSpec::Default(LearnerKind::kLda)};
}

ClassifierSpec ReducedMeta() {
  return ClassifierSpec::Default(LearnerKind::kGbt)
      .with("trees", 100)
      .with("max_depth", 2)
      .with("learning_rate", 0.05)
      .with("min_leaf", 100)
      .with("l2_lambda", 10);
}

const StackResult& CityStack() {
  static const StackResult r = [] {
    const City& c = SyntheticCity();
    const auto specs = ReducedSpecs();
    const FoldPlan plan = GroupedKFold(c.data.groups, 5, 7);
    return FitStack(c.data, specs, ReducedMeta(), plan, 7, 4);
  }();
  return r;
}

// --- criteria ---

Outcome AucOracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> size(2, 50);
  double worst = 0.0;
  std::vector<double> s;
  std::vector<int> y;
  for (int t = 0; t < 200; ++t) {
    RandomInstance(rng, size(rng), s, y);
    worst = std::max(worst, std::abs(Auc(s, y) - PairwiseAuc(s, y)));
  }
  const double secs = Seconds(t0);
  return {worst <= 1e-12 && secs < 1.0, Fmt("max |diff| %.3g, %.3fs", worst, secs)};
}

Outcome RocConsistency() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> size(2, 200);
  double worst = 0.0;
  std::vector<double> s;
  std::vector<int> y;
  for (int t = 0; t < 100; ++t) {
    RandomInstance(rng, size(rng), s, y);
    worst = std::max(worst, std::abs(RocPoints(s, y).trapezoid_area() - Auc(s, y)));
  }
  return {worst <= 1e-12, Fmt("max |area - auc| %.3g", worst)};
}

Outcome LogLossOracle() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + t % 40;
    std::vector<double> p(n);
    std::vector<int> y(n);
    double direct = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = 0.001 + 0.998 * unit(rng);
      y[i] = unit(rng) < 0.3 ? 1 : 0;
      direct -= y[i] ? std::log(p[i]) : std::log(1.0 - p[i]);
    }
    worst = std::max(worst, std::abs(LogLoss(p, y) - direct / static_cast<double>(n)));
  }
  const std::vector<double> half(10, 0.5);
  const std::vector<int> y{1, 0, 0, 1, 0, 0, 0, 1, 1, 0};
  const double uniform = std::abs(LogLoss(half, y) - std::log(2.0));
  return {worst <= 1e-12 && uniform <= 1e-12,
          Fmt("max |diff| %.3g, |uniform - ln2| %.3g", worst, uniform)};
}

Outcome LeakageFreedom() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(404);
  const ClassifierSpec stump =
      ClassifierSpec::Default(LearnerKind::kGbt).with("trees", 1).with("max_depth", 1);
  const std::vector<ClassifierSpec> specs{stump};
  std::size_t group_violations = 0, provenance_violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const int k = std::uniform_int_distribution<int>(2, 6)(rng);
    const int n_groups = std::uniform_int_distribution<int>(k, 30)(rng);
    const std::size_t rows = std::uniform_int_distribution<std::size_t>(n_groups, 80)(rng);
    const std::uint64_t seed = rng();

    Dataset d;
    d.schema = FeatureSchema({FeatureDef{"x", ColumnKind::kNumeric, {}}});
    d.rows = Matrix(rows, 1);
    for (std::size_t i = 0; i < rows; ++i) {
      // Every group appears at least once.
      const int g = i < static_cast<std::size_t>(n_groups)
                        ? static_cast<int>(i)
                        : std::uniform_int_distribution<int>(0, n_groups - 1)(rng);
      d.groups.push_back("g" + std::to_string(g));
      d.rows(i, 0) = std::normal_distribution<double>()(rng);
      d.labels.push_back(std::bernoulli_distribution(0.3)(rng) ? 1 : 0);
    }

    const FoldPlan plan = GroupedKFold(d.groups, k, seed);
    const std::vector<int> folds = plan.row_folds(d.groups);
    std::map<std::string, std::set<int>> seen;
    for (std::size_t i = 0; i < rows; ++i) seen[d.groups[i]].insert(folds[i]);
    for (const auto& [g, fs] : seen) group_violations += fs.size() != 1;

    std::vector<std::vector<std::size_t>> trained(static_cast<std::size_t>(k));
    OofOptions opt;
    opt.observer = [&](int fold, std::size_t, std::span<const std::size_t> train) {
      trained[static_cast<std::size_t>(fold)].assign(train.begin(), train.end());
    };
    const OofMatrix oof = OofPredict(specs, d, plan, seed, opt);
    for (std::size_t i = 0; i < rows; ++i) {
      const int f = oof.provenance_at(i, 0);
      if (f != folds[i]) ++provenance_violations;
      for (std::size_t r : trained[static_cast<std::size_t>(f)])
        if (d.groups[r] == d.groups[i]) {
          ++provenance_violations;
          break;
        }
    }
  }
  const double secs = Seconds(t0);
  return {group_violations == 0 && provenance_violations == 0 && secs < 10.0,
          Fmt("group violations %.0f, provenance violations %.0f, %.2fs",
              static_cast<double>(group_violations), static_cast<double>(provenance_violations),
              secs)};
}

Outcome GradientCheck() {
  std::mt19937_64 rng(505);
  std::normal_distribution<double> normal;
  const std::size_t n = 60, d = 6;
  Matrix x(n, d);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x(i, j) = normal(rng);
    y[i] = normal(rng) + x(i, 0) > 0.0 ? 1 : 0;
  }
  double worst = 0.0;
  const double h = 1e-5;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> w(d);
    for (double& v : w) v = normal(rng);
    const double b = normal(rng);
    const LossAndGradient g = LogisticLoss(x, y, w, b);
    std::vector<double> analytic = g.weight_gradient, numeric(d + 1);
    analytic.push_back(g.intercept_gradient);
    for (std::size_t j = 0; j <= d; ++j) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      if (j < d) {
        wp[j] += h;
        wm[j] -= h;
      } else {
        bp += h;
        bm -= h;
      }
      numeric[j] = (LogisticLoss(x, y, wp, bp).loss - LogisticLoss(x, y, wm, bm).loss) / (2 * h);
    }
    double diff = 0.0, scale = 0.0;
    for (std::size_t j = 0; j <= d; ++j) {
      diff += (analytic[j] - numeric[j]) * (analytic[j] - numeric[j]);
      scale += analytic[j] * analytic[j];
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(scale), 1e-12));
  }
  return {worst < 1e-5, Fmt("max relative error %.3g", worst)};
}

Outcome LdaClosedForm() {
  // 1-D fixture: class 0 at {0, 1, 2}, class 1 at {3, 5}.
  const std::vector<double> xs{0.0, 1.0, 2.0, 3.0, 5.0};
  const std::vector<int> ys{0, 0, 0, 1, 1};
  Matrix x(xs.size(), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) x(i, 0) = xs[i];
  const LdaModel m = FitLda(x, ys);
  const double mu0 = 1.0, mu1 = 4.0, pi0 = 0.6, pi1 = 0.4;
  const double s2 = (1.0 + 0.0 + 1.0 + 1.0 + 1.0) / 3.0;
  double worst = 0.0;
  for (double q = -3.0; q <= 8.0; q += 0.25) {
    const double d0 = pi0 * std::exp(-(q - mu0) * (q - mu0) / (2 * s2));
    const double d1 = pi1 * std::exp(-(q - mu1) * (q - mu1) / (2 * s2));
    const std::vector<double> row{q};
    worst = std::max(worst, std::abs(m.posterior(row)[1] - d1 / (d0 + d1)));
  }

  std::mt19937_64 rng(606);
  std::normal_distribution<double> normal;
  double sum_err = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 30, d = 1 + t % 5;
    Matrix rx(n, d);
    std::vector<int> ry(n);
    for (std::size_t i = 0; i < n; ++i) {
      ry[i] = i % 3 == 0 ? 1 : 0;
      for (std::size_t j = 0; j < d; ++j) rx(i, j) = normal(rng) + ry[i];
    }
    const LdaModel rm = FitLda(rx, ry);
    for (int q = 0; q < 20; ++q) {
      std::vector<double> row(d);
      for (double& v : row) v = 3.0 * normal(rng);
      const auto p = rm.posterior(row);
      sum_err = std::max(sum_err, std::abs(p[0] + p[1] - 1.0));
    }
  }
  return {worst <= 1e-10 && sum_err <= 1e-12,
          Fmt("fixture max |diff| %.3g, max |sum - 1| %.3g", worst, sum_err)};
}

Outcome GbtNewtonStep() {
  Matrix x(4, 1);
  for (int i = 0; i < 4; ++i) x(i, 0) = i;
  const std::vector<int> y{1, 0, 0, 0};
  GbtParams p;
  p.trees = 1;
  p.max_depth = 0;
  p.l2_lambda = 0.0;
  p.learning_rate = 1.0;
  p.base_score = 0.0;
  const GbtModel m = FitGbt(x, y, p);
  const double hand = 0.268941;
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(m.predict(x.row(i)) - hand));
  // The printed constant carries six decimals; compare against the exact value too.
  const double exact = std::abs(m.predict(x.row(0)) - 1.0 / (1.0 + std::exp(1.0)));

  const City& c = SyntheticCity();
  const GbtModel big = FitGbt(c.data.rows, c.data.labels, GbtParams{}, 4);
  std::size_t increases = 0;
  for (std::size_t t = 1; t < big.train_log_loss.size(); ++t)
    increases += big.train_log_loss[t] > big.train_log_loss[t - 1] + 1e-12;
  const bool ok = exact <= 1e-9 && worst <= 1e-6 && big.train_log_loss.size() == 200 &&
                  increases == 0;
  return {ok, Fmt("|p - sigmoid(-1)| %.3g, rounds %.0f, increases %.0f", exact,
                  static_cast<double>(big.train_log_loss.size()),
                  static_cast<double>(increases))};
}

Outcome SyntheticBenchmark() {
  const auto t0 = Clock::now();
  const City& c = SyntheticCity();
  const StackResult& r = CityStack();
  const double rate =
      static_cast<double>(c.data.positives()) / static_cast<double>(c.data.size());
  const double bayes = BayesAuc(c.truth, c.data);
  double ensemble = 0.0, best_single = 0.0;
  for (const auto& s : r.cv.summary) {
    if (s.model == "ensemble")
      ensemble = s.pooled_auc;
    else
      best_single = std::max(best_single, s.pooled_auc);
  }
  const double secs = Seconds(t0) + c.seconds;
  const bool ok = c.data.size() >= 7000 && c.data.size() <= 9000 && std::abs(rate - 0.083) <= 0.02 &&
                  bayes - ensemble <= 0.03 && ensemble >= best_single - 0.01 && secs < 300.0;
  std::ostringstream d;
  d << "tests " << c.data.size() << ", rate " << Fmt("%.4f", rate) << ", bayes "
    << Fmt("%.4f", bayes) << ", ensemble " << Fmt("%.4f", ensemble) << ", best single "
    << Fmt("%.4f", best_single) << ", " << Fmt("%.1fs", secs);
  return {ok, d.str()};
}

Outcome Calibration() {
  const CalibratedSample s = SampleCalibrated(20000, 909);
  const CalibrationCurve curve = ComputeCalibration(s.probability, s.labels, 10, 200, 909);
  double low = 0.0, high = 0.0;
  int n_low = 0, n_high = 0;
  for (const auto& b : curve.bins) {
    if (b.count == 0) continue;
    const double dev = std::abs(b.fraction_positive - b.mean_predicted);
    if (b.upper <= 0.5 + 1e-12) {
      low += dev;
      ++n_low;
    } else {
      high += dev;
      ++n_high;
    }
  }
  low /= std::max(n_low, 1);
  high /= std::max(n_high, 1);
  const double maxdev = curve.max_deviation();
  return {maxdev <= 0.05 && n_low > 0 && n_high > 0 && low < high,
          Fmt("max deviation %.4f, mean low-bin %.4f < high-bin %.4f", maxdev, low, high)};
}

Outcome ImportanceSanity() {
  const ClassifierSpec spec =
      ClassifierSpec::Default(LearnerKind::kGbt).with("trees", 50).with("max_depth", 3);
  int signal_first = 0;
  std::vector<double> noise;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SignalData s = MakeSignalDataset(1500, 3, 1.5, 0.3, seed);
    const FoldPlan plan = GroupedKFold(s.dataset.groups, 5, seed);
    const ImportanceReport rep = DropOneImportance(spec, s.dataset, plan, seed, 4);
    signal_first += rep.entries.front().feature == "signal";
    for (const auto& e : rep.entries)
      if (e.feature != "signal") noise.push_back(std::abs(e.delta));
  }
  const double median = Percentile(noise, 50.0);
  return {signal_first >= 19 && median <= 0.01,
          Fmt("signal ranked first %.0f/20, median noise |delta| %.4f", signal_first, median)};
}

Outcome LearningCurveDirection() {
  const SignalData s = MakeSignalDataset(4000, 3, 1.5, 0.3, 1111);
  LearningCurveOptions opt;
  opt.sizes = {40, 150, 600, 2400};
  opt.replicates = 50;
  opt.seed = 1111;
  opt.threads = 4;
  const ClassifierSpec spec =
      ClassifierSpec::Default(LearnerKind::kGbt).with("trees", 50).with("max_depth", 3);
  const auto pts = LearningCurve(spec, s.dataset, opt);
  const double gain = pts.back().mean_auc - pts.front().mean_auc;
  return {gain > 0.02, Fmt("AUC %.4f at smallest, %.4f at largest (gain %.4f)",
                           pts.front().mean_auc, pts.back().mean_auc, gain)};
}

Outcome ConfusionFixture() {
  const auto sl = ParseServiceLines(ReadCsvFile(LEADRISK_TEST_DATA_DIR "/sl_records.csv"));
  const auto in = ParseInspections(ReadCsvFile(LEADRISK_TEST_DATA_DIR "/inspections.csv"));
  const ConfusionTable t = SlConfusionMatrix(sl.records, in.records);
  struct Cell {
    const char* row;
    std::size_t copper, galvanized, lead;
  };
  const Cell expected[] = {{"Copper", 1535, 38, 13},        {"Copper/Lead", 685, 58, 40},
                           {"Galvanized/Other", 177, 237, 4}, {"Lead", 7, 4, 24},
                           {"Tubeloy", 28, 1, 2},           {"Unkown/Other", 302, 279, 40}};
  int matched = 0;
  for (const Cell& c : expected) {
    matched += t.at(c.row, "Copper") == c.copper;
    matched += t.at(c.row, "Galvanized") == c.galvanized;
    matched += t.at(c.row, "Lead") == c.lead;
  }
  return {matched == 18 && t.row_labels.size() == 6,
          Fmt("%.0f/18 cells exact, total %.0f", matched, static_cast<double>(t.total()))};
}

Outcome Determinism() {
  const fs::path root = MakeTempDir("determinism");
  std::ostringstream sink;
  const std::string city = (root / "city").string();
  {
    std::ofstream cfg(root / "synth.ini");
    cfg << "[run]\nseed = 13\n[synth]\nn_parcels = 500\n";
  }
  int rc = cli::RunCli({"leadrisk", "synth", "--config", (root / "synth.ini").string(), "--out",
                        city},
                       sink, sink);
  if (rc != 0) return {false, "synth exited " + std::to_string(rc)};
  {
    std::ofstream cfg(root / "train.ini");
    cfg << "[run]\nseed = 13\nfolds = 4\n[data]\nparcels = city/parcels.csv\n"
           "tests = city/tests.csv\nservice_lines = city/service_lines.csv\n"
           "hydrants = city/hydrants.csv\n"
           "[learner.gbt]\ntrees = 30\nmax_depth = 3\n[learner.random_forest]\ntrees = 30\n"
           "[learner.extra_trees]\ntrees = 30\n[learner.logreg_l1]\n[learner.knn]\n"
           "k_neighbors = 25\n[learner.lda]\n[meta]\ntrees = 30\nmax_depth = 2\n";
  }
  const std::vector<std::string> runs{"t1a", "t1b", "t8"};
  for (const auto& run : runs) {
    rc = cli::RunCli({"leadrisk", "train", "--config", (root / "train.ini").string(), "--threads",
                      run == "t8" ? "8" : "1", "--out", (root / run).string()},
                     sink, sink);
    if (rc != 0) return {false, run + " train exited " + std::to_string(rc) + ": " + sink.str()};
  }
  const char* files[] = {cli::kCvMetricsFile, cli::kCvSummaryFile,   cli::kRocFile,
                         cli::kCalibrationFile, cli::kOofFile, cli::kModelFile};
  int identical = 0, total = 0;
  for (const char* f : files)
    for (const auto& run : {"t1b", "t8"}) {
      ++total;
      identical += ReadTextFile((root / "t1a" / f).string()) == ReadTextFile((root / run / f).string());
    }
  fs::remove_all(root);
  return {identical == total,
          Fmt("%.0f/%.0f output files byte-identical across reruns and --threads 1/8", identical,
              total)};
}

Outcome SerializationRoundTrip() {
  const StackedModel& model = CityStack().model;
  const fs::path root = MakeTempDir("roundtrip");
  const std::string path = (root / "model.json").string();
  model.Save(path);
  const StackedModel loaded = StackedModel::Load(path);
  fs::remove_all(root);

  std::mt19937_64 rng(1414);
  std::normal_distribution<double> normal;
  const FeatureSchema& schema = model.schema;
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> row(schema.size());
    for (std::size_t j = 0; j < schema.size(); ++j) {
      const FeatureDef& f = schema.feature(j);
      if (f.kind == ColumnKind::kCategorical)
        row[j] = std::uniform_int_distribution<int>(0, f.unknown_code())(rng);
      else
        row[j] = rng() % 10 == 0 ? kMissingSentinel : 1000.0 * normal(rng);
    }
    mismatches += model.predict(row) != loaded.predict(row);
  }
  return {mismatches == 0 && loaded.schema_hash() == model.schema_hash(),
          Fmt("%.0f/1000 predictions differ after save/load", mismatches)};
}

}  // namespace

int main() {
  Report(1, "auc_oracle", AucOracle);
  Report(2, "roc_consistency", RocConsistency);
  Report(3, "log_loss_oracle", LogLossOracle);
  Report(4, "leakage_freedom", LeakageFreedom);
  Report(5, "logreg_gradient_check", GradientCheck);
  Report(6, "lda_closed_form", LdaClosedForm);
  Report(7, "gbt_newton_step", GbtNewtonStep);
  Report(8, "synthetic_benchmark", SyntheticBenchmark);
  Report(9, "calibration", Calibration);
  Report(10, "importance_sanity", ImportanceSanity);
  Report(11, "learning_curve_direction", LearningCurveDirection);
  Report(12, "sl_confusion_fixture", ConfusionFixture);
  Report(13, "determinism", Determinism);
  Report(14, "serialization_round_trip", SerializationRoundTrip);
  std::printf("%d of 14 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
