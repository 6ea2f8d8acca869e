#include "commands.h"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "leadrisk/analysis.h"
#include "leadrisk/csv.h"
#include "leadrisk/error.h"
#include "leadrisk/features.h"
#include "leadrisk/ingest.h"
#include "leadrisk/metrics.h"
#include "leadrisk/pipeline.h"
#include "leadrisk/synth.h"

namespace leadrisk::cli {
namespace {

namespace fs = std::filesystem;

std::string OutPath(const RunConfig& rc, const char* name) { return (fs::path(rc.out) / name).string(); }

void EnsureOutDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorKind::kConfig, "cannot create output directory " + dir + ": " + ec.message());
}

struct LoadedData {
  std::vector<ParcelRecord> parcels;
  std::vector<LeadTest> tests;
  std::vector<ServiceLineRecord> service_lines;
  std::vector<InspectionRecord> inspections;
  MatchResult match;
  nlohmann::json reports = nlohmann::json::object();
  std::vector<std::string> absent_columns;
};

LoadedData LoadData(const RunConfig& rc, bool need_tests) {
  if (rc.parcels.empty()) Fail(ErrorKind::kConfig, "no parcels file ([data] parcels)");
  if (need_tests && rc.tests.empty()) Fail(ErrorKind::kConfig, "no tests file ([data] tests)");
  LoadedData d;
  auto parcels = ParseParcels(ReadCsvFile(rc.parcels));
  d.parcels = std::move(parcels.parcels);
  d.reports["parcels"] = parcels.report.to_json();
  d.absent_columns = parcels.report.absent_columns;
  std::set<std::string> supplied;
  if (!rc.service_lines.empty()) {
    auto sl = ParseServiceLines(ReadCsvFile(rc.service_lines));
    AttachServiceLines(d.parcels, sl.records);
    d.reports["service_lines"] = sl.report.to_json();
    d.reports["service_lines"]["unrecognized_tokens"] = sl.unrecognized_tokens;
    d.service_lines = std::move(sl.records);
    supplied.insert({"sl_type", "sl_type2", "sl_lead"});
  }
  if (!rc.hydrants.empty()) {
    auto hy = ParseHydrants(ReadCsvFile(rc.hydrants));
    AssignHydrants(d.parcels, hy.hydrants, rc.threads);
    d.reports["hydrants"] = hy.report.to_json();
    supplied.insert("hydrant_type");
  }
  if (!rc.inspections.empty()) {
    auto in = ParseInspections(ReadCsvFile(rc.inspections));
    d.reports["inspections"] = in.report.to_json();
    d.inspections = std::move(in.records);
  }
  std::erase_if(d.absent_columns, [&](const std::string& c) { return supplied.contains(c); });
  if (need_tests) {
    auto tests = ParseTests(ReadCsvFile(rc.tests));
    d.tests = std::move(tests.tests);
    d.reports["tests"] = tests.report.to_json();
    d.match = MatchTestsToParcels(d.tests, d.parcels);
    d.reports["matching"] = {{"matched", d.match.matches.size()},
                             {"discarded", d.match.discarded},
                             {"ambiguous", d.match.ambiguous}};
  }
  return d;
}

Dataset BuildTrainingSet(const LoadedData& d) {
  const FeatureSchema schema = BuildSchema(d.parcels);
  AssembleResult assembled = AssembleDataset(d.match.matches, d.tests, d.parcels, schema);
  Dataset& data = assembled.dataset;
  if (data.size() == 0) Fail(ErrorKind::kData, "no tests could be matched to parcels");
  const std::size_t pos = data.positives();
  if (pos == 0 || pos == data.size())
    Fail(ErrorKind::kData, "single-class labels: " + std::to_string(pos) + " of " +
                               std::to_string(data.size()) + " tests exceed " +
                               FormatDouble(kActionLevelPpb) + " ppb");
  return std::move(assembled.dataset);
}

// One spec per kind, searching the grid when some kind has several points.
std::vector<ClassifierSpec> ChooseSpecs(const RunConfig& rc, const Dataset& data,
                                        const FoldPlan& plan, std::ostream& log) {
  std::vector<LearnerKind> order;
  std::map<LearnerKind, int> points;
  for (const auto& s : rc.grid) {
    if (!points.contains(s.kind)) order.push_back(s.kind);
    ++points[s.kind];
  }
  const bool search = std::any_of(points.begin(), points.end(), [](auto& p) { return p.second > 1; });
  std::vector<ClassifierSpec> specs;
  if (!search) {
    for (LearnerKind k : order)
      specs.push_back(*std::find_if(rc.grid.begin(), rc.grid.end(),
                                    [&](const ClassifierSpec& s) { return s.kind == k; }));
    return specs;
  }
  log << "grid search over " << rc.grid.size() << " points\n";
  const SelectionResult sel = SelectHyperparams(rc.grid, data, plan, rc.seed, rc.threads);
  std::ostringstream csv;
  csv << "model,spec,mean_logloss,selected\n";
  for (const auto& g : sel.scores)
    WriteCsvRow(csv, {std::string(LearnerKindName(g.spec.kind)), g.spec.label(),
                      FormatDouble(g.mean_log_loss), sel.best.at(g.spec.kind) == g.spec ? "1" : "0"});
  WriteTextFile(OutPath(rc, kSelectionFile), csv.str());
  for (LearnerKind k : order) specs.push_back(sel.best.at(k));
  return specs;
}

void CheckLeakage(const FoldPlan& plan, const Dataset& data, const OofMatrix& oof) {
  std::map<std::string, int> seen;
  const auto row_folds = plan.row_folds(data.groups);
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto [it, inserted] = seen.emplace(data.groups[i], row_folds[i]);
    if (!inserted && it->second != row_folds[i])
      Fail(ErrorKind::kInternal, "leakage check: group " + data.groups[i] + " spans two folds");
    for (std::size_t j = 0; j < oof.specs.size(); ++j)
      if (oof.provenance_at(i, j) != row_folds[i])
        Fail(ErrorKind::kInternal, "leakage check: row " + std::to_string(i) +
                                       " predicted by a model from fold " +
                                       std::to_string(oof.provenance_at(i, j)));
  }
}

std::string Fmt(double v, int precision = 4) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

void PrintSummary(const CvResult& cv, std::ostream& out) {
  out << std::left << std::setw(16) << "classifier" << std::setw(12) << "AUC"
      << "logloss (mean +/- sd)\n";
  for (const auto& s : cv.summary)
    out << std::left << std::setw(16) << s.model << std::setw(12) << Fmt(s.pooled_auc)
        << Fmt(s.mean_log_loss) << " +/- " << Fmt(s.sd_log_loss) << "\n";
}

StackResult RunCv(const RunConfig& rc, const Dataset& data, std::ostream& out, std::ostream& log) {
  const FoldPlan plan = GroupedKFold(data.groups, rc.folds, rc.seed);
  log << "dataset: " << data.size() << " tests, " << data.positives() << " positive, "
      << data.distinct_groups() << " parcels, " << rc.folds << " folds\n";
  const auto specs = ChooseSpecs(rc, data, plan, log);
  StackResult r = FitStack(data, specs, rc.meta, plan, rc.seed, rc.threads);
  CheckLeakage(plan, data, r.oof);
  for (const auto& w : r.oof.warnings) log << "warning: " << w << "\n";

  WriteTextFile(OutPath(rc, kCvMetricsFile), r.cv.per_fold_csv());
  WriteTextFile(OutPath(rc, kCvSummaryFile), r.cv.summary_csv());

  const auto names = SpecNames(specs);
  std::vector<std::vector<double>> columns;
  for (std::size_t j = 0; j < specs.size(); ++j) columns.push_back(r.oof.column(j));
  std::ostringstream roc;
  roc << "model,fpr,tpr,threshold\n";
  auto emit_roc = [&](const std::string& name, const std::vector<double>& p) {
    for (const auto& pt : RocPoints(p, data.labels).points)
      WriteCsvRow(roc, {name, FormatDouble(pt.false_positive_rate),
                        FormatDouble(pt.true_positive_rate), FormatDouble(pt.threshold)});
  };
  for (std::size_t j = 0; j < specs.size(); ++j) emit_roc(names[j], columns[j]);
  emit_roc("ensemble", r.ensemble_oof);
  WriteTextFile(OutPath(rc, kRocFile), roc.str());

  WriteTextFile(OutPath(rc, kCalibrationFile),
                ComputeCalibration(r.ensemble_oof, data.labels, rc.bins, rc.bootstrap, rc.seed)
                    .to_csv());

  std::ostringstream oof;
  {
    std::vector<std::string> header{"row", "group", "label", "fold"};
    header.insert(header.end(), names.begin(), names.end());
    header.push_back("ensemble");
    WriteCsvRow(oof, header);
  }
  const auto row_folds = plan.row_folds(data.groups);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<std::string> row{std::to_string(i), data.groups[i], std::to_string(data.labels[i]),
                                 std::to_string(row_folds[i])};
    for (const auto& c : columns) row.push_back(FormatDouble(c[i]));
    row.push_back(FormatDouble(r.ensemble_oof[i]));
    WriteCsvRow(oof, row);
  }
  WriteTextFile(OutPath(rc, kOofFile), oof.str());
  PrintSummary(r.cv, out);
  return r;
}

std::string ConfusionCsv(const ConfusionTable& t) {
  std::ostringstream os;
  std::vector<std::string> header{"city_record"};
  header.insert(header.end(), t.col_labels.begin(), t.col_labels.end());
  WriteCsvRow(os, header);
  for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
    std::vector<std::string> row{t.row_labels[r]};
    for (std::size_t c : t.counts[r]) row.push_back(std::to_string(c));
    WriteCsvRow(os, row);
  }
  return os.str();
}

// --- report helpers -------------------------------------------------------

std::string MarkdownTable(const CsvTable& t, std::size_t max_rows = 1000) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    os << "|";
    for (const auto& c : cells) os << " " << c << " |";
    os << "\n";
  };
  line(t.header);
  os << "|";
  for (std::size_t i = 0; i < t.header.size(); ++i) os << " --- |";
  os << "\n";
  for (std::size_t r = 0; r < t.rows.size() && r < max_rows; ++r) line(t.rows[r]);
  if (t.rows.size() > max_rows)
    os << "\n(" << t.rows.size() - max_rows << " more rows in the CSV)\n";
  return os.str();
}

std::string Cell(const CsvTable& t, std::size_t row, std::initializer_list<std::string_view> col) {
  const int c = t.find_column(col);
  if (c < 0 || row >= t.rows.size() || static_cast<std::size_t>(c) >= t.rows[row].size()) return "";
  return t.rows[row][static_cast<std::size_t>(c)];
}

std::string Round4(const std::string& s) {
  if (s.empty() || s == "nan") return s;
  try {
    return Fmt(std::stod(s));
  } catch (const std::exception&) {
    return s;
  }
}

}  // namespace

int CmdSynth(const RunConfig& rc, std::ostream& out) {
  EnsureOutDir(rc.out);
  GeneratorConfig g = rc.synth;
  g.seed = rc.seed;
  const SynthOutput s = Generate(g);
  WriteTextFile(OutPath(rc, kSynthParcelsFile), s.parcels_csv);
  WriteTextFile(OutPath(rc, kSynthTestsFile), s.tests_csv);
  WriteTextFile(OutPath(rc, kSynthServiceLinesFile), s.service_lines_csv);
  WriteTextFile(OutPath(rc, kSynthHydrantsFile), s.hydrants_csv);
  nlohmann::json truth = s.truth.to_json();
  truth["config"] = g.to_json();
  WriteTextFile(OutPath(rc, kSynthTruthFile), truth.dump(1) + "\n");
  out << "synth: " << g.n_parcels << " parcels, " << s.test_count << " tests, expected rate "
      << Fmt(s.truth.expected_rate) << " -> " << rc.out << "\n";
  return kExitOk;
}

int CmdIngest(const RunConfig& rc, std::ostream& out) {
  EnsureOutDir(rc.out);
  const LoadedData d = LoadData(rc, !rc.tests.empty());
  WriteTextFile(OutPath(rc, kParseReportFile), d.reports.dump(1) + "\n");

  std::ostringstream counts;
  counts << "sl_type,parcels\n";
  for (const auto& [label, n] : SlLabelCounts(d.parcels)) WriteCsvRow(counts, {label, std::to_string(n)});
  WriteTextFile(OutPath(rc, kSlLabelCountsFile), counts.str());
  if (!d.inspections.empty()) {
    if (d.service_lines.empty())
      Fail(ErrorKind::kConfig, "inspections need a service_lines file for the confusion table");
    WriteTextFile(OutPath(rc, kSlConfusionFile),
                  ConfusionCsv(SlConfusionMatrix(d.service_lines, d.inspections)));
  }
  const auto points = SlTypeYearPoints(d.parcels);
  WriteTextFile(OutPath(rc, kSlYearFile), SlTypeYearCsv(points));

  if (!rc.tests.empty()) {
    WriteTextFile(OutPath(rc, kHeatmapFile), TestHeatmapCsv(d.tests, d.match.matches, d.parcels));
    WriteTextFile(OutPath(rc, kSlTypeLeadFile),
                  GroupSummaryCsv(MeanLogLeadBySlType(d.tests, d.match.matches, d.parcels,
                                                      rc.bootstrap, rc.seed)));
    WriteTextFile(OutPath(rc, kDecadeLeadFile),
                  GroupSummaryCsv(MeanLogLeadByDecade(d.tests, d.match.matches, d.parcels, {},
                                                      rc.bootstrap, rc.seed)));
    const FeatureSchema schema = BuildSchema(d.parcels);
    const AssembleResult a = AssembleDataset(d.match.matches, d.tests, d.parcels, schema);
    const nlohmann::json summary = {
        {"parcels", d.parcels.size()},
        {"tests", d.tests.size()},
        {"rows", a.dataset.size()},
        {"positives", a.dataset.positives()},
        {"positive_rate", a.dataset.size() ? static_cast<double>(a.dataset.positives()) /
                                                 static_cast<double>(a.dataset.size())
                                           : 0.0},
        {"groups", a.dataset.distinct_groups()},
        {"excluded_tests", a.excluded},
        {"schema_hash", schema.hash()},
        {"features", schema.size()}};
    WriteTextFile(OutPath(rc, kDatasetSummaryFile), summary.dump(1) + "\n");
    out << "ingest: " << d.parcels.size() << " parcels, " << d.tests.size() << " tests, "
        << a.dataset.size() << " matched rows (" << a.dataset.positives() << " positive)\n";
  } else {
    out << "ingest: " << d.parcels.size() << " parcels\n";
  }
  return kExitOk;
}

int CmdTrain(const RunConfig& rc, std::ostream& out, std::ostream& log) {
  EnsureOutDir(rc.out);
  const LoadedData d = LoadData(rc, true);
  const Dataset data = BuildTrainingSet(d);
  const StackResult r = RunCv(rc, data, out, log);
  r.model.Save(OutPath(rc, kModelFile));
  return kExitOk;
}

int CmdEvaluate(const RunConfig& rc, std::ostream& out, std::ostream& log) {
  EnsureOutDir(rc.out);
  const LoadedData d = LoadData(rc, true);
  const Dataset data = BuildTrainingSet(d);
  RunCv(rc, data, out, log);
  if (rc.learning_curve) {
    LearningCurveOptions opts;
    opts.sizes = rc.learning_curve->sizes;
    opts.replicates = rc.learning_curve->replicates;
    opts.validation_fraction = rc.learning_curve->validation_fraction;
    opts.seed = rc.seed;
    opts.threads = rc.threads;
    const auto curve = LearningCurve(rc.learning_curve->spec, data, opts);
    std::ostringstream csv;
    csv << "size,mean_auc,sd_auc,replicates\n";
    for (const auto& p : curve)
      WriteCsvRow(csv, {std::to_string(p.size), FormatDouble(p.mean_auc), FormatDouble(p.sd_auc),
                        std::to_string(p.replicates)});
    WriteTextFile(OutPath(rc, kLearningCurveFile), csv.str());
  }
  return kExitOk;
}

int CmdPredict(const RunConfig& rc, std::ostream& out) {
  EnsureOutDir(rc.out);
  const std::string model_path = rc.model.empty() ? OutPath(rc, kModelFile) : rc.model;
  if (!fs::exists(model_path)) Fail(ErrorKind::kMissingArtifact, "model file not found: " + model_path);
  const StackedModel model = StackedModel::Load(model_path);
  const LoadedData d = LoadData(rc, false);
  for (const auto& col : d.absent_columns)
    if (model.schema.index_of(col))
      Fail(ErrorKind::kModelCompat, "parcels file lacks model feature column '" + col + "'");
  const RiskMap map = BuildRiskMap(model, d.parcels, rc.threshold, rc.threads);
  WriteTextFile(OutPath(rc, kRiskCsvFile), map.to_csv());
  WriteTextFile(OutPath(rc, kRiskGeoJsonFile), map.to_geojson());
  out << "predict: " << map.entries.size() << " parcels scored, " << map.feature_count()
      << " above " << FormatDouble(rc.threshold) << ", " << map.without_coordinates
      << " without coordinates\n";
  return kExitOk;
}

int CmdImportance(const RunConfig& rc, std::ostream& out) {
  EnsureOutDir(rc.out);
  const LoadedData d = LoadData(rc, true);
  const Dataset data = BuildTrainingSet(d);
  ClassifierSpec spec = ClassifierSpec::Default(rc.importance_kind);
  for (const auto& s : rc.grid)
    if (s.kind == rc.importance_kind) {
      spec = s;
      break;
    }
  const FoldPlan plan = GroupedKFold(data.groups, rc.folds, rc.seed);
  const ImportanceReport report = DropOneImportance(spec, data, plan, rc.seed, rc.threads);
  WriteTextFile(OutPath(rc, kImportanceFile), report.to_csv());
  out << "importance (" << spec.label() << "), top features:\n";
  for (std::size_t i = 0; i < report.entries.size() && i < 10; ++i)
    out << "  " << i + 1 << ". " << report.entries[i].feature << "  " << Fmt(report.entries[i].delta)
        << "\n";
  return kExitOk;
}

int CmdReport(const std::string& results_dir, std::ostream& out, std::ostream& log) {
  const fs::path dir(results_dir);
  const std::vector<const char*> required = {kCvSummaryFile, kCvMetricsFile, kRocFile,
                                             kCalibrationFile};
  std::vector<std::string> missing;
  for (const char* f : required)
    if (!fs::exists(dir / f)) missing.emplace_back(f);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += "\n  " + (dir / m).string();
    Fail(ErrorKind::kMissingArtifact, "report: missing inputs:" + list);
  }
  auto read = [&](const char* f) { return ReadCsvFile((dir / f).string()); };
  auto have = [&](const char* f) { return fs::exists(dir / f); };

  std::ostringstream md;
  md << "# Lead risk results\n\n";
  md << "Results directory: `" << results_dir << "`\n\n";

  const CsvTable summary = read(kCvSummaryFile);
  md << "## Classifier summary\n\n";
  md << "| Classifier | AUC (pooled OOF) | AUC (fold mean) | Log loss (mean +/- sd) |\n";
  md << "| --- | --- | --- | --- |\n";
  for (std::size_t r = 0; r < summary.rows.size(); ++r)
    md << "| " << Cell(summary, r, {"model"}) << " | " << Round4(Cell(summary, r, {"pooled_auc"}))
       << " | " << Round4(Cell(summary, r, {"mean_fold_auc"})) << " | "
       << Round4(Cell(summary, r, {"mean_logloss"})) << " +/- "
       << Round4(Cell(summary, r, {"sd_logloss"})) << " |\n";
  md << "\nPer-fold metrics: `" << kCvMetricsFile << "`. ROC points: `" << kRocFile << "`.\n\n";

  md << "## Calibration (ensemble, out-of-fold)\n\n" << MarkdownTable(read(kCalibrationFile)) << "\n";

  if (have(kSelectionFile))
    md << "## Hyperparameter search\n\n" << MarkdownTable(read(kSelectionFile)) << "\n";
  if (have(kLearningCurveFile))
    md << "## Learning curve\n\n" << MarkdownTable(read(kLearningCurveFile)) << "\n";
  if (have(kImportanceFile))
    md << "## Feature importance (drop one feature)\n\n" << MarkdownTable(read(kImportanceFile), 10)
       << "\n";
  if (have(kSlConfusionFile))
    md << "## City records vs inspected private material\n\n"
       << MarkdownTable(read(kSlConfusionFile)) << "\n";
  if (have(kSlTypeLeadFile))
    md << "## Mean log(1 + lead) by service-line record\n\n" << MarkdownTable(read(kSlTypeLeadFile))
       << "\n";
  if (have(kDecadeLeadFile))
    md << "## Mean log(1 + lead) by construction decade\n\n"
       << MarkdownTable(read(kDecadeLeadFile)) << "\n";

  md << "## Data files\n\n";
  const std::vector<std::pair<const char*, const char*>> pointers = {
      {kHeatmapFile, "test locations and lead readings (heat map)"},
      {kSlTypeLeadFile, "group means by service-line record"},
      {kDecadeLeadFile, "group means by construction decade"},
      {kSlYearFile, "service-line record versus year built (scatter)"},
      {kRiskCsvFile, "predicted probability for every parcel"},
      {kRiskGeoJsonFile, "parcels above the display threshold (map layer)"},
      {kOofFile, "out-of-fold predictions"},
      {kModelFile, "stacked model"},
  };
  for (const auto& [file, what] : pointers)
    md << "- `" << file << "`: " << what << (have(file) ? "" : " (not present)") << "\n";

  WriteTextFile((dir / kReportFile).string(), md.str());
  out << "report: " << (dir / kReportFile).string() << "\n";
  (void)log;
  return kExitOk;
}

int RunCli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"leadrisk: lead service-line risk modeling"};
  app.require_subcommand(1);
  FlagOverrides flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "Config file ([section] key = value)");
    sub->add_option("--seed", flags.seed, "Random seed (required unless set in the config)");
    sub->add_option("--threads", flags.threads, "Worker threads");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--threshold", flags.threshold, "Risk-map display threshold");
    sub->add_option("--folds", flags.folds, "Cross-validation folds");
  };
  auto* synth = app.add_subcommand("synth", "Generate a synthetic city");
  auto* ingest = app.add_subcommand("ingest", "Parse inputs and write descriptive analyses");
  auto* train = app.add_subcommand("train", "Cross-validate and fit the stacked model");
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validated metrics and learning curve");
  auto* predict = app.add_subcommand("predict", "Score parcels with a saved model");
  auto* importance = app.add_subcommand("importance", "Drop-one-feature importance");
  auto* report = app.add_subcommand("report", "Render report.md from a results directory");
  for (auto* sub : {synth, ingest, train, evaluate, predict, importance, report}) add_common(sub);
  predict->add_option("--model", flags.model, "Model file (default <out>/model.json)");
  predict->add_option("--parcels", flags.parcels, "Parcels CSV to score");

  std::vector<std::string> args(argv.rbegin(), argv.rend() - (argv.empty() ? 0 : 1));
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (report->parsed()) {
      const RunConfig rc = ResolveConfig(flags, false);
      return CmdReport(rc.out, out, err);
    }
    if (predict->parsed()) return CmdPredict(ResolveConfig(flags, false), out);
    const RunConfig rc = ResolveConfig(flags);
    if (synth->parsed()) return CmdSynth(rc, out);
    if (ingest->parsed()) return CmdIngest(rc, out);
    if (train->parsed()) return CmdTrain(rc, out, err);
    if (evaluate->parsed()) return CmdEvaluate(rc, out, err);
    if (importance->parsed()) return CmdImportance(rc, out);
    return kExitInternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::kConfig:
      case ErrorKind::kInvalidArgument:
        return kExitConfig;
      case ErrorKind::kParse:
      case ErrorKind::kData:
        return kExitData;
      case ErrorKind::kModelCompat:
        return kExitModelCompat;
      case ErrorKind::kMissingArtifact:
        return kExitMissingArtifacts;
      case ErrorKind::kInternal:
        return kExitInternal;
    }
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace leadrisk::cli
