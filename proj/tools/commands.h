#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.h"

namespace leadrisk::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitInternal = 3,
  kExitData = 4,
  kExitModelCompat = 5,
  kExitMissingArtifacts = 6,
};

// Output file names, all written under --out.
inline constexpr const char* kModelFile = "model.json";
inline constexpr const char* kCvMetricsFile = "cv_metrics.csv";
inline constexpr const char* kCvSummaryFile = "cv_summary.csv";
inline constexpr const char* kRocFile = "roc.csv";
inline constexpr const char* kCalibrationFile = "calibration.csv";
inline constexpr const char* kOofFile = "oof_predictions.csv";
inline constexpr const char* kSelectionFile = "selection.csv";
inline constexpr const char* kLearningCurveFile = "learning_curve.csv";
inline constexpr const char* kRiskCsvFile = "risk.csv";
inline constexpr const char* kRiskGeoJsonFile = "risk.geojson";
inline constexpr const char* kImportanceFile = "importance.csv";
inline constexpr const char* kReportFile = "report.md";
inline constexpr const char* kParseReportFile = "parse_report.json";
inline constexpr const char* kDatasetSummaryFile = "dataset_summary.json";
inline constexpr const char* kSlLabelCountsFile = "sl_label_counts.csv";
inline constexpr const char* kSlConfusionFile = "sl_confusion.csv";
inline constexpr const char* kSlTypeLeadFile = "sl_type_lead.csv";
inline constexpr const char* kDecadeLeadFile = "decade_lead.csv";
inline constexpr const char* kSlYearFile = "sl_year_points.csv";
inline constexpr const char* kHeatmapFile = "test_heatmap.csv";
inline constexpr const char* kSynthParcelsFile = "parcels.csv";
inline constexpr const char* kSynthTestsFile = "tests.csv";
inline constexpr const char* kSynthServiceLinesFile = "service_lines.csv";
inline constexpr const char* kSynthHydrantsFile = "hydrants.csv";
inline constexpr const char* kSynthTruthFile = "ground_truth.json";

int CmdSynth(const RunConfig& rc, std::ostream& out);
int CmdIngest(const RunConfig& rc, std::ostream& out);
int CmdTrain(const RunConfig& rc, std::ostream& out, std::ostream& log);
int CmdEvaluate(const RunConfig& rc, std::ostream& out, std::ostream& log);
int CmdPredict(const RunConfig& rc, std::ostream& out);
int CmdImportance(const RunConfig& rc, std::ostream& out);
int CmdReport(const std::string& results_dir, std::ostream& out, std::ostream& log);

// Full command line entry point; never throws. argv[0] is the program name.
int RunCli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace leadrisk::cli
