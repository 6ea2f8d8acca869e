#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leadrisk/learner.h"
#include "leadrisk/metrics.h"
#include "leadrisk/synth.h"

namespace leadrisk::cli {

struct ConfigEntry {
  std::string value;
  int line = 0;
};

// INI-style text: "[section]" headers, "key = value" lines, '#' or ';'
// comments. Errors carry "<path>:<line>:".
struct ConfigFile {
  std::string path;
  std::vector<std::string> section_order;
  std::map<std::string, std::map<std::string, ConfigEntry>> sections;

  const ConfigEntry* find(const std::string& section, const std::string& key) const;
};

ConfigFile ParseConfig(std::string_view text, const std::string& path);

// Values given on the command line; they win over the config file.
struct FlagOverrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::optional<double> threshold;
  std::optional<int> folds;
  std::optional<std::string> model;
  std::optional<std::string> parcels;
};

struct LearningCurveConfig {
  ClassifierSpec spec;
  std::vector<std::size_t> sizes;
  int replicates = 50;
  double validation_fraction = 0.25;
};

struct RunConfig {
  std::uint64_t seed = 0;
  int threads = 1;
  int folds = 5;
  std::string out = ".";
  double threshold = 0.1;
  int bins = 10;
  int bootstrap = 200;

  std::string parcels;
  std::string tests;
  std::string service_lines;
  std::string hydrants;
  std::string inspections;
  std::string model;

  GeneratorConfig synth;
  // Every grid point, in config order; one point per kind means no search.
  std::vector<ClassifierSpec> grid;
  ClassifierSpec meta = ClassifierSpec::DefaultMeta();
  LearnerKind importance_kind = LearnerKind::kGbt;
  std::optional<LearningCurveConfig> learning_curve;
};

// Throws Error(kConfig) with a line-numbered message on bad values, unknown
// keys, or (when required) a missing seed.
RunConfig ResolveConfig(const FlagOverrides& flags, bool require_seed = true);

// Cartesian product of comma-separated hyperparameter lists.
std::vector<ClassifierSpec> ExpandGrid(LearnerKind kind,
                                       const std::map<std::string, ConfigEntry>& entries,
                                       const std::string& path);

}  // namespace leadrisk::cli
