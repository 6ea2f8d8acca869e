#include "config.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <set>

#include "leadrisk/csv.h"
#include "leadrisk/error.h"

namespace leadrisk::cli {
namespace {

namespace fs = std::filesystem;

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void BadLine(const std::string& path, int line, const std::string& msg) {
  Fail(ErrorKind::kConfig, path + ":" + std::to_string(line) + ": " + msg);
}

double ParseDouble(const ConfigEntry& e, const std::string& path, const std::string& key) {
  double v = 0.0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc{} || p != end || !std::isfinite(v))
    BadLine(path, e.line, "'" + key + "' expects a number, got '" + e.value + "'");
  return v;
}

std::uint64_t ParseU64(const ConfigEntry& e, const std::string& path, const std::string& key) {
  std::uint64_t v = 0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc{} || p != end)
    BadLine(path, e.line, "'" + key + "' expects a non-negative integer, got '" + e.value + "'");
  return v;
}

int ParseInt(const ConfigEntry& e, const std::string& path, const std::string& key, int lo) {
  const std::uint64_t v = ParseU64(e, path, key);
  if (v > 1000000000ULL || static_cast<int>(v) < lo)
    BadLine(path, e.line, "'" + key + "' must be an integer >= " + std::to_string(lo));
  return static_cast<int>(v);
}

std::vector<std::string> SplitList(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = value.find(',', start);
    out.emplace_back(Trim(std::string_view(value).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void CheckKeys(const ConfigFile& cfg, const std::string& section,
               const std::set<std::string>& allowed) {
  auto it = cfg.sections.find(section);
  if (it == cfg.sections.end()) return;
  for (const auto& [key, entry] : it->second)
    if (!allowed.contains(key))
      BadLine(cfg.path, entry.line, "unknown key '" + key + "' in [" + section + "]");
}

std::string ResolvePath(const ConfigFile& cfg, const std::string& value) {
  if (value.empty()) return value;
  fs::path p(value);
  if (p.is_absolute() || cfg.path.empty()) return p.lexically_normal().string();
  return (fs::path(cfg.path).parent_path() / p).lexically_normal().string();
}

}  // namespace

const ConfigEntry* ConfigFile::find(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  if (s == sections.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

ConfigFile ParseConfig(std::string_view text, const std::string& path) {
  ConfigFile cfg;
  cfg.path = path;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') BadLine(path, line_no, "unterminated section header");
      current = std::string(Trim(line.substr(1, line.size() - 2)));
      if (current.empty()) BadLine(path, line_no, "empty section name");
      if (cfg.sections.contains(current))
        BadLine(path, line_no, "duplicate section [" + current + "]");
      cfg.sections[current];
      cfg.section_order.push_back(current);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) BadLine(path, line_no, "expected 'key = value'");
    if (current.empty()) BadLine(path, line_no, "key outside of any [section]");
    const std::string key(Trim(line.substr(0, eq)));
    std::string_view value = Trim(line.substr(eq + 1));
    if (const auto hash = value.find(" #"); hash != std::string_view::npos)
      value = Trim(value.substr(0, hash));
    if (key.empty()) BadLine(path, line_no, "empty key");
    auto& sec = cfg.sections[current];
    if (sec.contains(key)) BadLine(path, line_no, "duplicate key '" + key + "'");
    sec.emplace(key, ConfigEntry{std::string(value), line_no});
  }
  return cfg;
}

std::vector<ClassifierSpec> ExpandGrid(LearnerKind kind,
                                       const std::map<std::string, ConfigEntry>& entries,
                                       const std::string& path) {
  std::vector<ClassifierSpec> grid{ClassifierSpec::Default(kind)};
  for (const auto& [key, entry] : entries) {
    std::vector<ClassifierSpec> next;
    for (const auto& item : SplitList(entry.value)) {
      const double v = ParseDouble({item, entry.line}, path, key);
      for (const auto& s : grid) next.push_back(s.with(key, v));
    }
    grid = std::move(next);
  }
  for (const auto& s : grid) {
    try {
      s.validate();
    } catch (const Error& e) {
      const int line = entries.empty() ? 0 : entries.begin()->second.line;
      BadLine(path, line, e.what());
    }
  }
  return grid;
}

RunConfig ResolveConfig(const FlagOverrides& flags, bool require_seed) {
  ConfigFile cfg;
  if (flags.config) {
    if (!fs::exists(*flags.config))
      Fail(ErrorKind::kConfig, "config file not found: " + *flags.config);
    cfg = ParseConfig(ReadTextFile(*flags.config), *flags.config);
  }
  for (const auto& name : cfg.section_order) {
    if (name == "run" || name == "data" || name == "synth" || name == "meta" ||
        name == "importance" || name == "learning_curve" || name.starts_with("learner."))
      continue;
    const auto& sec = cfg.sections.at(name);
    BadLine(cfg.path, sec.empty() ? 0 : sec.begin()->second.line, "unknown section [" + name + "]");
  }
  CheckKeys(cfg, "run", {"seed", "threads", "folds", "out", "threshold", "bins", "bootstrap"});
  CheckKeys(cfg, "data", {"parcels", "tests", "service_lines", "hydrants", "inspections", "model"});
  CheckKeys(cfg, "synth", {"n_parcels", "p_zero", "tests_lambda", "target_rate", "n_clusters",
                           "n_hydrants", "coef_location", "coef_year", "coef_lead_sl",
                           "coef_land_value", "coef_noise", "lognormal_sigma"});
  CheckKeys(cfg, "importance", {"learner"});
  CheckKeys(cfg, "learning_curve", {"learner", "sizes", "replicates", "validation_fraction"});

  RunConfig rc;
  const std::string& path = cfg.path;
  if (flags.seed) {
    rc.seed = *flags.seed;
  } else if (const auto* e = cfg.find("run", "seed")) {
    rc.seed = ParseU64(*e, path, "seed");
  } else if (require_seed) {
    Fail(ErrorKind::kConfig, (path.empty() ? std::string("command line") : path) +
                                 ": a seed is required ([run] seed = N or --seed N)");
  }
  if (const auto* e = cfg.find("run", "threads")) rc.threads = ParseInt(*e, path, "threads", 1);
  if (const auto* e = cfg.find("run", "folds")) rc.folds = ParseInt(*e, path, "folds", 2);
  if (const auto* e = cfg.find("run", "out")) rc.out = ResolvePath(cfg, e->value);
  if (const auto* e = cfg.find("run", "threshold")) rc.threshold = ParseDouble(*e, path, "threshold");
  if (const auto* e = cfg.find("run", "bins")) rc.bins = ParseInt(*e, path, "bins", 2);
  if (const auto* e = cfg.find("run", "bootstrap")) rc.bootstrap = ParseInt(*e, path, "bootstrap", 1);
  if (flags.threads) rc.threads = *flags.threads;
  if (flags.folds) rc.folds = *flags.folds;
  if (flags.out) rc.out = *flags.out;
  if (flags.threshold) rc.threshold = *flags.threshold;
  if (rc.threads < 1) Fail(ErrorKind::kConfig, "--threads must be >= 1");
  if (rc.folds < 2) Fail(ErrorKind::kConfig, "--folds must be >= 2");
  if (!std::isfinite(rc.threshold)) Fail(ErrorKind::kConfig, "threshold must be finite");

  auto data_path = [&](const char* key) {
    const auto* e = cfg.find("data", key);
    return e ? ResolvePath(cfg, e->value) : std::string{};
  };
  rc.parcels = data_path("parcels");
  rc.tests = data_path("tests");
  rc.service_lines = data_path("service_lines");
  rc.hydrants = data_path("hydrants");
  rc.inspections = data_path("inspections");
  rc.model = data_path("model");
  if (flags.model) rc.model = *flags.model;
  if (flags.parcels) rc.parcels = *flags.parcels;
  if (flags.parcels && !fs::exists(*flags.parcels))
    Fail(ErrorKind::kConfig, "parcels file does not exist: " + *flags.parcels);
  for (const char* key : {"parcels", "tests", "service_lines", "hydrants", "inspections"}) {
    const auto* e = cfg.find("data", key);
    if (e && !fs::exists(ResolvePath(cfg, e->value)))
      BadLine(path, e->line, std::string(key) + " file does not exist: " + e->value);
  }

  GeneratorConfig& g = rc.synth;
  g.seed = rc.seed;
  if (const auto* sec = cfg.sections.count("synth") ? &cfg.sections.at("synth") : nullptr) {
    for (const auto& [key, e] : *sec) {
      if (key == "n_parcels") g.n_parcels = static_cast<std::size_t>(ParseInt(e, path, key, 1));
      else if (key == "n_clusters") g.n_clusters = ParseInt(e, path, key, 1);
      else if (key == "n_hydrants") g.n_hydrants = static_cast<std::size_t>(ParseInt(e, path, key, 1));
      else if (key == "p_zero") g.p_zero = ParseDouble(e, path, key);
      else if (key == "tests_lambda") g.tests_lambda = ParseDouble(e, path, key);
      else if (key == "target_rate") g.target_rate = ParseDouble(e, path, key);
      else if (key == "coef_location") g.coef_location = ParseDouble(e, path, key);
      else if (key == "coef_year") g.coef_year = ParseDouble(e, path, key);
      else if (key == "coef_lead_sl") g.coef_lead_sl = ParseDouble(e, path, key);
      else if (key == "coef_land_value") g.coef_land_value = ParseDouble(e, path, key);
      else if (key == "coef_noise") g.coef_noise = ParseDouble(e, path, key);
      else if (key == "lognormal_sigma") g.lognormal_sigma = ParseDouble(e, path, key);
    }
    try {
      g.validate();
    } catch (const Error& e) {
      BadLine(path, sec->empty() ? 0 : sec->begin()->second.line, e.what());
    }
  }

  for (const auto& name : cfg.section_order) {
    if (!name.starts_with("learner.")) continue;
    const auto& sec = cfg.sections.at(name);
    LearnerKind kind{};
    try {
      kind = ParseLearnerKind(name.substr(8));
    } catch (const Error& e) {
      BadLine(path, sec.empty() ? 0 : sec.begin()->second.line, e.what());
    }
    for (auto& s : ExpandGrid(kind, sec, path)) rc.grid.push_back(std::move(s));
  }
  if (rc.grid.empty())
    for (LearnerKind k : {LearnerKind::kGbt, LearnerKind::kRandomForest, LearnerKind::kExtraTrees,
                          LearnerKind::kLogRegL1, LearnerKind::kKnn, LearnerKind::kLda})
      rc.grid.push_back(ClassifierSpec::Default(k));

  if (cfg.sections.contains("meta")) {
    const auto& sec = cfg.sections.at("meta");
    ClassifierSpec meta = ClassifierSpec::DefaultMeta();
    for (const auto& [key, e] : sec) meta = meta.with(key, ParseDouble(e, path, key));
    try {
      meta.validate();
    } catch (const Error& err) {
      BadLine(path, sec.empty() ? 0 : sec.begin()->second.line, err.what());
    }
    rc.meta = meta;
  }

  if (const auto* e = cfg.find("importance", "learner")) {
    try {
      rc.importance_kind = ParseLearnerKind(e->value);
    } catch (const Error& err) {
      BadLine(path, e->line, err.what());
    }
  }

  if (cfg.sections.contains("learning_curve")) {
    LearningCurveConfig lc;
    LearnerKind kind = LearnerKind::kGbt;
    if (const auto* e = cfg.find("learning_curve", "learner")) {
      try {
        kind = ParseLearnerKind(e->value);
      } catch (const Error& err) {
        BadLine(path, e->line, err.what());
      }
    }
    lc.spec = ClassifierSpec::Default(kind);
    for (const auto& s : rc.grid)
      if (s.kind == kind) {
        lc.spec = s;
        break;
      }
    const auto* sizes = cfg.find("learning_curve", "sizes");
    if (!sizes) Fail(ErrorKind::kConfig, path + ": [learning_curve] needs 'sizes'");
    for (const auto& item : SplitList(sizes->value))
      lc.sizes.push_back(static_cast<std::size_t>(ParseInt({item, sizes->line}, path, "sizes", 1)));
    if (const auto* e = cfg.find("learning_curve", "replicates"))
      lc.replicates = ParseInt(*e, path, "replicates", 1);
    if (const auto* e = cfg.find("learning_curve", "validation_fraction")) {
      lc.validation_fraction = ParseDouble(*e, path, "validation_fraction");
      if (!(lc.validation_fraction > 0.0 && lc.validation_fraction < 1.0))
        BadLine(path, e->line, "validation_fraction must lie in (0, 1)");
    }
    rc.learning_curve = lc;
  }
  return rc;
}

}  // namespace leadrisk::cli
