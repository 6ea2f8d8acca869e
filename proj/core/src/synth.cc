#include "leadrisk/synth.h"

#include <algorithm>
#include <array>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <sstream>

#include "leadrisk/csv.h"
#include "leadrisk/error.h"
#include "leadrisk/gbt.h"
#include "leadrisk/ingest.h"
#include "leadrisk/metrics.h"
#include "leadrisk/rng.h"

namespace leadrisk {
namespace {

constexpr std::uint64_t kCityStream = 0x63697479ULL;
constexpr std::uint64_t kSignalStream = 0x7369676eULL;
constexpr std::uint64_t kCalibratedStream = 0x63616c73ULL;

constexpr std::array<std::string_view, 12> kStreets = {
    "Saginaw", "Dort", "Pierson", "Carpenter", "Welch", "Lapeer",
    "Hemphill", "Clio", "Detroit", "Fenton", "Atherton", "Mackin"};
constexpr std::array<std::string_view, 4> kSuffixShort = {"St", "Ave", "Rd", "Dr"};
constexpr std::array<std::string_view, 4> kSuffixLong = {"Street", "Avenue", "Road", "Drive"};
constexpr std::array<std::string_view, 6> kZips = {"48503", "48504", "48505",
                                                   "48506", "48507", "48532"};
constexpr std::array<std::string_view, 5> kHydrantMakers = {"Traverse City", "Darling", "Mueller",
                                                            "Waterous", "Kennedy"};
constexpr std::array<std::string_view, 4> kConditions = {"Good", "Fair", "Poor",
                                                         "Suggest Demolition"};
constexpr std::array<std::string_view, 4> kStyles = {"Ranch", "Bungalow", "Colonial", "Two Story"};

struct Cluster {
  double lat = 0.0;
  double lon = 0.0;
  double effect = 0.0;
  double era = 1950.0;
  double wealth = 0.0;
  int ward = 1;
  std::string_view zip;
  std::string_view street;
  double tract = 0.0;
};

struct Parcel {
  std::string pid;
  std::string address;
  int cluster = 0;
  double lat = 0.0;
  double lon = 0.0;
  std::optional<double> year;
  std::string private_material;
  std::string public_material;
  std::string sl_label;
  std::string sl_label2;
  bool lead_sl = false;
  double land_value = 0.0;
  double noise = 0.0;
};

double Normal(Rng& rng, double mean = 0.0, double sd = 1.0) {
  return std::normal_distribution<double>(mean, sd)(rng);
}

double Uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool Bernoulli(Rng& rng, double p) { return Uniform(rng) < p; }

template <class C>
auto Pick(Rng& rng, const C& options) {
  return options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
}

std::string Fixed(double v, int decimals) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(decimals);
  os << v;
  return os.str();
}

double LeadShare(double year) {
  if (year < 1930) return 0.55;
  if (year < 1950) return 0.35;
  if (year < 1970) return 0.12;
  return 0.03;
}

std::string MaterialFor(Rng& rng, double year, bool lead) {
  if (lead) return "Lead";
  const double u = Uniform(rng);
  if (year < 1950 && u < 0.25) return "Galvanized";
  if (u < 0.06) return "Unknown";
  return "Copper";
}

std::string SlLabel(Rng& rng, const std::string& priv, const std::string& pub) {
  if (priv == pub) {
    if (priv == "Copper" && Bernoulli(rng, 0.1)) return "CU";
    return priv;
  }
  return priv + "/" + pub;
}

std::string TestAddress(Rng& rng, int number, std::string_view street, std::size_t suffix) {
  const double u = Uniform(rng);
  std::string s = std::to_string(number) + " ";
  if (u < 0.4) return s + std::string(street) + " " + std::string(kSuffixShort[suffix]);
  if (u < 0.7) return s + std::string(street) + " " + std::string(kSuffixLong[suffix]);
  std::string up = s + std::string(street) + " " + std::string(kSuffixShort[suffix]) + ".";
  for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return up;
}

std::string SampleDate(Rng& rng) {
  const int month = std::uniform_int_distribution<int>(1, 12)(rng);
  const int day = std::uniform_int_distribution<int>(1, 28)(rng);
  char buf[32];
  if (Bernoulli(rng, 0.5))
    std::snprintf(buf, sizeof buf, "2016-%02d-%02d", month, day);
  else
    std::snprintf(buf, sizeof buf, "%d/%d/2016", month, day);
  return buf;
}

}  // namespace

void GeneratorConfig::validate() const {
  auto bad = [](const std::string& msg) { Fail(ErrorKind::kConfig, "generator: " + msg); };
  if (n_parcels < 1) bad("n_parcels must be >= 1");
  if (!(target_rate > 0.0 && target_rate < 1.0)) bad("target_rate must lie in (0, 1)");
  if (!(p_zero >= 0.0 && p_zero < 1.0)) bad("p_zero must lie in [0, 1)");
  if (!(tests_lambda > 0.0 && std::isfinite(tests_lambda))) bad("tests_lambda must be > 0");
  if (n_clusters < 1) bad("n_clusters must be >= 1");
  if (n_hydrants < 1) bad("n_hydrants must be >= 1");
  if (!(lognormal_sigma > 0.0 && std::isfinite(lognormal_sigma))) bad("lognormal_sigma must be > 0");
  for (double c : {coef_location, coef_year, coef_lead_sl, coef_land_value, coef_noise})
    if (!std::isfinite(c)) bad("signal coefficients must be finite");
}

nlohmann::json GeneratorConfig::to_json() const {
  return {{"n_parcels", n_parcels},         {"p_zero", p_zero},
          {"tests_lambda", tests_lambda},   {"target_rate", target_rate},
          {"n_clusters", n_clusters},       {"n_hydrants", n_hydrants},
          {"coef_location", coef_location}, {"coef_year", coef_year},
          {"coef_lead_sl", coef_lead_sl},   {"coef_land_value", coef_land_value},
          {"coef_noise", coef_noise},       {"lognormal_sigma", lognormal_sigma},
          {"seed", seed}};
}

nlohmann::json GroundTruth::to_json() const {
  nlohmann::json parcels = nlohmann::json::object();
  for (const auto& [pid, p] : probability) parcels[pid] = {{"probability", p}, {"log_mu", log_mu.at(pid)}};
  return {{"intercept", intercept}, {"sigma", sigma}, {"expected_rate", expected_rate},
          {"parcels", parcels}};
}

GroundTruth GroundTruth::FromJson(const nlohmann::json& j) {
  GroundTruth t;
  t.intercept = j.at("intercept").get<double>();
  t.sigma = j.at("sigma").get<double>();
  t.expected_rate = j.at("expected_rate").get<double>();
  for (const auto& [pid, v] : j.at("parcels").items()) {
    t.probability[pid] = v.at("probability").get<double>();
    t.log_mu[pid] = v.at("log_mu").get<double>();
  }
  return t;
}

double SolveIntercept(const std::vector<double>& signal, double target) {
  Require(!signal.empty(), "solve_intercept: empty signal");
  Require(target > 0.0 && target < 1.0, "solve_intercept: target must lie in (0, 1)");
  auto rate = [&](double a) {
    double s = 0.0;
    for (double v : signal) s += Sigmoid(a + v);
    return s / static_cast<double>(signal.size());
  };
  double lo = -60.0;
  double hi = 60.0;
  if (rate(lo) > target + 0.002 || rate(hi) < target - 0.002)
    Fail(ErrorKind::kConfig, "generator: target rate " + FormatDouble(target) +
                                 " is unreachable with the configured coefficients");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (rate(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double LogMuForExceedance(double p, double sigma) {
  Require(p > 0.0 && p < 1.0, "log_mu_for_exceedance: p must lie in (0, 1)");
  Require(sigma > 0.0, "log_mu_for_exceedance: sigma must be > 0");
  const boost::math::normal standard;
  return std::log(kActionLevelPpb) + sigma * boost::math::quantile(standard, p);
}

double BayesAuc(std::span<const double> true_probabilities, std::span<const int> labels) {
  return Auc(true_probabilities, labels);
}

double BayesAuc(const GroundTruth& truth, const Dataset& data) {
  std::vector<double> p;
  p.reserve(data.size());
  for (const auto& g : data.groups) {
    auto it = truth.probability.find(g);
    if (it == truth.probability.end())
      Fail(ErrorKind::kData, "bayes_auc: no ground truth for parcel '" + g + "'");
    p.push_back(it->second);
  }
  return Auc(p, data.labels);
}

SynthOutput Generate(const GeneratorConfig& config) {
  config.validate();
  Rng rng = MakeRng(config.seed, kCityStream);
  const BoundingBox box;
  const double margin_lat = 0.01;
  const double margin_lon = 0.015;

  std::vector<Cluster> clusters(static_cast<std::size_t>(config.n_clusters));
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    auto& k = clusters[c];
    k.lat = Uniform(rng, box.min_latitude + margin_lat, box.max_latitude - margin_lat);
    k.lon = Uniform(rng, box.min_longitude + margin_lon, box.max_longitude - margin_lon);
    k.effect = Normal(rng);
    k.era = Uniform(rng, 1915.0, 1995.0);
    k.wealth = Normal(rng, 0.0, 0.5) + (k.era - 1950.0) / 60.0;
    k.ward = static_cast<int>(c % 9) + 1;
    k.zip = kZips[c % kZips.size()];
    k.street = kStreets[c % kStreets.size()];
    k.tract = std::round(Uniform(rng, 1500.0, 4500.0));
  }

  std::vector<Parcel> parcels(config.n_parcels);
  for (std::size_t i = 0; i < parcels.size(); ++i) {
    auto& p = parcels[i];
    p.cluster = std::uniform_int_distribution<int>(0, config.n_clusters - 1)(rng);
    const Cluster& k = clusters[static_cast<std::size_t>(p.cluster)];
    p.pid = std::to_string(4100000000ULL + i * 7 + 3);
    const int number = 100 + static_cast<int>(i);
    const std::size_t suffix = i % kSuffixShort.size();
    p.address = std::to_string(number) + " " + std::string(k.street) + " " +
                std::string(kSuffixShort[suffix]);
    p.lat = std::clamp(k.lat + Normal(rng, 0.0, 0.006), box.min_latitude + 1e-4,
                       box.max_latitude - 1e-4);
    p.lon = std::clamp(k.lon + Normal(rng, 0.0, 0.008), box.min_longitude + 1e-4,
                       box.max_longitude - 1e-4);
    const double year = std::round(std::clamp(k.era + Normal(rng, 0.0, 8.0), 1880.0, 2015.0));
    if (!Bernoulli(rng, 0.03)) p.year = year;
    const bool priv_lead = Bernoulli(rng, LeadShare(year));
    const bool pub_lead = Bernoulli(rng, LeadShare(year) * 0.8);
    p.private_material = MaterialFor(rng, year, priv_lead);
    p.public_material = MaterialFor(rng, year, pub_lead);
    p.lead_sl = priv_lead || pub_lead;
    if (!Bernoulli(rng, 0.05)) {
      p.sl_label = SlLabel(rng, p.private_material, p.public_material);
      if (Bernoulli(rng, 0.3)) p.sl_label2 = p.public_material;
    }
    p.land_value = std::round(std::exp(Normal(rng, 8.5 + k.wealth, 0.6)));
    p.noise = Normal(rng);
  }

  std::vector<double> log_land(parcels.size());
  for (std::size_t i = 0; i < parcels.size(); ++i) log_land[i] = std::log(parcels[i].land_value + 1.0);
  const double ll_mean = Mean(log_land);
  double ll_sd = parcels.size() > 1 ? StdDev(log_land) : 1.0;
  if (!(ll_sd > 0.0)) ll_sd = 1.0;

  std::vector<double> signal(parcels.size());
  for (std::size_t i = 0; i < parcels.size(); ++i) {
    const auto& p = parcels[i];
    const Cluster& k = clusters[static_cast<std::size_t>(p.cluster)];
    const double year = p.year.value_or(k.era);
    signal[i] = config.coef_location * k.effect + config.coef_year * (1950.0 - year) / 20.0 +
                config.coef_lead_sl * (p.lead_sl ? 1.0 : 0.0) -
                config.coef_land_value * (log_land[i] - ll_mean) / ll_sd +
                config.coef_noise * p.noise;
  }

  SynthOutput out;
  GroundTruth& truth = out.truth;
  truth.sigma = config.lognormal_sigma;
  truth.intercept = SolveIntercept(signal, config.target_rate);
  std::vector<double> prob(parcels.size());
  for (std::size_t i = 0; i < parcels.size(); ++i) {
    prob[i] = std::clamp(Sigmoid(truth.intercept + signal[i]), 1e-6, 1.0 - 1e-6);
    truth.probability[parcels[i].pid] = prob[i];
    truth.log_mu[parcels[i].pid] = LogMuForExceedance(prob[i], truth.sigma);
  }
  truth.expected_rate = Mean(prob);
  if (std::abs(truth.expected_rate - config.target_rate) > 0.002)
    Fail(ErrorKind::kConfig, "generator: expected positive rate " +
                                 FormatDouble(truth.expected_rate) + " misses the target");

  // Hydrants sit around the clusters; older neighbourhoods get older makers.
  std::ostringstream hyd;
  hyd << "hydrant_id,hydrant_type,latitude,longitude\n";
  for (std::size_t h = 0; h < config.n_hydrants; ++h) {
    const Cluster& k = clusters[h % clusters.size()];
    const double age = std::clamp((1995.0 - k.era) / 80.0, 0.0, 1.0);
    const std::size_t maker =
        Bernoulli(rng, 0.75) ? std::min<std::size_t>(static_cast<std::size_t>((1.0 - age) * 5.0), 4)
                             : std::uniform_int_distribution<std::size_t>(0, 4)(rng);
    WriteCsvRow(hyd, {"H" + std::to_string(h + 1), std::string(kHydrantMakers[maker]),
                      Fixed(k.lat + Normal(rng, 0.0, 0.008), 6),
                      Fixed(k.lon + Normal(rng, 0.0, 0.01), 6)});
  }
  out.hydrants_csv = hyd.str();

  std::ostringstream pc;
  {
    std::vector<std::string> header{"Address"};
    for (const auto& col : ParcelColumns()) header.emplace_back(col.display_name);
    WriteCsvRow(pc, header);
  }
  std::ostringstream sl;
  sl << "pid,sl_type,sl_type2\n";
  for (std::size_t i = 0; i < parcels.size(); ++i) {
    const auto& p = parcels[i];
    const Cluster& k = clusters[static_cast<std::size_t>(p.cluster)];
    const bool residential = !Bernoulli(rng, 0.07);
    const bool homestead = residential && Bernoulli(rng, 0.55 + 0.1 * k.wealth);
    const bool vacant = Bernoulli(rng, std::clamp(0.15 - 0.08 * k.wealth, 0.02, 0.4));
    const double building = residential ? std::round(p.land_value * Uniform(rng, 2.0, 6.0)) : 0.0;
    const double commercial = residential ? 0.0 : std::round(p.land_value * Uniform(rng, 3.0, 9.0));
    const int ward = k.ward;
    std::string sl_lead;
    {
      const SlSplit split = SplitSlLabel(p.sl_label);
      if (split.private_material == Material::kLead || split.public_material == Material::kLead)
        sl_lead = "Lead";
      else if (split.private_material == Material::kUnknown &&
               split.public_material == Material::kUnknown)
        sl_lead = "Unknown";
      else
        sl_lead = "No Lead";
    }
    std::vector<std::string> row{
        p.address,
        p.pid,
        std::string(k.zip),
        Bernoulli(rng, 0.85) ? "Private" : (Bernoulli(rng, 0.5) ? "Land Bank" : "Public"),
        homestead ? "Yes" : "No",
        homestead ? "100" : "0",
        FormatDouble(std::round((p.land_value + building + commercial) / 2.0)),
        FormatDouble(p.land_value),
        Bernoulli(rng, 0.1) ? FormatDouble(std::round(Uniform(rng, 500.0, 5000.0))) : "0",
        FormatDouble(building),
        FormatDouble(commercial),
        residential ? std::string(Pick(rng, std::array<std::string_view, 3>{"1", "1.5", "2"})) : "1",
        Fixed(std::exp(-1.8 + 0.4 * p.noise), 4),
        residential ? "Residential" : "Commercial",
        residential ? (Bernoulli(rng, 0.9) ? "401" : "402") : "201",
        residential ? "RES" : "COM",
        p.year ? FormatDouble(*p.year) : "",
        vacant ? "Y" : "N",
        residential ? (Bernoulli(rng, 0.7) ? "R-1" : "R-2") : "C-1",
        std::string(Pick(rng, std::array<std::string_view, 3>{"Green Neighborhood",
                                                               "Traditional Neighborhood",
                                                               "Mixed Use"})),
        "TN-" + std::to_string(1 + static_cast<int>(i % 3)),
        Bernoulli(rng, 0.2) ? "" : std::string(Pick(rng, kConditions)),
        Bernoulli(rng, 0.2) ? "" : std::string(Pick(rng, kConditions)),
        residential ? "" : std::string(Pick(rng, kConditions)),
        Bernoulli(rng, 0.3) ? "Yes" : "No",
        residential ? std::string(Pick(rng, kStyles)) : "",
        Fixed(p.lat, 6),
        Fixed(p.lon, 6),
        "",
        std::to_string(ward),
        std::to_string(ward * 10 + static_cast<int>(i % 4)),
        FormatDouble(k.tract),
        std::to_string(1001 + static_cast<int>(i % 20)),
        p.sl_label,
        p.sl_label2,
        sl_lead,
    };
    WriteCsvRow(pc, row);
    WriteCsvRow(sl, {p.pid, p.sl_label, p.sl_label2});
  }
  out.parcels_csv = pc.str();
  out.service_lines_csv = sl.str();

  std::ostringstream tc;
  tc << "sample_date,lead_ppb,copper_ppb,address\n";
  std::poisson_distribution<int> poisson(config.tests_lambda);
  for (std::size_t i = 0; i < parcels.size(); ++i) {
    const auto& p = parcels[i];
    const int tests = Bernoulli(rng, config.p_zero) ? 0 : poisson(rng);
    const double mu = truth.log_mu.at(p.pid);
    const Cluster& k = clusters[static_cast<std::size_t>(p.cluster)];
    for (int t = 0; t < tests; ++t) {
      const double lead = std::exp(Normal(rng, mu, truth.sigma));
      const double copper = std::exp(Normal(rng, 4.5, 1.0));
      WriteCsvRow(tc, {SampleDate(rng), Fixed(lead, 3), Fixed(copper, 1),
                       TestAddress(rng, 100 + static_cast<int>(i), k.street, i % kSuffixShort.size())});
      ++out.test_count;
    }
  }
  out.tests_csv = tc.str();
  return out;
}

SignalData MakeSignalDataset(std::size_t rows, int noise_features, double signal_strength,
                             double base_rate, std::uint64_t seed, bool constant_feature) {
  Require(rows >= 2, "make_signal_dataset: need at least two rows");
  Require(noise_features >= 0, "make_signal_dataset: negative noise feature count");
  Rng rng = MakeRng(seed, kSignalStream);
  std::vector<FeatureDef> defs{{"signal", ColumnKind::kNumeric, {}}};
  for (int j = 1; j <= noise_features; ++j)
    defs.push_back({"noise" + std::to_string(j), ColumnKind::kNumeric, {}});
  if (constant_feature) defs.push_back({"constant", ColumnKind::kNumeric, {}});

  SignalData out;
  Dataset& d = out.dataset;
  d.schema = FeatureSchema(defs);
  d.rows = Matrix(rows, defs.size());
  std::vector<double> logit(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < 1 + static_cast<std::size_t>(noise_features); ++j) d.rows(i, j) = Normal(rng);
    if (constant_feature) d.rows(i, defs.size() - 1) = 1.0;
    logit[i] = signal_strength * d.rows(i, 0);
  }
  const double a = SolveIntercept(logit, base_rate);
  out.true_probability.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    out.true_probability[i] = Sigmoid(a + logit[i]);
    d.labels.push_back(Bernoulli(rng, out.true_probability[i]) ? 1 : 0);
    d.groups.push_back("r" + std::to_string(i));
  }
  return out;
}

CalibratedSample SampleCalibrated(std::size_t n, std::uint64_t seed) {
  Rng rng = MakeRng(seed, kCalibratedStream);
  CalibratedSample s;
  s.probability.resize(n);
  s.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = Uniform(rng);
    const double p = Bernoulli(rng, 0.3) ? u : u * u * u;
    s.probability[i] = p;
    s.labels[i] = Bernoulli(rng, p) ? 1 : 0;
  }
  return s;
}

}  // namespace leadrisk
