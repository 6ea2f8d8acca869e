#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "leadrisk/features.h"

namespace leadrisk {

// Synthetic city with a known per-parcel exceedance probability.
struct GeneratorConfig {
  std::size_t n_parcels = 4000;
  // Tests per parcel: zero with probability p_zero, otherwise Poisson(lambda).
  double p_zero = 0.3;
  double tests_lambda = 2.857;
  double target_rate = 0.083;
  int n_clusters = 12;
  std::size_t n_hydrants = 400;
  // Logit contributions: cluster effect ~ N(0, 1) scaled by coef_location;
  // year effect per 20 years of age relative to 1950; lead in either service
  // line segment; standardized log land value (higher value, lower risk);
  // one pure-noise numeric column.
  double coef_location = 0.8;
  double coef_year = 0.5;
  double coef_lead_sl = 0.9;
  double coef_land_value = 0.4;
  double coef_noise = 0.0;
  // Log-normal spread of lead readings (natural-log scale).
  double lognormal_sigma = 1.2;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
};

struct GroundTruth {
  std::map<std::string, double> probability;  // pid -> P(lead > 15 ppb)
  std::map<std::string, double> log_mu;       // pid -> log-normal location
  double intercept = 0.0;
  double sigma = 1.0;
  double expected_rate = 0.0;

  nlohmann::json to_json() const;
  static GroundTruth FromJson(const nlohmann::json& j);
};

struct SynthOutput {
  std::string parcels_csv;
  std::string tests_csv;
  std::string service_lines_csv;
  std::string hydrants_csv;
  GroundTruth truth;
  std::size_t test_count = 0;
};

// Deterministic in config.seed. Throws Error(kConfig) when the target rate
// cannot be met within 0.002 by any intercept.
SynthOutput Generate(const GeneratorConfig& config);

// Intercept a such that mean(sigmoid(a + s_i)) == target, by bisection.
double SolveIntercept(const std::vector<double>& signal, double target);

// Log-normal location whose exceedance probability over 15 ppb equals p.
double LogMuForExceedance(double p, double sigma);

// AUC of the true probabilities against realized labels.
double BayesAuc(std::span<const double> true_probabilities, std::span<const int> labels);
// Row probabilities looked up by the dataset's group keys.
double BayesAuc(const GroundTruth& truth, const Dataset& data);

// Small tabular generator: column "signal" drives the logit, "noise1".. do not.
// Groups are row ids. `true_probability` holds P(y = 1) per row.
struct SignalData {
  Dataset dataset;
  std::vector<double> true_probability;
};

SignalData MakeSignalDataset(std::size_t rows, int noise_features, double signal_strength,
                             double base_rate, std::uint64_t seed, bool constant_feature = false);

// Self-calibrated scores: p drawn from a low-heavy mixture, y ~ Bernoulli(p).
struct CalibratedSample {
  std::vector<double> probability;
  std::vector<int> labels;
};

CalibratedSample SampleCalibrated(std::size_t n, std::uint64_t seed);

}  // namespace leadrisk
