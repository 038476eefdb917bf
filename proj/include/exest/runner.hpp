#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "exest/ecdf.hpp"
#include "exest/estimator.hpp"
#include "exest/truncation.hpp"

namespace exest {

enum class EstimatorKind { Z, ZStar, HarrisIndependent, HarrisImproved };

// One experiment cell: model, estimator/coupling, functional, truncation law
// and a budget given either as a replicate count or a nominal step budget.
struct ExperimentConfig {
  std::string model = "ar-bernoulli";  // "ar-bernoulli" | "mm1" | "finite:<csv path>"
  EstimatorKind estimator = EstimatorKind::Z;
  std::string functional;  // f1|f2|f3 (ar-bernoulli), ind1|id (mm1/finite); "" = default
  std::string truncation = "geom:0.5";
  std::optional<double> step_budget;
  std::optional<std::uint64_t> replicate_count;
  double confidence_level = 0.90;
  std::uint64_t master_seed = 1;
  unsigned workers = 1;
};

// "z" | "zstar" | "harris-independent" | "harris-improved"
EstimatorKind parse_estimator(const std::string& name);
std::string estimator_name(EstimatorKind kind);
std::string coupling_name(EstimatorKind kind);

// Grammar: "geom:R" | "invk" | "poly:ALPHA:C" | "inf" | "seq:v0,v1,...".
TruncationLaw parse_truncation(const std::string& spec);

// Replicate source for a config (validates model/estimator compatibility).
ReplicateGenerator make_generator(const ExperimentConfig& config,
                                  const TruncationLaw& law);

EstimateReport run_experiment(const ExperimentConfig& config);

std::string report_csv_header();
std::string report_csv_row(const ExperimentConfig& config, const EstimateReport& report);
std::string report_json(const ExperimentConfig& config, const EstimateReport& report);

// Full grid for one of the three reference tables, as CSV text.
std::string run_table(int table_id, std::uint64_t seed, unsigned workers);

// Signed-ECDF accumulation over n Harris replicates of the config.
SignedEcdf run_ecdf_experiment(const ExperimentConfig& config, std::uint64_t n);
std::string ecdf_csv(const SignedEcdf& ecdf);

// Pilot-estimates tail covariances (forcing N >= horizon) and returns the
// optimal truncation law; for Harris configs the empirical survival of
// min(tau, horizon) supplies the cost weights.
TruncationLaw pilot_optimal_truncation(const ExperimentConfig& config,
                                       std::uint64_t pilot_n, std::size_t horizon);

}  // namespace exest
