#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pls/spectral.hpp"

namespace pls {

/// How the eigenvalues of X^T X are produced.
struct SpectrumSpec {
  enum class Kind { Explicit, Clusters, Gap };
  Kind kind = Kind::Explicit;

  Eigen::VectorXd values;  // Explicit

  Eigen::VectorXd centers;  // Clusters: values center*(1 + spread*U(-1,1))
  double spread = 0.01;
  std::vector<int> counts;

  int gap_count = 0;  // Gap: gap_count values in [gap_low, gap_high], rest below
  double gap_low = 2.0, gap_high = 20.0;
  double rest_low = 0.1, rest_high = 0.5;
  int rest_count = 0;

  int size() const;
};

/// Draws the (sorted, positive) eigenvalues for a spec.
Eigen::VectorXd make_eigenvalues(const SpectrumSpec& spec, std::mt19937_64& rng);

/// How beta* is chosen, expressed in the right singular basis.
struct BetaSpec {
  enum class Kind { EqualWeight, RandomUnit, Aligned, Fixed };
  Kind kind = Kind::EqualWeight;
  double align_power = 1.0;  // Aligned: beta_tilde_i proportional to lambda_i^power
  Eigen::VectorXd fixed;     // Fixed: explicit coefficient vector (length p)
};

Eigen::VectorXd make_beta(const BetaSpec& spec, const SpectralDecomposition& decomp,
                          std::mt19937_64& rng);

struct ExperimentConfig {
  int n = 100;
  int p = 100;
  SpectrumSpec spectrum;
  BetaSpec beta;
  std::vector<double> noise_levels = {0.1};
  int reps = 100;
  std::vector<int> k_range = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::uint64_t seed = 0;
  std::string output_dir = ".";
};

/// Plain-text "key = value" format; lists comma-separated. Errors name the
/// offending key and line.
ExperimentConfig parse_config_text(const std::string& text, const std::string& name);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Canonical serialization (also the determinism fingerprint input).
std::string config_to_text(const ExperimentConfig& config);

/// Haar-orthogonal U, V composed around the requested spectrum.
DesignMatrix generate_design(const SpectrumSpec& spec, int n, int p, std::uint64_t seed);

/// One aggregate row of a study, keyed by (sigma, k).
struct CellAggregate {
  double sigma = 0.0;
  int k = 0;
  int reps = 0;
  double mean = 0.0;  // empirical risk or prediction error, study dependent
  double se = 0.0;
  double chem_factor = 0.0;
  double bound = 0.0;
  // prediction study extras (pathwise decomposition terms)
  double mean_eq12_term1 = 0.0;
  double mean_eq12_term2 = 0.0;
  double max_eq12_violation = 0.0;
  double max_qstar_gap = 0.0;
};

struct RunRecord {
  std::string study;
  std::uint64_t config_hash = 0;
  std::vector<CellAggregate> cells;
};

/// Per-sigma, per-k aggregates of (1/n)||y - X beta_k||^2 against the
/// expected-MSE bound. Deterministic given the config.
RunRecord run_risk_study(const ExperimentConfig& config);

/// Per-sigma, per-k aggregates of (1/n)||X beta* - X beta_k||^2, the
/// pathwise decomposition terms, and the noisy-vs-clean residual gap.
RunRecord run_prediction_study(const ExperimentConfig& config);

/// Residual-polynomial values along selected eigendirections, k = 1..k_max,
/// with a subset-sum cross-check when the enumeration fits under the cap.
struct ResidualPathTable {
  std::vector<int> direction_indices;       // 0-based into the spectrum
  Eigen::VectorXd eigenvalues;              // at those directions
  Eigen::MatrixXd values;                   // k_max x directions
  Eigen::VectorXd value_at_zero;            // identically 1
  Eigen::VectorXd crosscheck_max_diff;      // NaN where unavailable
  bool crosscheck_available = false;
};

ResidualPathTable run_residual_path(const ExperimentConfig& config,
                                    const std::vector<int>& direction_indices);

/// CSV serialization (bit-identical across runs for identical configs).
void write_risk_csv(const RunRecord& rec, const std::filesystem::path& path);
void write_prediction_csv(const RunRecord& rec, const std::filesystem::path& path);
void write_bounds_csv(const RunRecord& rec, double sigma, const std::filesystem::path& path);
void write_respath_csv(const ResidualPathTable& table, const std::filesystem::path& path);
void write_plot_script(const std::filesystem::path& dir);

}  // namespace pls
