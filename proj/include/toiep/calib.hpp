#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toiep/covariance.hpp"
#include "toiep/linalg.hpp"
#include "toiep/real.hpp"

namespace toiep {

struct ArrayScenario {
  int n = 102;
  double d_over_lambda = 0.5;
  CovarianceModel model = Sinc{0.15};
  double theta_deg = 20.0;   // steer offset
  double noise_alpha = 0.01;  // noise-to-signal ratio
  std::optional<DiagPhase> phase_errors;  // drawn from seed when absent
  std::uint64_t seed = 1;

  void validate() const;
};

// phi_n uniform on [-pi, pi], phi_0 = 0
DiagPhase random_phase_errors(int n, std::uint64_t seed);

struct SimulatedScenario {
  HermitianToeplitz true_toeplitz;  // alpha I + model
  HermitianMatrix true_r;           // Phi T Phi^H
  DiagPhase phase_errors;           // ground truth
  DiagPhase applied;                // errors plus the steering ramp
};
SimulatedScenario simulate_scenario(const ArrayScenario& s);

struct SampleCovariance {
  HermitianMatrix matrix;
  long long t = 0;
};
SampleCovariance sample_covariance(const HermitianMatrix& true_r, long long t, std::uint64_t seed);

struct MeSpectrum {
  RVector grid;    // mu in [-pi, pi)
  RVector values;  // S(mu)
  bool ridge_applied = false;
};
MeSpectrum me_spectrum(const HermitianToeplitz& t, int grid_size = 2048);

enum class Isomorph { direct, alternating };
const char* to_string(Isomorph i);

struct IsomorphChoice {
  Isomorph choice = Isomorph::direct;
  bool ambiguous = false;
  double direct_score = 0;
  double alternating_score = 0;
  MeSpectrum direct_spectrum;
  MeSpectrum alternating_spectrum;
};
IsomorphChoice select_physical_isomorph(const SymmetricToeplitz& candidate, double d_over_lambda);

struct CalibrationEstimate {
  DiagPhase phases;
  Isomorph chosen_isomorph = Isomorph::direct;
  std::optional<double> rmse_deg;
  bool low_confidence = false;
  std::vector<int> chained;  // elements estimated through a neighbor lag
  std::vector<std::string> warnings;
};

CalibrationEstimate estimate_phases_toeplitz(const HermitianMatrix& r, const SymmetricToeplitz& t,
                                             double rel_threshold = 1e-8);

struct BinarySearchResult {
  SignPattern pattern;
  double objective = 0;
};
// Sum of |lambda_i| over all but the largest eigenvalue of the leading m-block
// of R_unit * Toep([1, sigma]).
double binary_rank_one_objective(const HermitianMatrix& r_unit, const SignPattern& sigma, int m);
BinarySearchResult binary_rank_one_search(const HermitianMatrix& r_unit, int start_m = 8, int growth = 2);

CalibrationEstimate estimate_phases_rank_one(const HermitianMatrix& r, const SignPattern& sigma);

double phase_rmse(const DiagPhase& est, const DiagPhase& truth);

enum class Route { rank_one, toeplitz };
const char* to_string(Route r);

struct PipelineResult {
  CalibrationEstimate estimate;
  SignPattern pattern;
  SymmetricToeplitz reconstructed;
  IsomorphChoice isomorph;
};
// Blind calibration of a measured covariance: modulus averaging, sign search,
// isomorph selection and phase estimation. The Toeplitz route falls back to
// the multi-start sign search when greedy is not exact, which is slow on
// sample data at large n.
PipelineResult calibrate(const HermitianMatrix& r_hat, double d_over_lambda, Route route = Route::rank_one);

struct TrialOutcome {
  double w = 0;
  long long t = 0;
  int trial = 0;
  double rmse_deg = 0;
  bool ok = false;
  Isomorph isomorph = Isomorph::direct;
  bool ambiguous = false;
  std::string error;
};

struct McCell {
  double w = 0;
  long long t = 0;
  double mean_rmse = 0;
  int ok = 0;
  int failed = 0;
};

struct McTable {
  std::vector<TrialOutcome> trials;
  std::vector<McCell> cells;  // row-major over (w, t)
};

// Replaces the bandwidth of the template's model (sinc, exponential, or the
// first band of a two-band model).
CovarianceModel with_bandwidth(const CovarianceModel& m, double w);

// t = 0 means exact covariance input (no sampling).
McTable monte_carlo_rmse(const ArrayScenario& tmpl, const std::vector<double>& w_list,
                         const std::vector<long long>& t_list, int trials, std::uint64_t master_seed,
                         Route route = Route::rank_one, unsigned threads = 0);

}  // namespace toiep
