#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "toiep/linalg.hpp"

namespace toiep {

class ProblemASpec {
 public:
  // moduli = [t_0, |t_1|, ..., |t_{N-1}|]; targets are sorted internally.
  ProblemASpec(RVector moduli, RVector target_eigenvalues);
  static ProblemASpec from_toeplitz(const HermitianToeplitz& t);

  int n() const { return static_cast<int>(moduli_.size()); }
  const RVector& moduli() const { return moduli_; }
  const RVector& targets() const { return targets_; }

 private:
  RVector moduli_;
  RVector targets_;
};

struct RandomInit {
  std::uint64_t seed = 1;
};
struct UserInit {
  PhaseVector phases;
};

struct NewtonConfig {
  double max_step_deg = 15.0;
  double tol_residual = 1e-6;
  int max_iters = 500;
  std::variant<RandomInit, UserInit> init = RandomInit{};
  int restarts = 0;  // extra random starts when a run does not converge

  void validate() const;
};

// Uniform on [-90, 90] degrees; the all-zero point is never returned.
PhaseVector random_phases(int count, std::uint64_t seed);

struct SolveReport {
  PhaseVector final_phases;
  std::vector<double> residual_history;
  bool converged = false;
  int iterations = 0;
  int starts = 1;
  std::vector<std::string> warnings;
};

struct Jacobian {
  RMatrix values;
  bool degenerate = false;  // some eigenvalue gap <= 1e-10
};

HermitianMatrix basis_matrix(int k, double psi, int n);
// d/dpsi of basis_matrix
HermitianMatrix basis_derivative(int k, double psi, int n);

HermitianToeplitz toeplitz_from_phases(const RVector& moduli, const PhaseVector& psi);

RVector eigenvalue_residual(const ProblemASpec& spec, const PhaseVector& psi);
Jacobian jacobian_problem_a(const ProblemASpec& spec, const PhaseVector& psi);

struct ProblemAResult {
  SolveReport report;
  HermitianToeplitz matrix;
};
ProblemAResult solve_problem_a(const ProblemASpec& spec, const NewtonConfig& config = {});

struct ApOptions {
  int max_sweeps = 10000;
  double tol = 1e-12;
  int stagnation_window = 100;
  double stagnation_delta = 1e-15;
};
struct ApResult {
  HermitianToeplitz matrix;
  double residual = 0;
  int sweeps = 0;
  bool converged = false;
  bool stagnated = false;
};
ApResult alternating_projections(const HermitianToeplitz& t, const RVector& targets,
                                 const ApOptions& opt = {});

struct MembershipOptions {
  double eps_div = 1e-12;
  double eps_rank = 1e-6;
  double eps_mod = 1e-6;
  double eps_phase_deg = 0.01;
  double max_excluded_fraction = 0.2;
};
struct MembershipResult {
  bool is_member = false;
  bool inconclusive = false;
  bool conjugate = false;    // matched the conj(T_ref) family
  double rank_ratio = 0;     // max_{i>=2} |lambda_i| / lambda_1
  RVector eigvec_moduli;     // principal eigenvector, unit norm
  RVector phase_steps_deg;   // consecutive phase differences
  std::vector<std::pair<int, int>> excluded;
};
MembershipResult family_membership_test(const HermitianToeplitz& rec, const HermitianToeplitz& ref,
                                        const MembershipOptions& opt = {});

}  // namespace toiep
