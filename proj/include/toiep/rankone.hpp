#pragma once

#include <string>
#include <vector>

#include "toiep/hermitian.hpp"

namespace toiep {

class ProblemBSpec {
 public:
  explicit ProblemBSpec(const HermitianMatrix& given, double eps_div = 1e-12);

  int n() const { return given_.n(); }
  const HermitianMatrix& given_matrix() const { return given_; }
  const CMatrix& unit_modulus_matrix() const { return um_.u; }
  const UnitModulus& unit() const { return um_; }
  // Entries with |r_pl| below eps_div; completed rank-one consistently in C.
  const std::vector<std::pair<int, int>>& excluded() const { return um_.excluded; }

 private:
  HermitianMatrix given_;
  UnitModulus um_;
};

struct RankOneResult {
  PhaseVector phases;
  HermitianMatrix c_matrix;
  double secondary_eigen_mass = 0;
  CVector principal_vector;
  bool converged = false;
  int iterations = 0;
  std::vector<double> mass_history;
  std::vector<std::string> warnings;
};

HermitianMatrix build_c_matrix(const ProblemBSpec& spec, const PhaseVector& psi);
RVector residual_problem_b(const ProblemBSpec& spec, const PhaseVector& psi);
Jacobian jacobian_problem_b(const ProblemBSpec& spec, const PhaseVector& psi);
RankOneResult solve_problem_b(const ProblemBSpec& spec, const NewtonConfig& config = {});

// Sum of |lambda_i| over all but the largest eigenvalue of the phase-rotated
// unit-modulus matrix of m.
double phase_rank_one_objective(const HermitianMatrix& m, const PhaseVector& psi);

}  // namespace toiep
