#pragma once

#include <optional>
#include <vector>

#include "toiep/linalg.hpp"

namespace toiep {

// Signs of lags 1..N-1; lag 0 is always +1.
class SignPattern {
 public:
  SignPattern() = default;
  explicit SignPattern(std::vector<int> signs);
  static SignPattern all_positive(int count) { return SignPattern(std::vector<int>(count, 1)); }
  // Sign of each lag of a real first row (zero counts as +1).
  static SignPattern of_row(const RVector& row);

  int size() const { return static_cast<int>(s_.size()); }
  int lag(int k) const { return s_[k - 1]; }
  void flip(int k) { s_[k - 1] = -s_[k - 1]; }
  const std::vector<int>& values() const { return s_; }
  int negatives() const;
  SignPattern alternated() const;  // lag k times (-1)^k
  RVector apply(const RVector& moduli) const;

  bool operator==(const SignPattern&) const = default;
  auto operator<=>(const SignPattern&) const = default;

 private:
  std::vector<int> s_;
};

struct MraConstraint {
  MraRuler ruler;
  RVector target_eigenvalues_m;
  std::optional<double> noise_floor;
};

class ProblemCSpec {
 public:
  ProblemCSpec(RVector moduli, RVector target_eigenvalues);
  ProblemCSpec(RVector moduli, MraConstraint mra);
  static ProblemCSpec from_row(const RVector& row);

  int n() const { return static_cast<int>(moduli_.size()); }
  const RVector& moduli() const { return moduli_; }
  // Full-size targets; in MRA mode the augmented list when a floor is set,
  // otherwise empty.
  const RVector& targets() const { return targets_; }
  const std::optional<MraConstraint>& mra() const { return mra_; }

 private:
  RVector moduli_;
  RVector targets_;
  std::optional<MraConstraint> mra_;
};

enum class Merit { euclidean, max_abs };

struct SearchOptions {
  double tol_exact = 1e-10;
  Merit merit = Merit::euclidean;
  double zero_modulus_tol = 1e-14;
  int max_steps = 100000;
  // Pair pre-flips are tried when single pre-flips fail and the number of
  // active lags is at most this.
  int dp_pair_limit = 24;
};

struct SearchStep {
  int lag;           // flipped lag
  double criterion;  // max-abs mismatch after the flip
  double merit;      // ranking merit after the flip
};

struct SearchTrace {
  std::vector<SearchStep> steps;
  double terminal_criterion = 0;
  int flips = 0;
};

struct SearchResult {
  SignPattern pattern;
  SearchTrace trace;
  SymmetricToeplitz matrix;
  bool exact = false;  // terminal criterion < tol_exact
};

// Mismatch components: sorted eigenvalue differences (full or MRA mode) plus
// the trailing-eigenvalue floor differences when a noise floor is set.
RVector mismatch(const ProblemCSpec& spec, const SignPattern& sigma);
double criterion(const ProblemCSpec& spec, const SignPattern& sigma);

SearchResult max_element_search(const ProblemCSpec& spec, const SearchOptions& opt = {});
SearchResult max_element_search(const ProblemCSpec& spec, const SignPattern& start,
                                const SearchOptions& opt = {});
// Greedy from the all-positive start and from every single pre-flipped lag;
// the best terminal pattern wins. Falls back to pairs of pre-flipped lags for
// small problems when no single start is exact.
SearchResult dynamic_programming_search(const ProblemCSpec& spec, const SearchOptions& opt = {});

// Lag-by-lag growth on the leading block under the noise-subspace condition,
// followed by a greedy polish on the full criterion. Needs an MRA floor.
SearchResult subspace_growth_search(const ProblemCSpec& spec, const SearchOptions& opt = {});

// Greedy, then the multi-start variant if not exact; MRA specs with a floor
// start from subspace growth.
SearchResult solve_problem_c(const ProblemCSpec& spec, const SearchOptions& opt = {});

SymmetricToeplitz isomorph(const SymmetricToeplitz& t);
RVector augment_noise_eigenvalues(const RVector& m_values, double noise_floor, int n);

}  // namespace toiep
