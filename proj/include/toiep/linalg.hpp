#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace toiep {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Precondition violations (bad sizes, out-of-range parameters).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failures that cannot be recovered locally.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double wrap_phase(double x);  // to (-pi, pi]
inline double deg(double rad) { return rad * 180.0 / kPi; }
inline double rad(double deg) { return deg * kPi / 180.0; }

class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  // Checks symmetry to 1e-8 relative, then symmetrizes exactly.
  explicit HermitianMatrix(const CMatrix& m);
  static HermitianMatrix from_real(const RMatrix& m);

  int n() const { return static_cast<int>(m_.rows()); }
  const CMatrix& dense() const { return m_; }
  cd operator()(int p, int l) const { return m_(p, l); }

 private:
  CMatrix m_;
};

class HermitianToeplitz {
 public:
  HermitianToeplitz() = default;
  explicit HermitianToeplitz(CVector first_row);

  int n() const { return static_cast<int>(row_.size()); }
  const CVector& first_row() const { return row_; }
  // t_k for k >= 0 is first_row[k]; negative lags are conjugates.
  cd lag(int k) const { return k >= 0 ? row_(k) : std::conj(row_(-k)); }
  CMatrix dense() const;
  HermitianMatrix matrix() const { return HermitianMatrix(dense()); }

 private:
  CVector row_;
};

class SymmetricToeplitz {
 public:
  SymmetricToeplitz() = default;
  explicit SymmetricToeplitz(RVector first_row);

  int n() const { return static_cast<int>(row_.size()); }
  const RVector& first_row() const { return row_; }
  RMatrix dense() const;
  HermitianToeplitz to_hermitian() const;

 private:
  RVector row_;
};

struct Eigensystem {
  RVector values;   // ascending
  CMatrix vectors;  // column j pairs with values[j]
};

// N-1 sub-diagonal phases, each kept in (-pi, pi].
class PhaseVector {
 public:
  PhaseVector() = default;
  explicit PhaseVector(const RVector& psi);
  int size() const { return static_cast<int>(psi_.size()); }
  double operator[](int i) const { return psi_(i); }
  const RVector& values() const { return psi_; }
  RVector degrees() const { return psi_ * (180.0 / kPi); }

 private:
  RVector psi_;
};

// diag[exp(j phi_n)] with phi_0 = 0 (the global phase is dropped).
class DiagPhase {
 public:
  DiagPhase() = default;
  explicit DiagPhase(const RVector& phi);
  static DiagPhase identity(int n) { return DiagPhase(RVector::Zero(n)); }
  static DiagPhase linear(int n, double step);

  int n() const { return static_cast<int>(phi_.size()); }
  double operator[](int i) const { return phi_(i); }
  const RVector& values() const { return phi_; }
  CVector diagonal() const;
  CMatrix matrix() const;
  DiagPhase compose(const DiagPhase& other) const;

 private:
  RVector phi_;
};

class MraRuler {
 public:
  MraRuler() = default;
  MraRuler(std::vector<int> positions, int n);
  // The 17-element ruler spanning a 102-element aperture.
  static MraRuler ruler_17_of_102();

  int m() const { return static_cast<int>(pos_.size()); }
  int n() const { return n_; }
  const std::vector<int>& positions() const { return pos_; }

 private:
  std::vector<int> pos_;
  int n_ = 0;
};

HermitianToeplitz toeplitz_from_first_row(const CVector& row, int n);
SymmetricToeplitz symmetric_toeplitz(const RVector& row);

Eigensystem eig_hermitian(const HermitianMatrix& m);
Eigensystem eig_hermitian(const CMatrix& m);
RVector eigenvalues(const HermitianMatrix& m);
RVector eigenvalues(const RMatrix& symmetric);

HermitianMatrix apply_phase_errors(const HermitianToeplitz& t, const DiagPhase& d);
HermitianMatrix apply_phase_errors(const HermitianMatrix& t, const DiagPhase& d);

struct HadamardOptions {
  double eps_div = 1e-12;
};
HermitianMatrix hadamard_quotient(const HermitianMatrix& a, const HermitianMatrix& b,
                                  const HadamardOptions& opt = {});

HermitianMatrix mra_select(const HermitianMatrix& m, const MraRuler& ruler);
RMatrix mra_select(const RMatrix& m, const MraRuler& ruler);

HermitianToeplitz redundancy_average(const HermitianMatrix& m);
SymmetricToeplitz modulus_average(const HermitianMatrix& m);

// Entry-wise unit-modulus normalization; entries below eps_div become 0 and
// are marked false in the returned mask.
struct UnitModulus {
  CMatrix u;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
  std::vector<std::pair<int, int>> excluded;  // p < l
};
UnitModulus unit_modulus(const HermitianMatrix& m, double eps_div = 1e-12);

// Fills the masked-out entries of a unit-modulus Hermitian matrix with the
// only rank-one consistent value v_p conj(v_l), v taken from the principal
// eigenvector of the zero-filled matrix, normalized to unit modulus.
CMatrix rank_one_complete(const CMatrix& c,
                          const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask);

}  // namespace toiep
