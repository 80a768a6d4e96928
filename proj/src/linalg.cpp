#include "toiep/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace toiep {

double wrap_phase(double x) {
  double y = std::remainder(x, 2.0 * kPi);  // [-pi, pi]
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

HermitianMatrix::HermitianMatrix(const CMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("HermitianMatrix: matrix must be square");
  double scale = m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
  double asym = m.size() ? (m - m.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  if (asym > 1e-8 * scale) {
    std::ostringstream os;
    os << "HermitianMatrix: asymmetry " << asym << " exceeds 1e-8 relative";
    throw InvalidInput(os.str());
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::from_real(const RMatrix& m) {
  return HermitianMatrix(CMatrix(m.cast<cd>()));
}

HermitianToeplitz::HermitianToeplitz(CVector first_row) : row_(std::move(first_row)) {
  if (row_.size() == 0) throw InvalidInput("HermitianToeplitz: empty first row");
  double t0 = std::abs(row_(0));
  if (std::abs(row_(0).imag()) > 1e-12 * std::max(1.0, t0))
    throw InvalidInput("HermitianToeplitz: first_row[0] must be real");
  row_(0) = row_(0).real();
}

CMatrix HermitianToeplitz::dense() const {
  const int n = this->n();
  CMatrix m(n, n);
  for (int p = 0; p < n; ++p)
    for (int l = 0; l < n; ++l) m(p, l) = l >= p ? row_(l - p) : std::conj(row_(p - l));
  return m;
}

SymmetricToeplitz::SymmetricToeplitz(RVector first_row) : row_(std::move(first_row)) {
  if (row_.size() == 0) throw InvalidInput("SymmetricToeplitz: empty first row");
}

RMatrix SymmetricToeplitz::dense() const {
  const int n = this->n();
  RMatrix m(n, n);
  for (int p = 0; p < n; ++p)
    for (int l = 0; l < n; ++l) m(p, l) = row_(std::abs(l - p));
  return m;
}

HermitianToeplitz SymmetricToeplitz::to_hermitian() const {
  return HermitianToeplitz(CVector(row_.cast<cd>()));
}

PhaseVector::PhaseVector(const RVector& psi) : psi_(psi.unaryExpr([](double x) { return wrap_phase(x); })) {}

DiagPhase::DiagPhase(const RVector& phi) : phi_(phi.size()) {
  if (phi.size() == 0) throw InvalidInput("DiagPhase: empty");
  for (int i = 0; i < phi.size(); ++i) phi_(i) = wrap_phase(phi(i) - phi(0));
}

DiagPhase DiagPhase::linear(int n, double step) {
  RVector phi(n);
  for (int i = 0; i < n; ++i) phi(i) = step * i;
  return DiagPhase(phi);
}

CVector DiagPhase::diagonal() const {
  CVector d(n());
  for (int i = 0; i < n(); ++i) d(i) = std::polar(1.0, phi_(i));
  return d;
}

CMatrix DiagPhase::matrix() const { return diagonal().asDiagonal(); }

DiagPhase DiagPhase::compose(const DiagPhase& other) const {
  if (other.n() != n()) throw InvalidInput("DiagPhase::compose: dimension mismatch");
  return DiagPhase(RVector(phi_ + other.phi_));
}

MraRuler::MraRuler(std::vector<int> positions, int n) : pos_(std::move(positions)), n_(n) {
  if (pos_.empty()) throw InvalidInput("MraRuler: no positions");
  if (pos_.front() != 0 || pos_.back() != n - 1)
    throw InvalidInput("MraRuler: positions must start at 0 and end at n-1");
  for (size_t i = 1; i < pos_.size(); ++i)
    if (pos_[i] <= pos_[i - 1]) throw InvalidInput("MraRuler: positions must be strictly increasing");
  std::vector<bool> seen(n, false);
  for (int a : pos_)
    for (int b : pos_)
      if (b >= a) seen[b - a] = true;
  for (int k = 1; k < n; ++k)
    if (!seen[k]) throw InvalidInput("MraRuler: lag " + std::to_string(k) + " not representable");
}

MraRuler MraRuler::ruler_17_of_102() {
  return MraRuler({0, 1, 2, 5, 10, 15, 26, 37, 48, 59, 70, 81, 87, 93, 99, 100, 101}, 102);
}

HermitianToeplitz toeplitz_from_first_row(const CVector& row, int n) {
  if (row.size() == 0) throw InvalidInput("toeplitz_from_first_row: empty row");
  if (row.size() != n) throw InvalidInput("toeplitz_from_first_row: row length differs from n");
  return HermitianToeplitz(row);
}

SymmetricToeplitz symmetric_toeplitz(const RVector& row) { return SymmetricToeplitz(row); }

Eigensystem eig_hermitian(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("eig_hermitian: eigensolver failed");
  Eigensystem out{es.eigenvalues(), es.eigenvectors()};
  // Largest-magnitude entry made real positive; near-ties resolve to the first index.
  for (int j = 0; j < out.vectors.cols(); ++j) {
    auto v = out.vectors.col(j);
    double vmax = v.cwiseAbs().maxCoeff();
    int idx = 0;
    while (std::abs(v(idx)) < vmax * (1.0 - 1e-9)) ++idx;
    v *= std::conj(v(idx)) / std::abs(v(idx));
  }
  return out;
}

Eigensystem eig_hermitian(const HermitianMatrix& m) { return eig_hermitian(m.dense()); }

RVector eigenvalues(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m.dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalues: eigensolver failed");
  return es.eigenvalues();
}

RVector eigenvalues(const RMatrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(symmetric, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalues: eigensolver failed");
  return es.eigenvalues();
}

HermitianMatrix apply_phase_errors(const HermitianMatrix& t, const DiagPhase& d) {
  if (t.n() != d.n()) throw InvalidInput("apply_phase_errors: dimension mismatch");
  CVector e = d.diagonal();
  CMatrix r = e.asDiagonal() * t.dense() * e.conjugate().asDiagonal();
  return HermitianMatrix(r);
}

HermitianMatrix apply_phase_errors(const HermitianToeplitz& t, const DiagPhase& d) {
  return apply_phase_errors(t.matrix(), d);
}

HermitianMatrix hadamard_quotient(const HermitianMatrix& a, const HermitianMatrix& b,
                                  const HadamardOptions& opt) {
  if (a.n() != b.n()) throw InvalidInput("hadamard_quotient: dimension mismatch");
  const int n = a.n();
  CMatrix q(n, n);
  for (int p = 0; p < n; ++p)
    for (int l = 0; l < n; ++l) {
      if (std::abs(b(p, l)) <= opt.eps_div) {
        std::ostringstream os;
        os << "hadamard_quotient: near-zero divisor at (" << p << ", " << l << ")";
        throw InvalidInput(os.str());
      }
      q(p, l) = a(p, l) / b(p, l);
    }
  return HermitianMatrix(q);
}

HermitianMatrix mra_select(const HermitianMatrix& m, const MraRuler& ruler) {
  if (ruler.n() > m.n()) throw InvalidInput("mra_select: ruler exceeds matrix dimension");
  const auto& pos = ruler.positions();
  const int k = ruler.m();
  CMatrix s(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) s(i, j) = m(pos[i], pos[j]);
  return HermitianMatrix(s);
}

RMatrix mra_select(const RMatrix& m, const MraRuler& ruler) {
  if (ruler.n() > m.rows()) throw InvalidInput("mra_select: ruler exceeds matrix dimension");
  const auto& pos = ruler.positions();
  const int k = ruler.m();
  RMatrix s(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) s(i, j) = m(pos[i], pos[j]);
  return s;
}

HermitianToeplitz redundancy_average(const HermitianMatrix& m) {
  const int n = m.n();
  CVector row(n);
  for (int k = 0; k < n; ++k) {
    cd s = 0;
    for (int p = 0; p + k < n; ++p) s += m(p, p + k);
    row(k) = s / double(n - k);
  }
  row(0) = row(0).real();
  return HermitianToeplitz(row);
}

SymmetricToeplitz modulus_average(const HermitianMatrix& m) {
  const int n = m.n();
  RVector row(n);
  for (int k = 0; k < n; ++k) {
    double s = 0;
    for (int p = 0; p + k < n; ++p) s += std::abs(m(p, p + k));
    row(k) = s / double(n - k);
  }
  return SymmetricToeplitz(row);
}

UnitModulus unit_modulus(const HermitianMatrix& m, double eps_div) {
  const int n = m.n();
  UnitModulus out{CMatrix::Zero(n, n), decltype(UnitModulus::mask)::Constant(n, n, true), {}};
  for (int p = 0; p < n; ++p)
    for (int l = 0; l < n; ++l) {
      double a = std::abs(m(p, l));
      if (a < eps_div) {
        out.mask(p, l) = false;
        if (p < l) out.excluded.emplace_back(p, l);
      } else {
        out.u(p, l) = m(p, l) / a;
      }
    }
  return out;
}

CMatrix rank_one_complete(const CMatrix& c,
                          const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask) {
  if (mask.all()) return c;
  CMatrix z = c;
  for (int p = 0; p < c.rows(); ++p)
    for (int l = 0; l < c.cols(); ++l)
      if (!mask(p, l)) z(p, l) = 0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(z);
  CVector v = es.eigenvectors().col(c.rows() - 1);
  for (int i = 0; i < v.size(); ++i) v(i) = std::abs(v(i)) > 0 ? v(i) / std::abs(v(i)) : cd(1.0);
  for (int p = 0; p < c.rows(); ++p)
    for (int l = 0; l < c.cols(); ++l)
      if (!mask(p, l)) z(p, l) = v(p) * std::conj(v(l));
  return z;
}

}  // namespace toiep
