#include "toiep/rankone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "toiep/rng.hpp"

namespace toiep {

ProblemBSpec::ProblemBSpec(const HermitianMatrix& given, double eps_div)
    : given_(given), um_(unit_modulus(given, eps_div)) {
  if (given.n() < 2) throw InvalidInput("ProblemBSpec: need n >= 2");
  for (int p = 0; p < given.n(); ++p)
    if (!um_.mask(p, p)) throw InvalidInput("ProblemBSpec: zero diagonal entry");
}

namespace {

void check_dims(const ProblemBSpec& spec, const PhaseVector& psi) {
  if (psi.size() != spec.n() - 1) throw InvalidInput("phase vector length must be n-1");
}

// Off-diagonal factor U[p][p+k] with excluded entries zeroed.
inline cd masked(const UnitModulus& um, int p, int l) { return um.mask(p, l) ? um.u(p, l) : cd(0); }

CMatrix build_c(const UnitModulus& um, const RVector& psi) {
  const int n = static_cast<int>(um.u.rows());
  CMatrix c = CMatrix::Identity(n, n);
  for (int k = 1; k < n; ++k) {
    const cd e = std::polar(1.0, psi(k - 1));
    for (int p = 0; p + k < n; ++p) {
      c(p, p + k) = masked(um, p, p + k) * e;
      c(p + k, p) = std::conj(c(p, p + k));
    }
  }
  return rank_one_complete(c, um.mask);
}

// s_k = sum_p conj(u_p) U[p][p+k] u_{p+k}, k = 1..n-1
CVector lag_sums(const UnitModulus& um, const CVector& u) {
  const int n = static_cast<int>(u.size());
  CVector s = CVector::Zero(n - 1);
  for (int k = 1; k < n; ++k)
    for (int p = 0; p + k < n; ++p) s(k - 1) += std::conj(u(p)) * masked(um, p, p + k) * u(p + k);
  return s;
}

double secondary_mass(const RVector& w) { return w.head(w.size() - 1).cwiseAbs().sum(); }

void add_warning(std::vector<std::string>& w, const std::string& msg) {
  if (std::find(w.begin(), w.end(), msg) == w.end()) w.push_back(msg);
}

}  // namespace

HermitianMatrix build_c_matrix(const ProblemBSpec& spec, const PhaseVector& psi) {
  check_dims(spec, psi);
  return HermitianMatrix(build_c(spec.unit(), psi.values()));
}

RVector residual_problem_b(const ProblemBSpec& spec, const PhaseVector& psi) {
  RVector w = eigenvalues(build_c_matrix(spec, psi));
  return w.head(w.size() - 1);
}

Jacobian jacobian_problem_b(const ProblemBSpec& spec, const PhaseVector& psi) {
  check_dims(spec, psi);
  const int n = spec.n();
  Eigensystem es = eig_hermitian(build_c(spec.unit(), psi.values()));
  Jacobian jac{RMatrix(n - 1, n - 1), false};
  for (int r = 0; r + 1 < n; ++r) {
    CVector s = lag_sums(spec.unit(), es.vectors.col(r));
    for (int k = 1; k < n; ++k) jac.values(r, k - 1) = -2.0 * std::imag(std::polar(1.0, psi[k - 1]) * s(k - 1));
  }
  for (int i = 1; i < n; ++i)
    if (es.values(i) - es.values(i - 1) <= 1e-10) jac.degenerate = true;
  return jac;
}

namespace {

// Maximizes lambda_max(C(psi)); since trace C = n this drives the secondary
// mass to zero. Newton where the Hessian is negative definite, otherwise the
// closed-form majorize-minimize update psi_k = -arg(s_k).
RankOneResult run_problem_b(const ProblemBSpec& spec, const NewtonConfig& cfg, const RVector& start) {
  const UnitModulus& um = spec.unit();
  const int n = spec.n();
  const double cap = rad(cfg.max_step_deg);
  RankOneResult res;
  RVector psi = start;
  double best = std::numeric_limits<double>::infinity();
  RVector best_psi = psi;
  for (int it = 0; it < cfg.max_iters; ++it) {
    CMatrix c = build_c(um, psi);
    Eigensystem es = eig_hermitian(c);
    const double mass = secondary_mass(es.values);
    res.mass_history.push_back(mass);
    res.iterations = it + 1;
    if (mass < best) {
      best = mass;
      best_psi = psi;
    }
    if (mass < cfg.tol_residual) {
      res.converged = true;
      break;
    }
    const CVector u = es.vectors.col(n - 1);
    const double l1 = es.values(n - 1);
    // columns: C_k u and C_kk u
    CMatrix g1(n, n - 1), g2(n, n - 1);
    for (int k = 1; k < n; ++k) {
      const cd e = std::polar(1.0, psi(k - 1));
      for (int p = 0; p < n; ++p) {
        cd up = 0, dn = 0;
        if (p + k < n) up = e * masked(um, p, p + k) * u(p + k);
        if (p >= k) dn = std::conj(e * masked(um, p - k, p)) * u(p - k);
        g1(p, k - 1) = cd(0, 1) * (up - dn);
        g2(p, k - 1) = -(up + dn);
      }
    }
    RVector grad = (u.adjoint() * g1).real().transpose();
    RVector curv = (u.adjoint() * g2).real().transpose();
    CMatrix m = es.vectors.leftCols(n - 1).adjoint() * g1;  // (i, k) = u_i^H C_k u
    RVector inv_gap(n - 1);
    for (int i = 0; i + 1 < n; ++i) inv_gap(i) = 1.0 / std::max(l1 - es.values(i), 1e-300);
    RMatrix h = 2.0 * (m.transpose() * inv_gap.asDiagonal() * m.conjugate()).real();
    h.diagonal() += curv;
    h = 0.5 * (h + h.transpose()).eval();
    RVector hev = eigenvalues(h);
    const double hscale = hev.cwiseAbs().maxCoeff();
    RVector d;
    if (hscale > 0 && hev(hev.size() - 1) <= 1e-9 * hscale) {
      Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(h);
      cod.setThreshold(1e-10);
      d = -cod.solve(grad);
    } else {
      CVector s = lag_sums(um, u);
      d.resize(n - 1);
      for (int k = 0; k + 1 < n; ++k) d(k) = std::abs(s(k)) > 0 ? wrap_phase(-std::arg(s(k)) - psi(k)) : 0.0;
    }
    const double dmax = d.cwiseAbs().maxCoeff();
    if (!(dmax > 0.0) || !std::isfinite(dmax)) {
      add_warning(res.warnings, "stationary point reached without rank one");
      break;
    }
    psi += std::min(1.0, cap / dmax) * d;
  }
  res.phases = PhaseVector(best_psi);
  CMatrix c = build_c(um, best_psi);
  Eigensystem es = eig_hermitian(c);
  res.c_matrix = HermitianMatrix(c);
  res.secondary_eigen_mass = secondary_mass(es.values);
  res.principal_vector = es.vectors.col(n - 1);
  if (!spec.excluded().empty())
    add_warning(res.warnings, std::to_string(spec.excluded().size()) +
                                  " near-zero entries completed rank-one consistently");
  return res;
}

}  // namespace

RankOneResult solve_problem_b(const ProblemBSpec& spec, const NewtonConfig& config) {
  config.validate();
  const int m = spec.n() - 1;
  RankOneResult best;
  best.secondary_eigen_mass = std::numeric_limits<double>::infinity();
  int total = 0;
  for (int a = 0; a <= config.restarts; ++a) {
    RVector start;
    if (auto* u = std::get_if<UserInit>(&config.init)) {
      if (a > 0) break;
      if (u->phases.size() != m) throw InvalidInput("solve_problem_b: initial phases must have n-1 entries");
      start = u->phases.values();
    } else {
      const auto seed = std::get<RandomInit>(config.init).seed;
      start = random_phases(m, a == 0 ? seed : derive_seed(seed, {std::uint64_t(a)})).values();
    }
    RankOneResult r = run_problem_b(spec, config, start);
    total += r.iterations;
    if (r.secondary_eigen_mass < best.secondary_eigen_mass) best = std::move(r);
    if (best.converged) break;
  }
  best.iterations = total;
  return best;
}

double phase_rank_one_objective(const HermitianMatrix& m, const PhaseVector& psi) {
  ProblemBSpec spec(m);
  RVector w = eigenvalues(build_c_matrix(spec, psi));
  return secondary_mass(w);
}

}  // namespace toiep
