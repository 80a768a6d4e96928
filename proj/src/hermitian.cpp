#include "toiep/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "toiep/rng.hpp"

namespace toiep {

ProblemASpec::ProblemASpec(RVector moduli, RVector target_eigenvalues)
    : moduli_(std::move(moduli)), targets_(std::move(target_eigenvalues)) {
  if (moduli_.size() < 2) throw InvalidInput("ProblemASpec: need n >= 2");
  if (targets_.size() != moduli_.size())
    throw InvalidInput("ProblemASpec: target count differs from n");
  if ((moduli_.array() < 0.0).any()) throw InvalidInput("ProblemASpec: moduli must be non-negative");
  std::sort(targets_.data(), targets_.data() + targets_.size());
  const double tr = moduli_(0) * n();
  if (std::abs(targets_.sum() - tr) > 1e-8 * std::max(1.0, std::abs(tr)))
    throw InvalidInput("ProblemASpec: eigenvalue sum differs from n*t_0");
}

ProblemASpec ProblemASpec::from_toeplitz(const HermitianToeplitz& t) {
  return ProblemASpec(t.first_row().cwiseAbs(), eigenvalues(t.matrix()));
}

void NewtonConfig::validate() const {
  if (!(max_step_deg > 0.0)) throw InvalidInput("NewtonConfig: max_step_deg must be positive");
  if (max_iters < 1) throw InvalidInput("NewtonConfig: max_iters must be >= 1");
  if (restarts < 0) throw InvalidInput("NewtonConfig: restarts must be >= 0");
  if (!(tol_residual > 0.0)) throw InvalidInput("NewtonConfig: tol_residual must be positive");
}

PhaseVector random_phases(int count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-kPi / 2, kPi / 2);
  RVector psi(count);
  do {
    for (int i = 0; i < count; ++i) psi(i) = u(gen);
  } while (count > 0 && psi.cwiseAbs().maxCoeff() == 0.0);
  return PhaseVector(psi);
}

HermitianMatrix basis_matrix(int k, double psi, int n) {
  if (k < 1 || k > n - 1) throw InvalidInput("basis_matrix: lag out of range");
  CMatrix a = CMatrix::Zero(n, n);
  const cd e = std::polar(1.0, psi);
  for (int p = 0; p + k < n; ++p) {
    a(p, p + k) = e;
    a(p + k, p) = std::conj(e);
  }
  return HermitianMatrix(a);
}

HermitianMatrix basis_derivative(int k, double psi, int n) {
  if (k < 1 || k > n - 1) throw InvalidInput("basis_derivative: lag out of range");
  CMatrix b = CMatrix::Zero(n, n);
  const cd e = cd(0, 1) * std::polar(1.0, psi);
  for (int p = 0; p + k < n; ++p) {
    b(p, p + k) = e;
    b(p + k, p) = std::conj(e);
  }
  return HermitianMatrix(b);
}

HermitianToeplitz toeplitz_from_phases(const RVector& moduli, const PhaseVector& psi) {
  if (psi.size() != moduli.size() - 1) throw InvalidInput("toeplitz_from_phases: size mismatch");
  CVector row(moduli.size());
  row(0) = moduli(0);
  for (int k = 1; k < moduli.size(); ++k) row(k) = std::polar(moduli(k), psi[k - 1]);
  return HermitianToeplitz(row);
}

namespace {

void check_dims(const ProblemASpec& spec, const PhaseVector& psi) {
  if (psi.size() != spec.n() - 1) throw InvalidInput("phase vector length must be n-1");
}

bool has_degenerate_gap(const RVector& w) {
  for (int i = 1; i < w.size(); ++i)
    if (w(i) - w(i - 1) <= 1e-10) return true;
  return false;
}

// J(j-1, k-1) = |t_k| u_j^H B_k u_j for eigenvectors j = 1..n-1.
RMatrix jacobian_from_eigen(const RVector& moduli, const PhaseVector& psi, const CMatrix& u) {
  const int n = static_cast<int>(moduli.size());
  RMatrix j(n - 1, n - 1);
  for (int k = 1; k < n; ++k) {
    const cd e = std::polar(1.0, psi[k - 1]);
    for (int r = 1; r < n; ++r) {
      const auto col = u.col(r);
      cd s = col.head(n - k).dot(col.tail(n - k));  // sum conj(u_p) u_{p+k}
      j(r - 1, k - 1) = -2.0 * moduli(k) * std::imag(e * s);
    }
  }
  return j;
}

}  // namespace

RVector eigenvalue_residual(const ProblemASpec& spec, const PhaseVector& psi) {
  check_dims(spec, psi);
  RVector w = eigenvalues(toeplitz_from_phases(spec.moduli(), psi).matrix());
  return (w - spec.targets()).tail(spec.n() - 1);
}

Jacobian jacobian_problem_a(const ProblemASpec& spec, const PhaseVector& psi) {
  check_dims(spec, psi);
  Eigensystem es = eig_hermitian(toeplitz_from_phases(spec.moduli(), psi).matrix());
  return {jacobian_from_eigen(spec.moduli(), psi, es.vectors), has_degenerate_gap(es.values)};
}

namespace {

void add_warning(std::vector<std::string>& w, const std::string& msg) {
  if (std::find(w.begin(), w.end(), msg) == w.end()) w.push_back(msg);
}

// Min-norm solve. J always annihilates the linear ramp (1, 2, ..., n-1), so a
// rank of n-2 is the generic case.
RVector newton_step(const RMatrix& j, const RVector& f, std::vector<std::string>& warnings) {
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(j);
  cod.setThreshold(1e-12);
  if (cod.rank() < j.cols() - 1)
    add_warning(warnings, "rank-deficient Jacobian beyond the phase-ramp direction; least-squares step used");
  return cod.solve(f);
}

SolveReport run_problem_a(const ProblemASpec& spec, const NewtonConfig& cfg, PhaseVector start) {
  SolveReport rep;
  const double cap = rad(cfg.max_step_deg);
  RVector psi = start.values();
  double best = std::numeric_limits<double>::infinity();
  RVector best_psi = psi;
  for (int it = 0; it < cfg.max_iters; ++it) {
    PhaseVector pv(psi);
    Eigensystem es = eig_hermitian(toeplitz_from_phases(spec.moduli(), pv).matrix());
    RVector f = (es.values - spec.targets()).tail(spec.n() - 1);
    const double r = f.cwiseAbs().maxCoeff();
    rep.residual_history.push_back(r);
    rep.iterations = it + 1;
    if (r < best) {
      best = r;
      best_psi = psi;
    }
    if (r < cfg.tol_residual) {
      rep.converged = true;
      break;
    }
    if (has_degenerate_gap(es.values)) add_warning(rep.warnings, "degenerate eigenvalue cluster");
    RVector d = newton_step(jacobian_from_eigen(spec.moduli(), pv, es.vectors), f, rep.warnings);
    const double dmax = d.cwiseAbs().maxCoeff();
    if (!(dmax > 0.0) || !std::isfinite(dmax)) break;
    psi -= std::min(1.0, cap / dmax) * d;
  }
  rep.final_phases = PhaseVector(best_psi);
  return rep;
}

}  // namespace

ProblemAResult solve_problem_a(const ProblemASpec& spec, const NewtonConfig& config) {
  config.validate();
  const int m = spec.n() - 1;
  SolveReport best;
  double best_r = std::numeric_limits<double>::infinity();
  int total = 0, attempts = 0;
  for (int a = 0; a <= config.restarts; ++a) {
    PhaseVector start;
    if (auto* u = std::get_if<UserInit>(&config.init)) {
      if (a > 0) break;
      if (u->phases.size() != m) throw InvalidInput("solve_problem_a: initial phases must have n-1 entries");
      if (u->phases.values().cwiseAbs().maxCoeff() == 0.0)
        throw InvalidInput("solve_problem_a: zero initial phases are not admissible");
      start = u->phases;
    } else {
      const auto seed = std::get<RandomInit>(config.init).seed;
      start = random_phases(m, a == 0 ? seed : derive_seed(seed, {std::uint64_t(a)}));
    }
    SolveReport rep = run_problem_a(spec, config, start);
    total += rep.iterations;
    ++attempts;
    const double r = *std::min_element(rep.residual_history.begin(), rep.residual_history.end());
    if (r < best_r) {
      best_r = r;
      best = std::move(rep);
    }
    if (best.converged) break;
  }
  best.iterations = total;
  best.starts = attempts;
  ProblemAResult out{best, toeplitz_from_phases(spec.moduli(), best.final_phases)};
  return out;
}

ApResult alternating_projections(const HermitianToeplitz& t, const RVector& targets_in,
                                 const ApOptions& opt) {
  if (targets_in.size() != t.n()) throw InvalidInput("alternating_projections: target count differs from n");
  RVector targets = targets_in;
  std::sort(targets.data(), targets.data() + targets.size());
  ApResult best{t, std::numeric_limits<double>::infinity(), 0, false, false};
  std::vector<double> best_hist;
  HermitianToeplitz cur = t;
  for (int s = 0; s <= opt.max_sweeps; ++s) {
    Eigensystem es = eig_hermitian(cur.matrix());
    const double r = (es.values - targets).cwiseAbs().maxCoeff();
    if (r < best.residual) {
      best.matrix = cur;
      best.residual = r;
    }
    best.sweeps = s;
    best_hist.push_back(best.residual);
    if (r < opt.tol) {
      best.converged = true;
      break;
    }
    if (s >= opt.stagnation_window &&
        best_hist[s - opt.stagnation_window] - best.residual < opt.stagnation_delta) {
      best.stagnated = true;
      break;
    }
    if (s == opt.max_sweeps) break;
    CMatrix proj = es.vectors * targets.asDiagonal() * es.vectors.adjoint();
    cur = redundancy_average(HermitianMatrix(proj));
  }
  return best;
}

namespace {

MembershipResult membership_against(const CMatrix& rec, const CMatrix& ref, const MembershipOptions& opt) {
  const int n = static_cast<int>(rec.rows());
  MembershipResult res;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(n, n);
  CMatrix a = CMatrix::Zero(n, n);
  for (int p = 0; p < n; ++p)
    for (int l = 0; l < n; ++l) {
      mask(p, l) = std::abs(ref(p, l)) >= opt.eps_div;
      if (mask(p, l))
        a(p, l) = rec(p, l) / ref(p, l);
      else if (p < l)
        res.excluded.emplace_back(p, l);
    }
  const double pairs = n * (n - 1) / 2.0;
  if (pairs > 0 && res.excluded.size() > opt.max_excluded_fraction * pairs) res.inconclusive = true;
  a = 0.5 * (a + a.adjoint()).eval();
  a = rank_one_complete(a, mask);
  Eigensystem es = eig_hermitian(a);
  const double l1 = es.values(n - 1);
  res.rank_ratio = n > 1 ? es.values.head(n - 1).cwiseAbs().maxCoeff() / std::abs(l1) : 0.0;
  CVector v = es.vectors.col(n - 1);
  res.eigvec_moduli = v.cwiseAbs();
  res.phase_steps_deg.resize(std::max(n - 1, 0));
  for (int i = 0; i + 1 < n; ++i) res.phase_steps_deg(i) = deg(std::arg(v(i + 1) * std::conj(v(i))));
  double mod_spread = res.eigvec_moduli.maxCoeff() - res.eigvec_moduli.minCoeff();
  double step_spread = 0;
  for (int i = 1; i + 1 < n; ++i)
    step_spread = std::max(step_spread,
                           std::abs(deg(wrap_phase(rad(res.phase_steps_deg(i) - res.phase_steps_deg(0))))));
  res.is_member = !res.inconclusive && l1 > 0 && res.rank_ratio < opt.eps_rank && mod_spread <= opt.eps_mod &&
                  step_spread <= opt.eps_phase_deg;
  return res;
}

}  // namespace

MembershipResult family_membership_test(const HermitianToeplitz& rec, const HermitianToeplitz& ref,
                                        const MembershipOptions& opt) {
  if (rec.n() != ref.n()) throw InvalidInput("family_membership_test: dimension mismatch");
  const CMatrix r = rec.dense(), f = ref.dense();
  MembershipResult direct = membership_against(r, f, opt);
  MembershipResult conj = membership_against(r, f.conjugate(), opt);
  conj.conjugate = true;
  if (direct.is_member) return direct;
  if (conj.is_member) return conj;
  return conj.rank_ratio < direct.rank_ratio ? conj : direct;
}

}  // namespace toiep
