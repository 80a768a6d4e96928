#include "toiep/calib.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "toiep/parallel.hpp"
#include "toiep/rng.hpp"

namespace toiep {

void ArrayScenario::validate() const {
  if (n < 2) throw InvalidInput("ArrayScenario: n must be >= 2");
  if (!(d_over_lambda > 0.0)) throw InvalidInput("ArrayScenario: d/lambda must be positive");
  if (noise_alpha < 0.0) throw InvalidInput("ArrayScenario: noise alpha must be >= 0");
  if (phase_errors && phase_errors->n() != n) throw InvalidInput("ArrayScenario: phase error length differs from n");
}

DiagPhase random_phase_errors(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  RVector phi(n);
  phi(0) = 0;
  for (int i = 1; i < n; ++i) phi(i) = u(gen);
  return DiagPhase(phi);
}

SimulatedScenario simulate_scenario(const ArrayScenario& s) {
  s.validate();
  HermitianToeplitz t = generate(with_noise(s.noise_alpha, s.model), s.n, s.d_over_lambda);
  DiagPhase err = s.phase_errors ? *s.phase_errors : random_phase_errors(s.n, s.seed);
  DiagPhase ramp = DiagPhase::linear(s.n, 2.0 * kPi * s.d_over_lambda * std::sin(rad(s.theta_deg)));
  DiagPhase applied = err.compose(ramp);
  return {t, apply_phase_errors(t, applied), err, applied};
}

SampleCovariance sample_covariance(const HermitianMatrix& true_r, long long t, std::uint64_t seed) {
  if (t < 1) throw InvalidInput("sample_covariance: T must be >= 1");
  const int n = true_r.n();
  Eigensystem es = eig_hermitian(true_r);
  const double top = es.values.cwiseAbs().maxCoeff();
  if (es.values(0) < -1e-10 * top) throw InvalidInput("sample_covariance: covariance is not PSD");
  CMatrix root = es.vectors * es.values.cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.vectors.adjoint();
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CMatrix acc = CMatrix::Zero(n, n);
  const long long batch = 4096;
  CMatrix xi;
  for (long long done = 0; done < t; done += batch) {
    const int b = static_cast<int>(std::min(batch, t - done));
    xi.resize(n, b);
    for (int c = 0; c < b; ++c)
      for (int r = 0; r < n; ++r) {
        const double re = nd(gen);
        xi(r, c) = cd(re, nd(gen));
      }
    CMatrix x = root * xi;
    acc.selfadjointView<Eigen::Lower>().rankUpdate(x);
  }
  CMatrix full = acc.triangularView<Eigen::Lower>();
  full.triangularView<Eigen::StrictlyUpper>() = acc.adjoint().triangularView<Eigen::StrictlyUpper>();
  return {HermitianMatrix(full / double(t)), t};
}

MeSpectrum me_spectrum(const HermitianToeplitz& t, int grid_size) {
  if (grid_size < 2) throw InvalidInput("me_spectrum: grid size must be >= 2");
  const int n = t.n();
  CMatrix m = t.dense();
  MeSpectrum out;
  RVector ev = eigenvalues(HermitianMatrix(m));
  const double top = ev(n - 1);
  if (!(ev(0) > 1e-12 * top)) {
    const double delta = 1e-10 * t.first_row()(0).real();
    m.diagonal().array() += delta;
    out.ridge_applied = true;
    if (!(ev(0) + delta > 0.0)) throw NumericalError("me_spectrum: matrix is singular even after ridge");
  }
  Eigen::LDLT<CMatrix> ldlt(m);
  CVector e1 = CVector::Zero(n);
  e1(0) = 1;
  CVector c = ldlt.solve(e1);
  out.grid.resize(grid_size);
  out.values.resize(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    const double mu = -kPi + 2.0 * kPi * i / grid_size;
    cd s = 0;
    for (int k = 0; k < n; ++k) s += std::polar(1.0, -mu * k) * c(k);
    out.grid(i) = mu;
    out.values(i) = 1.0 / std::norm(s);
  }
  if (!out.values.allFinite()) throw NumericalError("me_spectrum: non-finite spectrum");
  return out;
}

const char* to_string(Isomorph i) { return i == Isomorph::direct ? "direct" : "alternating"; }
const char* to_string(Route r) { return r == Route::rank_one ? "rank-one" : "toeplitz"; }

namespace {

// Larger is more physical: visible-sector mass fraction for d/lambda < 1/2,
// otherwise the mass-weighted mean of cos(mu).
double physical_score(const MeSpectrum& s, double d_over_lambda) {
  const double total = s.values.sum();
  double acc = 0;
  if (d_over_lambda < 0.5) {
    const double edge = 2.0 * kPi * d_over_lambda;
    for (int i = 0; i < s.grid.size(); ++i)
      if (std::abs(s.grid(i)) <= edge) acc += s.values(i);
  } else {
    for (int i = 0; i < s.grid.size(); ++i) acc += s.values(i) * std::cos(s.grid(i));
  }
  return acc / total;
}

}  // namespace

IsomorphChoice select_physical_isomorph(const SymmetricToeplitz& candidate, double d_over_lambda) {
  if (!(d_over_lambda > 0.0)) throw InvalidInput("select_physical_isomorph: d/lambda must be positive");
  IsomorphChoice out;
  // Estimated candidates can be indefinite; both isomorphs share a spectrum,
  // so a common diagonal load keeps the comparison fair.
  SymmetricToeplitz loaded = candidate;
  const RVector ev = eigenvalues(candidate.dense());
  const double floor = 1e-6 * ev.cwiseAbs().maxCoeff();
  if (ev(0) < floor) {
    RVector row = candidate.first_row();
    row(0) += floor - ev(0);
    loaded = SymmetricToeplitz(row);
  }
  out.direct_spectrum = me_spectrum(loaded.to_hermitian());
  out.alternating_spectrum = me_spectrum(isomorph(loaded).to_hermitian());
  out.direct_score = physical_score(out.direct_spectrum, d_over_lambda);
  out.alternating_score = physical_score(out.alternating_spectrum, d_over_lambda);
  out.choice = out.alternating_score > out.direct_score ? Isomorph::alternating : Isomorph::direct;
  const double big = std::max(std::abs(out.direct_score), std::abs(out.alternating_score));
  out.ambiguous = std::abs(out.direct_score - out.alternating_score) < 0.01 * big || big == 0.0;
  return out;
}

CalibrationEstimate estimate_phases_toeplitz(const HermitianMatrix& r, const SymmetricToeplitz& t,
                                             double rel_threshold) {
  const int n = r.n();
  if (t.n() != n) throw InvalidInput("estimate_phases_toeplitz: dimension mismatch");
  const RVector& row = t.first_row();
  const double thr = rel_threshold * std::abs(row(0));
  auto sign_phase = [&](int k) { return row(k) < 0 ? kPi : 0.0; };
  CalibrationEstimate est;
  RVector phi = RVector::Zero(n);
  for (int i = 1; i < n; ++i) {
    if (std::abs(row(i)) >= thr) {
      phi(i) = std::arg(r(i, 0)) - sign_phase(i);
      continue;
    }
    // chain through the strongest usable lag to an earlier element
    int best = -1;
    for (int m = 0; m < i; ++m)
      if (std::abs(row(i - m)) >= thr && (best < 0 || std::abs(row(i - m)) > std::abs(row(i - best)))) best = m;
    if (best < 0) {
      est.warnings.push_back("element " + std::to_string(i) + " has no usable lag; phase set to 0");
      est.low_confidence = true;
      continue;
    }
    phi(i) = phi(best) + std::arg(r(i, best)) - sign_phase(i - best);
    est.chained.push_back(i);
  }
  if (est.chained.size() > 0.3 * (n - 1)) {
    est.low_confidence = true;
    est.warnings.push_back("more than 30% of lags below threshold; the rank-one route is recommended");
  }
  est.phases = DiagPhase(phi);
  return est;
}

namespace {

using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

Mask nonzero_mask(const CMatrix& u) { return (u.cwiseAbs().array() > 0.5).matrix(); }

CMatrix signed_block(const CMatrix& u, const SignPattern& sigma, int m) {
  CMatrix a = u.topLeftCorner(m, m);
  for (int p = 0; p < m; ++p)
    for (int l = 0; l < m; ++l)
      if (p != l) a(p, l) *= sigma.lag(std::abs(p - l));
  return a;
}

double objective_on(const CMatrix& u, const Mask& mask, const SignPattern& sigma, int m) {
  CMatrix a = rank_one_complete(signed_block(u, sigma, m), mask.topLeftCorner(m, m));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
  const RVector& w = es.eigenvalues();
  return w.head(m - 1).cwiseAbs().sum();
}

CMatrix unit_of(const HermitianMatrix& r) {
  UnitModulus um = unit_modulus(r);
  return um.u;
}

}  // namespace

double binary_rank_one_objective(const HermitianMatrix& r_unit, const SignPattern& sigma, int m) {
  if (m < 1 || m > r_unit.n() || sigma.size() < m - 1) throw InvalidInput("binary_rank_one_objective: bad block size");
  return objective_on(r_unit.dense(), nonzero_mask(r_unit.dense()), sigma, m);
}

BinarySearchResult binary_rank_one_search(const HermitianMatrix& r_unit, int start_m, int growth) {
  const int n = r_unit.n();
  if (n < 2) throw InvalidInput("binary_rank_one_search: need n >= 2");
  if (start_m < 2 || growth < 2) throw InvalidInput("binary_rank_one_search: start_m and growth must be >= 2");
  const CMatrix& u = r_unit.dense();
  const Mask mask = nonzero_mask(u);
  std::vector<int> s(n - 1, 1);
  int m = std::min(start_m, n);
  // exhaustive over lags 2..m-1; lag 1 fixed to +1 (isomorph ambiguity)
  const int free = m - 2;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_s = s;
  for (long bits = 0; bits < (1L << free); ++bits) {
    for (int i = 0; i < free; ++i) s[i + 1] = (bits >> i) & 1 ? -1 : 1;
    const double o = objective_on(u, mask, SignPattern(s), m);
    if (o < best) {
      best = o;
      best_s = s;
    }
  }
  s = best_s;
  while (m < n) {
    const int m2 = std::min(growth * m, n);
    // corner element of each (k+1)-block fixes lag k
    for (int k = m; k < m2; ++k) {
      const double plus = objective_on(u, mask, SignPattern(s), k + 1);
      s[k - 1] = -1;
      const double minus = objective_on(u, mask, SignPattern(s), k + 1);
      s[k - 1] = plus <= minus ? 1 : -1;
    }
    // greedy polish of the new lags on the grown block
    double cur = objective_on(u, mask, SignPattern(s), m2);
    for (;;) {
      int bj = -1;
      double bv = cur;
      for (int k = m; k < m2; ++k) {
        s[k - 1] = -s[k - 1];
        const double o = objective_on(u, mask, SignPattern(s), m2);
        s[k - 1] = -s[k - 1];
        if (o < bv - 1e-15) {
          bv = o;
          bj = k;
        }
      }
      if (bj < 0) break;
      s[bj - 1] = -s[bj - 1];
      cur = bv;
    }
    m = m2;
  }
  SignPattern out(s);
  return {out, objective_on(u, mask, out, n)};
}

CalibrationEstimate estimate_phases_rank_one(const HermitianMatrix& r, const SignPattern& sigma) {
  const int n = r.n();
  if (sigma.size() != n - 1) throw InvalidInput("estimate_phases_rank_one: sign pattern must cover all lags");
  const CMatrix u = unit_of(r);
  CMatrix a = rank_one_complete(signed_block(u, sigma, n), nonzero_mask(u));
  Eigensystem es = eig_hermitian(a);
  CVector v = es.vectors.col(n - 1);
  RVector phi(n);
  for (int i = 0; i < n; ++i) phi(i) = std::arg(v(i) * std::conj(v(0)));
  CalibrationEstimate est;
  est.phases = DiagPhase(phi);
  const double second = es.values.head(n - 1).cwiseAbs().maxCoeff();
  if (es.values(n - 1) < 2.0 * second) {
    est.low_confidence = true;
    est.warnings.push_back("principal to secondary eigenvalue ratio below 2");
  }
  return est;
}

double phase_rmse(const DiagPhase& est, const DiagPhase& truth) {
  const int n = est.n();
  if (truth.n() != n) throw InvalidInput("phase_rmse: length mismatch");
  if (n < 2) return 0.0;
  RVector idx = RVector::LinSpaced(n, 0, n - 1);
  double best = std::numeric_limits<double>::infinity();
  for (int alt = 0; alt < 2; ++alt) {
    RVector d(n);
    for (int i = 0; i < n; ++i) d(i) = wrap_phase(est[i] - truth[i] + alt * kPi * i);
    // circular slope and offset, then a least-squares refinement
    cd inc = 0;
    for (int i = 0; i + 1 < n; ++i) inc += std::polar(1.0, d(i + 1) - d(i));
    const double slope = std::arg(inc);
    RVector r(n);
    cd off = 0;
    for (int i = 0; i < n; ++i) {
      r(i) = wrap_phase(d(i) - slope * i);
      off += std::polar(1.0, r(i));
    }
    const double c = std::arg(off);
    for (int i = 0; i < n; ++i) r(i) = wrap_phase(r(i) - c);
    const double mi = idx.mean(), mr = r.mean();
    const double sxx = (idx.array() - mi).square().sum();
    const double b = ((idx.array() - mi) * (r.array() - mr)).sum() / sxx;
    for (int i = 0; i < n; ++i) r(i) = wrap_phase(r(i) - mr - b * (i - mi));
    best = std::min(best, deg(std::sqrt(r.squaredNorm() / n)));
  }
  return best;
}

PipelineResult calibrate(const HermitianMatrix& r_hat, double d_over_lambda, Route route) {
  SymmetricToeplitz mod = modulus_average(r_hat);
  PipelineResult out;
  if (route == Route::rank_one) {
    HermitianMatrix ru(unit_of(r_hat));
    out.pattern = binary_rank_one_search(ru).pattern;
  } else {
    ProblemCSpec spec(mod.first_row(), eigenvalues(r_hat));
    out.pattern = solve_problem_c(spec).pattern;
  }
  out.reconstructed = SymmetricToeplitz(out.pattern.apply(mod.first_row()));
  out.isomorph = select_physical_isomorph(out.reconstructed, d_over_lambda);
  if (out.isomorph.choice == Isomorph::alternating) {
    out.pattern = out.pattern.alternated();
    out.reconstructed = isomorph(out.reconstructed);
  }
  out.estimate = route == Route::rank_one ? estimate_phases_rank_one(r_hat, out.pattern)
                                          : estimate_phases_toeplitz(r_hat, out.reconstructed);
  out.estimate.chosen_isomorph = out.isomorph.choice;
  if (out.isomorph.ambiguous) out.estimate.warnings.push_back("isomorph choice ambiguous");
  return out;
}

CovarianceModel with_bandwidth(const CovarianceModel& m, double w) {
  struct V {
    double w;
    CovarianceModel operator()(const Sinc&) const { return Sinc{w}; }
    CovarianceModel operator()(const Exponential& e) const { return Exponential{w, e.alpha}; }
    CovarianceModel operator()(const TwoBand& t) const { return TwoBand{w, t.w2, t.theta_deg, t.weight}; }
    CovarianceModel operator()(const ScaledIdentityPlus& s) const {
      return ScaledIdentityPlus{s.alpha, std::make_shared<const CovarianceModel>(with_bandwidth(*s.inner, w))};
    }
  };
  return std::visit(V{w}, m);
}

McTable monte_carlo_rmse(const ArrayScenario& tmpl, const std::vector<double>& w_list,
                         const std::vector<long long>& t_list, int trials, std::uint64_t master_seed, Route route,
                         unsigned threads) {
  if (trials < 1) throw InvalidInput("monte_carlo_rmse: trials must be >= 1");
  if (w_list.empty() || t_list.empty()) throw InvalidInput("monte_carlo_rmse: empty grid");
  const int nw = static_cast<int>(w_list.size()), nt = static_cast<int>(t_list.size());
  const int total = nw * nt * trials;
  McTable table;
  table.trials.resize(total);
  parallel_for(
      total,
      [&](int idx) {
        const int wi = idx / (nt * trials), ti = (idx / trials) % nt, tr = idx % trials;
        TrialOutcome& o = table.trials[idx];
        o.w = w_list[wi];
        o.t = t_list[ti];
        o.trial = tr;
        try {
          const auto seed = derive_seed(master_seed, {std::uint64_t(wi), std::uint64_t(ti), std::uint64_t(tr)});
          ArrayScenario s = tmpl;
          s.model = with_bandwidth(tmpl.model, o.w);
          s.phase_errors = random_phase_errors(s.n, derive_seed(seed, {0}));
          SimulatedScenario sim = simulate_scenario(s);
          HermitianMatrix r_hat = o.t > 0 ? sample_covariance(sim.true_r, o.t, derive_seed(seed, {1})).matrix : sim.true_r;
          PipelineResult p = calibrate(r_hat, s.d_over_lambda, route);
          o.rmse_deg = phase_rmse(p.estimate.phases, sim.phase_errors);
          o.isomorph = p.isomorph.choice;
          o.ambiguous = p.isomorph.ambiguous;
          o.ok = std::isfinite(o.rmse_deg);
          if (!o.ok) o.error = "non-finite RMSE";
        } catch (const std::exception& e) {
          o.ok = false;
          o.error = e.what();
        }
      },
      threads);
  for (int wi = 0; wi < nw; ++wi)
    for (int ti = 0; ti < nt; ++ti) {
      McCell c{w_list[wi], t_list[ti], 0, 0, 0};
      double sum = 0;
      for (int tr = 0; tr < trials; ++tr) {
        const TrialOutcome& o = table.trials[(wi * nt + ti) * trials + tr];
        if (o.ok) {
          sum += o.rmse_deg;
          ++c.ok;
        } else {
          ++c.failed;
        }
      }
      c.mean_rmse = c.ok ? sum / c.ok : std::numeric_limits<double>::quiet_NaN();
      table.cells.push_back(c);
    }
  return table;
}

}  // namespace toiep
