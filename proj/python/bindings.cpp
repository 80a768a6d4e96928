#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "toiep/calib.hpp"
#include "toiep/covariance.hpp"
#include "toiep/hermitian.hpp"
#include "toiep/rankone.hpp"
#include "toiep/real.hpp"

namespace py = pybind11;
using namespace toiep;

namespace {

CovarianceModel model_of(const std::string& kind, double w, double alpha, double w2, double theta_deg,
                         double weight, double noise) {
  CovarianceModel m;
  if (kind == "sinc") {
    m = Sinc{w};
  } else if (kind == "exp") {
    m = Exponential{w, alpha};
  } else if (kind == "two_band") {
    m = TwoBand{w, w2, theta_deg, weight};
  } else {
    throw InvalidInput("unknown model kind '" + kind + "'");
  }
  return noise > 0 ? with_noise(noise, m) : m;
}

Route route_of(const std::string& r) {
  if (r == "rank-one") return Route::rank_one;
  if (r == "toeplitz") return Route::toeplitz;
  throw InvalidInput("route must be 'rank-one' or 'toeplitz'");
}

NewtonConfig newton_config(std::uint64_t seed, double tol, int max_iters, int restarts, double max_step_deg) {
  NewtonConfig c;
  c.init = RandomInit{seed};
  c.tol_residual = tol;
  c.max_iters = max_iters;
  c.restarts = restarts;
  c.max_step_deg = max_step_deg;
  c.validate();
  return c;
}

py::dict search_dict(const SearchResult& r) {
  py::dict d;
  d["signs"] = r.pattern.values();
  d["first_row"] = r.matrix.first_row();
  d["criterion"] = r.trace.terminal_criterion;
  d["flips"] = r.trace.flips;
  d["exact"] = r.exact;
  std::vector<int> lags;
  for (const SearchStep& s : r.trace.steps) lags.push_back(s.lag);
  d["flipped_lags"] = lags;
  return d;
}

}  // namespace

PYBIND11_MODULE(_toiep, m) {
  m.doc() = "Toeplitz inverse eigenvalue solvers and blind array calibration";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  m.def("sinc_covariance", [](int n, double w) { return RVector(sinc_covariance(n, w).first_row()); },
        py::arg("n"), py::arg("w"), "First row of the sinc(W) covariance.");
  m.def("exp_covariance",
        [](int n, double w, double alpha) { return RVector(exp_covariance(n, w, alpha).first_row()); },
        py::arg("n"), py::arg("w"), py::arg("alpha"), "First row of the exponential-spectrum covariance.");
  m.def("two_band_covariance",
        [](int n, double w1, double w2, double theta_deg, double d_over_lambda, double weight) {
          return CVector(two_band_covariance(n, w1, w2, theta_deg, d_over_lambda, weight).first_row());
        },
        py::arg("n"), py::arg("w1"), py::arg("w2"), py::arg("theta_deg"), py::arg("d_over_lambda") = 0.5,
        py::arg("weight") = 0.5, "First row of the two-band Hermitian covariance.");
  m.def("toeplitz", [](const CVector& row) { return HermitianToeplitz(row).dense(); }, py::arg("first_row"),
        "Dense Hermitian Toeplitz matrix from its first row.");
  m.def("eigenvalues", [](const CMatrix& a) { return eigenvalues(HermitianMatrix(a)); }, py::arg("matrix"),
        "Ascending eigenvalues of a Hermitian matrix.");
  m.def("apply_phase_errors",
        [](const CVector& row, const RVector& phi) {
          return apply_phase_errors(HermitianToeplitz(row), DiagPhase(phi)).dense();
        },
        py::arg("first_row"), py::arg("phases"), "D T D^H for D = diag(exp(j phi)).");
  m.def("random_phase_errors", [](int n, std::uint64_t seed) { return RVector(random_phase_errors(n, seed).values()); },
        py::arg("n"), py::arg("seed"));

  m.def("max_element_search",
        [](const RVector& moduli, const RVector& targets, double tol_exact) {
          SearchOptions o;
          o.tol_exact = tol_exact;
          return search_dict(max_element_search(ProblemCSpec(moduli, targets), o));
        },
        py::arg("moduli"), py::arg("eigenvalues"), py::arg("tol_exact") = 1e-10,
        "Greedy sign search for a real symmetric Toeplitz matrix.");
  m.def("solve_problem_c",
        [](const RVector& moduli, const RVector& targets, double tol_exact) {
          SearchOptions o;
          o.tol_exact = tol_exact;
          return search_dict(solve_problem_c(ProblemCSpec(moduli, targets), o));
        },
        py::arg("moduli"), py::arg("eigenvalues"), py::arg("tol_exact") = 1e-10,
        "Greedy sign search with the multi-start fallback.");
  m.def("solve_mra",
        [](const RVector& moduli, const std::vector<int>& ruler, const RVector& mra_eigenvalues,
           std::optional<double> noise_floor) {
          MraConstraint c{MraRuler(ruler, static_cast<int>(moduli.size())), mra_eigenvalues, noise_floor};
          return search_dict(solve_problem_c(ProblemCSpec(moduli, c)));
        },
        py::arg("moduli"), py::arg("ruler"), py::arg("mra_eigenvalues"), py::arg("noise_floor") = py::none(),
        "Sign search against the eigenvalues of a sparse-array submatrix.");

  m.def("solve_problem_a",
        [](const RVector& moduli, const RVector& targets, std::uint64_t seed, double tol, int max_iters,
           int restarts, double max_step_deg, bool refine) {
          ProblemASpec spec(moduli, targets);
          ProblemAResult r = solve_problem_a(spec, newton_config(seed, tol, max_iters, restarts, max_step_deg));
          HermitianToeplitz t = r.matrix;
          py::dict d;
          if (refine) {
            ApResult ap = alternating_projections(t, spec.targets());
            t = ap.matrix;
            d["ap_residual"] = ap.residual;
          }
          d["first_row"] = CVector(t.first_row());
          d["phases"] = RVector(r.report.final_phases.values());
          d["converged"] = r.report.converged;
          d["iterations"] = r.report.iterations;
          d["residual_history"] = r.report.residual_history;
          d["warnings"] = r.report.warnings;
          return d;
        },
        py::arg("moduli"), py::arg("eigenvalues"), py::arg("seed") = 1, py::arg("tol") = 1e-6,
        py::arg("max_iters") = 500, py::arg("restarts") = 0, py::arg("max_step_deg") = 15.0,
        py::arg("refine") = false, "Newton phase search for a Hermitian Toeplitz matrix with given spectrum.");
  m.def("family_membership_test",
        [](const CVector& rec, const CVector& ref) {
          MembershipResult r = family_membership_test(HermitianToeplitz(rec), HermitianToeplitz(ref));
          py::dict d;
          d["is_member"] = r.is_member;
          d["inconclusive"] = r.inconclusive;
          d["conjugate"] = r.conjugate;
          d["rank_ratio"] = r.rank_ratio;
          d["phase_steps_deg"] = r.phase_steps_deg;
          return d;
        },
        py::arg("reconstructed"), py::arg("reference"));
  m.def("solve_problem_b",
        [](const CMatrix& r, std::uint64_t seed, double tol, int max_iters) {
          RankOneResult res = solve_problem_b(ProblemBSpec(HermitianMatrix(r)), newton_config(seed, tol, max_iters, 0, 15.0));
          py::dict d;
          d["phases"] = RVector(res.phases.values());
          d["principal_vector"] = res.principal_vector;
          d["secondary_eigen_mass"] = res.secondary_eigen_mass;
          d["converged"] = res.converged;
          d["iterations"] = res.iterations;
          return d;
        },
        py::arg("matrix"), py::arg("seed") = 1, py::arg("tol") = 1e-8, py::arg("max_iters") = 2000,
        "Rank-one phase search on a phase-corrupted covariance.");

  m.def("simulate",
        [](int n, const std::string& kind, double w, double alpha, double w2, double theta_deg, double weight,
           double noise, double d_over_lambda, std::uint64_t seed) {
          ArrayScenario s;
          s.n = n;
          s.model = model_of(kind, w, alpha, w2, theta_deg, weight, 0);
          s.noise_alpha = noise;
          s.d_over_lambda = d_over_lambda;
          s.seed = seed;
          s.validate();
          SimulatedScenario sim = simulate_scenario(s);
          py::dict d;
          d["true_toeplitz"] = CVector(sim.true_toeplitz.first_row());
          d["true_r"] = sim.true_r.dense();
          d["phase_errors"] = RVector(sim.phase_errors.values());
          return d;
        },
        py::arg("n") = 102, py::arg("kind") = "sinc", py::arg("w") = 0.15, py::arg("alpha") = 1.0,
        py::arg("w2") = 0.1, py::arg("theta_deg") = 20.0, py::arg("weight") = 0.5, py::arg("noise") = 0.01,
        py::arg("d_over_lambda") = 0.5, py::arg("seed") = 1, "Simulated array covariance with phase errors.");
  m.def("sample_covariance",
        [](const CMatrix& r, long long t, std::uint64_t seed) {
          return sample_covariance(HermitianMatrix(r), t, seed).matrix.dense();
        },
        py::arg("matrix"), py::arg("snapshots"), py::arg("seed"));
  m.def("calibrate",
        [](const CMatrix& r, double d_over_lambda, const std::string& route) {
          PipelineResult p = calibrate(HermitianMatrix(r), d_over_lambda, route_of(route));
          py::dict d;
          d["phases"] = RVector(p.estimate.phases.values());
          d["isomorph"] = std::string(to_string(p.isomorph.choice));
          d["ambiguous"] = p.isomorph.ambiguous;
          d["reconstructed"] = RVector(p.reconstructed.first_row());
          d["warnings"] = p.estimate.warnings;
          return d;
        },
        py::arg("matrix"), py::arg("d_over_lambda") = 0.5, py::arg("route") = "rank-one",
        "Blind phase calibration of a measured covariance.");
  m.def("phase_rmse", [](const RVector& est, const RVector& truth) { return phase_rmse(DiagPhase(est), DiagPhase(truth)); },
        py::arg("estimate"), py::arg("truth"), "Phase RMSE in degrees after trend and isomorph removal.");
  m.def("me_spectrum",
        [](const RVector& row, int grid) {
          MeSpectrum s = me_spectrum(SymmetricToeplitz(row).to_hermitian(), grid);
          return py::make_tuple(s.grid, s.values);
        },
        py::arg("first_row"), py::arg("grid") = 2048, "Maximum-entropy spectrum (grid, values).");
  m.def("monte_carlo_rmse",
        [](const std::vector<double>& w, const std::vector<long long>& t, int trials, std::uint64_t seed, int n,
           double noise, const std::string& route, unsigned threads) {
          ArrayScenario s;
          s.n = n;
          s.noise_alpha = noise;
          McTable tab = monte_carlo_rmse(s, w, t, trials, seed, route_of(route), threads);
          py::list cells;
          for (const McCell& c : tab.cells) {
            py::dict d;
            d["w"] = c.w;
            d["t"] = c.t;
            d["mean_rmse"] = c.mean_rmse;
            d["ok"] = c.ok;
            d["failed"] = c.failed;
            cells.append(d);
          }
          return cells;
        },
        py::arg("w"), py::arg("t"), py::arg("trials") = 10, py::arg("seed") = 1, py::arg("n") = 102,
        py::arg("noise") = 0.01, py::arg("route") = "rank-one", py::arg("threads") = 0,
        "Mean phase RMSE per (W, T) cell; T = 0 uses the exact covariance.");
}
