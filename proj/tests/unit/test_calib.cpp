#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "toiep/calib.hpp"
#include "toiep/covariance.hpp"

using namespace toiep;

namespace {

ArrayScenario small(double w, std::uint64_t seed) {
  ArrayScenario s;
  s.n = 20;
  s.model = Sinc{w};
  s.noise_alpha = 0.01;
  s.seed = seed;
  return s;
}

DiagPhase add(const DiagPhase& a, const RVector& extra) { return DiagPhase(RVector(a.values() + extra)); }

}  // namespace

TEST_CASE("random_phase_errors") {
  DiagPhase d = random_phase_errors(50, 4);
  CHECK(d[0] == 0.0);
  CHECK(d.values().cwiseAbs().maxCoeff() <= kPi);
  CHECK((random_phase_errors(50, 4).values() - d.values()).norm() == 0.0);
  CHECK((random_phase_errors(50, 5).values() - d.values()).norm() > 0.0);
}

TEST_CASE("simulate_scenario") {
  SUBCASE("no errors, broadside") {
    ArrayScenario s = small(0.2, 1);
    s.theta_deg = 0;
    s.phase_errors = DiagPhase::identity(20);
    SimulatedScenario sim = simulate_scenario(s);
    CHECK((sim.true_r.dense() - sim.true_toeplitz.dense()).norm() < 1e-15);
  }
  SUBCASE("structure") {
    ArrayScenario s = small(0.15, 3);
    s.n = 102;
    SimulatedScenario sim = simulate_scenario(s);
    CHECK(sim.true_toeplitz.first_row()(0).real() == doctest::Approx(0.31));
    CHECK(2 * 0.15 / s.noise_alpha == doctest::Approx(30.0));
    CHECK(oracle::max_abs_diff(oracle::eigvals(sim.true_r.dense()), oracle::eigvals(sim.true_toeplitz.dense())) <
          1e-10);
    CHECK(std::abs(std::abs(sim.true_r(0, 1)) - 0.257518107) < 1e-9);
    const double mu = 2 * kPi * 0.5 * std::sin(rad(20.0));
    for (int i = 0; i < 102; ++i)
      CHECK(std::abs(oracle::wrap(sim.applied[i] - sim.phase_errors[i] - mu * i)) < 1e-12);
  }
}

TEST_CASE("sample_covariance") {
  ArrayScenario s = small(0.2, 2);
  s.n = 4;
  HermitianMatrix r = simulate_scenario(s).true_r;
  SUBCASE("large T converges") {
    HermitianMatrix e = sample_covariance(r, 1000000, 9).matrix;
    CHECK((e.dense() - r.dense()).cwiseAbs().maxCoeff() < 5e-3);
  }
  SUBCASE("unbiased over repeated small samples") {
    const int trials = 400;
    CMatrix mean = CMatrix::Zero(4, 4);
    RMatrix sq = RMatrix::Zero(4, 4);
    for (int i = 0; i < trials; ++i) {
      CMatrix e = sample_covariance(r, 10, 100 + i).matrix.dense();
      mean += e;
      sq += (e - r.dense()).cwiseAbs2();
    }
    mean /= trials;
    RMatrix sigma = (sq / trials).cwiseSqrt() / std::sqrt(double(trials));
    for (int p = 0; p < 4; ++p)
      for (int l = 0; l < 4; ++l) {
        CHECK(std::abs(mean(p, l).real() - r(p, l).real()) <= 3 * sigma(p, l) + 1e-12);
        CHECK(std::abs(mean(p, l).imag() - r(p, l).imag()) <= 3 * sigma(p, l) + 1e-12);
      }
  }
  SUBCASE("Hermitian PSD for every T") {
    for (long long t : {1LL, 2LL, 7LL}) {
      HermitianMatrix e = sample_covariance(r, t, 3).matrix;
      RVector ev = oracle::eigvals(e.dense());
      CHECK(ev(0) >= -1e-12 * ev(3));
    }
    CHECK_THROWS_AS(sample_covariance(r, 0, 1), InvalidInput);
  }
  SUBCASE("moduli from a fixed-seed sample") {
    ArrayScenario b = small(0.15, 6);
    b.n = 102;
    b.noise_alpha = 0;
    HermitianMatrix e = sample_covariance(simulate_scenario(b).true_r, 30000, 4).matrix;
    CHECK(std::abs(modulus_average(e).first_row()(1) - 0.2575) < 0.01);
    b.phase_errors = DiagPhase::identity(102);
    b.theta_deg = 0;
    HermitianMatrix e0 = sample_covariance(simulate_scenario(b).true_r, 30000, 4).matrix;
    CHECK(std::abs(redundancy_average(e0).first_row()(1).real() - 0.2575) < 0.01);
  }
}

TEST_CASE("me_spectrum") {
  SUBCASE("identity is flat") {
    MeSpectrum s = me_spectrum(HermitianToeplitz(CVector(CVector::Unit(6, 0))), 256);
    CHECK((s.values.array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(s.grid(0) == doctest::Approx(-kPi));
  }
  SUBCASE("band-limited mass and symmetry") {
    SymmetricToeplitz t(RVector(sinc_covariance(102, 0.2).first_row() + 0.01 * RVector::Unit(102, 0)));
    MeSpectrum s = me_spectrum(t.to_hermitian(), 2048);
    double in = 0, all = s.values.sum();
    for (int i = 0; i < 2048; ++i)
      if (std::abs(s.grid(i)) <= 2 * kPi * 0.2 + 0.05) in += s.values(i);
    CHECK(in / all > 0.97);  // the 0.01 floor holds the rest
    for (int i = 1; i < 1024; ++i) CHECK(s.values(i) == doctest::Approx(s.values(2048 - i)).epsilon(1e-8));
  }
  SUBCASE("isomorph shifts by pi") {
    SymmetricToeplitz t(RVector(sinc_covariance(30, 0.2).first_row() + 0.01 * RVector::Unit(30, 0)));
    MeSpectrum a = me_spectrum(t.to_hermitian(), 512), b = me_spectrum(isomorph(t).to_hermitian(), 512);
    for (int i = 0; i < 512; ++i) CHECK(b.values((i + 256) % 512) == doctest::Approx(a.values(i)).epsilon(1e-8));
  }
  SUBCASE("formula against a direct inverse") {
    SymmetricToeplitz t(RVector(sinc_covariance(8, 0.3).first_row() + 0.05 * RVector::Unit(8, 0)));
    MeSpectrum s = me_spectrum(t.to_hermitian(), 16);
    Eigen::VectorXcd c = t.dense().inverse().col(0).cast<cd>();
    for (int i = 0; i < 16; ++i) {
      Eigen::VectorXcd a(8);
      for (int k = 0; k < 8; ++k) a(k) = std::polar(1.0, s.grid(i) * k);
      CHECK(s.values(i) == doctest::Approx(1.0 / std::norm(a.dot(c))).epsilon(1e-10));
    }
  }
  SUBCASE("singular input gets a ridge") {
    MeSpectrum s = me_spectrum(HermitianToeplitz(CVector::Ones(4)), 64);
    CHECK(s.ridge_applied);
    CHECK(s.values.allFinite());
  }
}

TEST_CASE("select_physical_isomorph") {
  for (double w : {0.2, 0.3, 0.4}) {
    SymmetricToeplitz t(RVector(sinc_covariance(40, w).first_row() + 0.01 * RVector::Unit(40, 0)));
    IsomorphChoice c = select_physical_isomorph(t, 0.5);
    CHECK(c.choice == Isomorph::direct);
    CHECK(!c.ambiguous);
    CHECK(select_physical_isomorph(isomorph(t), 0.5).choice == Isomorph::alternating);
  }
  SUBCASE("quarter-wavelength spacing") {
    SymmetricToeplitz t(RVector(sinc_covariance(40, 0.1).first_row() + 0.01 * RVector::Unit(40, 0)));
    IsomorphChoice c = select_physical_isomorph(t, 0.25);
    CHECK(c.choice == Isomorph::direct);
    CHECK(c.direct_score > 0.9);
    CHECK(c.alternating_score < 0.1);
  }
  SUBCASE("indefinite candidate is loaded, not rejected") {
    RVector row = sinc_covariance(20, 0.2).first_row();
    row(0) -= 0.05;
    IsomorphChoice c = select_physical_isomorph(SymmetricToeplitz(row), 0.5);
    CHECK(c.choice == Isomorph::direct);
    CHECK(c.direct_spectrum.values.allFinite());
  }
  SUBCASE("white spectrum is ambiguous") {
    CHECK(select_physical_isomorph(SymmetricToeplitz(RVector(RVector::Unit(8, 0))), 0.5).ambiguous);
  }
}

TEST_CASE("estimate_phases_toeplitz") {
  ArrayScenario s = small(0.2, 7);
  SimulatedScenario sim = simulate_scenario(s);
  SymmetricToeplitz t(sim.true_toeplitz.first_row().real());
  SUBCASE("error-free") {
    CalibrationEstimate e = estimate_phases_toeplitz(t.to_hermitian().matrix(), t);
    CHECK(e.phases.values().cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("exact recovery of the applied phases") {
    CalibrationEstimate e = estimate_phases_toeplitz(sim.true_r, t);
    for (int i = 0; i < 20; ++i) CHECK(std::abs(oracle::wrap(e.phases[i] - sim.applied[i])) < 1e-12);
    CHECK(phase_rmse(e.phases, sim.phase_errors) < 1e-6);
  }
  SUBCASE("wrong isomorph leaves pi on odd elements") {
    CalibrationEstimate e = estimate_phases_toeplitz(sim.true_r, isomorph(t));
    for (int i = 0; i < 20; ++i)
      CHECK(std::abs(oracle::wrap(e.phases[i] - sim.applied[i] - (i % 2 ? kPi : 0.0))) < 1e-12);
  }
  SUBCASE("zero lags are chained") {
    ArrayScenario z = small(0.25, 8);
    z.noise_alpha = 0;
    SimulatedScenario zs = simulate_scenario(z);
    SymmetricToeplitz zt(zs.true_toeplitz.first_row().real());
    CalibrationEstimate e = estimate_phases_toeplitz(zs.true_r, zt);
    CHECK(!e.chained.empty());
    CHECK(e.low_confidence);
    CHECK(!e.warnings.empty());
    for (int i = 0; i < 20; ++i) CHECK(std::abs(oracle::wrap(e.phases[i] - zs.applied[i])) < 1e-12);
  }
}

TEST_CASE("binary rank-one route") {
  ArrayScenario s = small(0.2, 9);
  s.n = 40;
  SimulatedScenario sim = simulate_scenario(s);
  RVector row = sim.true_toeplitz.first_row().real();
  SignPattern truth = SignPattern::of_row(row);
  CMatrix u = sim.true_r.dense().cwiseQuotient(CMatrix(sim.true_r.dense().cwiseAbs().cast<cd>()));
  HermitianMatrix ru(u);
  SUBCASE("objective is zero at the truth") {
    CHECK(binary_rank_one_objective(ru, truth, 40) < 1e-9);
    CHECK(binary_rank_one_objective(ru, truth.alternated(), 40) < 1e-9);
    CHECK(binary_rank_one_objective(ru, SignPattern::all_positive(39), 40) > 1.0);
  }
  SUBCASE("search recovers the signs up to alternation") {
    BinarySearchResult b = binary_rank_one_search(ru);
    CHECK((b.pattern == truth || b.pattern == truth.alternated()));
    CHECK(b.objective < 1e-9);
  }
  SUBCASE("phase estimate") {
    CalibrationEstimate e = estimate_phases_rank_one(sim.true_r, truth);
    CHECK(e.phases[0] == 0.0);
    CHECK(!e.low_confidence);
    CHECK(phase_rmse(e.phases, sim.phase_errors) < 1e-6);
    CalibrationEstimate z = estimate_phases_rank_one(sim.true_toeplitz.matrix(), truth);
    CHECK(z.phases.values().cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("phase_rmse") {
  DiagPhase truth = random_phase_errors(30, 3);
  RVector idx = RVector::LinSpaced(30, 0, 29);
  RVector alt(30);
  for (int i = 0; i < 30; ++i) alt(i) = i % 2 ? kPi : 0.0;
  CHECK(phase_rmse(truth, truth) < 1e-12);
  CHECK(phase_rmse(add(truth, 0.3 * idx), truth) < 1e-9);
  CHECK(phase_rmse(add(truth, alt), truth) < 1e-9);
  CHECK(phase_rmse(add(truth, RVector(alt - 1.1 * idx)), truth) < 1e-9);
  RVector bump = RVector::Zero(30);
  bump(10) = rad(10.0);
  const double r = phase_rmse(add(truth, bump), truth);
  CHECK(r > 1.0);
  CHECK(r < 10.0 / std::sqrt(30.0) + 0.1);
}

TEST_CASE("calibrate pipeline on exact input") {
  for (Route route : {Route::rank_one, Route::toeplitz}) {
    for (double w : {0.1, 0.2, 0.3}) {
      CAPTURE(w);
      ArrayScenario s = small(w, 10);
      s.n = 40;
      SimulatedScenario sim = simulate_scenario(s);
      PipelineResult p = calibrate(sim.true_r, 0.5, route);
      CHECK((p.reconstructed.first_row() - sim.true_toeplitz.first_row().real()).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(phase_rmse(p.estimate.phases, sim.phase_errors) < 1e-6);
    }
  }
}

TEST_CASE("monte_carlo_rmse") {
  ArrayScenario tmpl = small(0.2, 1);
  McTable a = monte_carlo_rmse(tmpl, {0.2}, {0, 3000}, 3, 42, Route::rank_one, 2);
  McTable b = monte_carlo_rmse(tmpl, {0.2}, {0, 3000}, 3, 42, Route::rank_one, 1);
  REQUIRE(a.cells.size() == 2);
  REQUIRE(a.trials.size() == 6);
  for (size_t i = 0; i < a.trials.size(); ++i) CHECK(a.trials[i].rmse_deg == b.trials[i].rmse_deg);
  CHECK(a.cells[0].ok == 3);
  CHECK(a.cells[0].mean_rmse < 1e-6);
  CHECK(a.cells[1].mean_rmse > a.cells[0].mean_rmse);
  CHECK(a.cells[1].mean_rmse < 30.0);
  McTable c = monte_carlo_rmse(tmpl, {0.2}, {3000}, 3, 43, Route::rank_one, 1);
  CHECK(c.trials[0].rmse_deg != a.trials[3].rmse_deg);
}

TEST_CASE("with_bandwidth") {
  CHECK(std::get<Sinc>(with_bandwidth(Sinc{0.1}, 0.3)).w == 0.3);
  CHECK(std::get<Exponential>(with_bandwidth(Exponential{0.1, 2.0}, 0.3)).alpha == 2.0);
  CHECK(std::get<TwoBand>(with_bandwidth(TwoBand{0.1, 0.05, 20.0}, 0.3)).w1 == 0.3);
}
