#include "toiep/covariance.hpp"

#include <cmath>

namespace toiep {

namespace {

void check_w(double w, const char* who) {
  if (!(w > 0.0 && w <= 0.5)) throw InvalidInput(std::string(who) + ": W must lie in (0, 0.5]");
}

void check_n(int n, const char* who) {
  if (n < 1) throw InvalidInput(std::string(who) + ": n must be >= 1");
}

}  // namespace

SymmetricToeplitz sinc_covariance(int n, double w) {
  check_n(n, "sinc_covariance");
  check_w(w, "sinc_covariance");
  RVector row(n);
  row(0) = 2.0 * w;
  for (int k = 1; k < n; ++k) row(k) = std::sin(2.0 * kPi * w * k) / (kPi * k);
  return SymmetricToeplitz(row);
}

// Angular spectrum exp(-alpha |mu|) restricted to the band, normalized so that
// alpha -> 0 recovers the sinc model.
SymmetricToeplitz exp_covariance(int n, double w, double alpha) {
  check_n(n, "exp_covariance");
  check_w(w, "exp_covariance");
  if (alpha < 0.0) throw InvalidInput("exp_covariance: alpha must be >= 0");
  if (alpha == 0.0) return sinc_covariance(n, w);
  RVector row(n);
  const double e = std::exp(-2.0 * alpha * w);
  row(0) = -std::expm1(-2.0 * alpha * w) / alpha;
  for (int k = 1; k < n; ++k) {
    const double pk = kPi * k;
    const double s = std::sin(2.0 * kPi * w * k), c = std::cos(2.0 * kPi * w * k);
    row(k) = (e * (pk * s - alpha * c) + alpha) / (alpha * alpha + pk * pk);
  }
  return SymmetricToeplitz(row);
}

HermitianToeplitz two_band_covariance(int n, double w1, double w2, double theta_deg,
                                      double d_over_lambda, double weight) {
  check_n(n, "two_band_covariance");
  check_w(w1, "two_band_covariance");
  check_w(w2, "two_band_covariance");
  if (d_over_lambda <= 0.0) throw InvalidInput("two_band_covariance: d/lambda must be positive");
  const RVector a = sinc_covariance(n, w1).first_row();
  const RVector b = sinc_covariance(n, w2).first_row();
  const double mu = 2.0 * kPi * d_over_lambda * std::sin(rad(theta_deg));
  CVector row(n);
  // first row of diag(m) S diag(m)^H with m_n = exp(j mu n)
  for (int k = 0; k < n; ++k) row(k) = a(k) + weight * b(k) * std::polar(1.0, -mu * k);
  row(0) = row(0).real();
  return HermitianToeplitz(row);
}

CovarianceModel with_noise(double alpha, CovarianceModel inner) {
  return ScaledIdentityPlus{alpha, std::make_shared<const CovarianceModel>(std::move(inner))};
}

namespace {

HermitianToeplitz build(const CovarianceModel& model, int n, double dl) {
  struct Visitor {
    int n;
    double dl;
    HermitianToeplitz operator()(const Sinc& s) const { return sinc_covariance(n, s.w).to_hermitian(); }
    HermitianToeplitz operator()(const Exponential& e) const {
      return exp_covariance(n, e.w, e.alpha).to_hermitian();
    }
    HermitianToeplitz operator()(const TwoBand& t) const {
      return two_band_covariance(n, t.w1, t.w2, t.theta_deg, dl, t.weight);
    }
    HermitianToeplitz operator()(const ScaledIdentityPlus& s) const {
      if (s.alpha < 0.0) throw InvalidInput("ScaledIdentityPlus: alpha must be >= 0");
      if (!s.inner) throw InvalidInput("ScaledIdentityPlus: missing inner model");
      CVector row = build(*s.inner, n, dl).first_row();
      row(0) += s.alpha;
      return HermitianToeplitz(row);
    }
  };
  return std::visit(Visitor{n, dl}, model);
}

}  // namespace

HermitianToeplitz generate(const CovarianceModel& model, int n, double d_over_lambda) {
  HermitianToeplitz t = build(model, n, d_over_lambda);
  RVector ev = eigenvalues(t.matrix());
  if (ev(0) < -1e-10 * std::max(ev(ev.size() - 1), 0.0))
    throw NumericalError("generate: covariance model is not positive semi-definite");
  return t;
}

}  // namespace toiep
