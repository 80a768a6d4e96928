#pragma once

#include <memory>
#include <variant>

#include "toiep/linalg.hpp"

namespace toiep {

SymmetricToeplitz sinc_covariance(int n, double w);
SymmetricToeplitz exp_covariance(int n, double w, double alpha);
HermitianToeplitz two_band_covariance(int n, double w1, double w2, double theta_deg,
                                      double d_over_lambda, double weight = 0.5);

struct Sinc {
  double w;
};
struct Exponential {
  double w;
  double alpha;
};
struct TwoBand {
  double w1;
  double w2;
  double theta_deg;
  double weight = 0.5;
};
struct ScaledIdentityPlus;

using CovarianceModel = std::variant<Sinc, Exponential, TwoBand, ScaledIdentityPlus>;

// alpha * I + inner
struct ScaledIdentityPlus {
  double alpha;
  std::shared_ptr<const CovarianceModel> inner;
};

CovarianceModel with_noise(double alpha, CovarianceModel inner);

// Builds the model's Toeplitz matrix and checks it is PSD
// (lambda_min >= -1e-10 lambda_max).
HermitianToeplitz generate(const CovarianceModel& model, int n, double d_over_lambda = 0.5);

}  // namespace toiep
