#include "doctest.h"
#include "property_checks.hpp"

TEST_CASE("phase transforms preserve eigenvalues and moduli") {
  auto [p1, p2] = props::invariance(1000, 101);
  CHECK(p1.failures == 0);
  CHECK(p2.failures == 0);
  CHECK(p1.worst <= 1e-10);
  CHECK(p2.worst <= 1e-12);
}

TEST_CASE("Problem A Jacobian matches finite differences") {
  props::Summary s = props::jacobian_a(100, 202);
  CHECK(s.failures == 0);
  CHECK(s.worst < 1e-5);
}

TEST_CASE("Problem B Jacobian matches finite differences") {
  props::Summary s = props::jacobian_b(100, 303);
  CHECK(s.failures == 0);
  CHECK(s.worst < 1e-5);
}

TEST_CASE("alternating projections conserve the trace") {
  CHECK(props::ap_trace(50, 404).failures == 0);
}

TEST_CASE("eigendecomposition reconstructs its input") {
  props::Summary s = props::eig_reconstruction(200, 505);
  CHECK(s.failures == 0);
  CHECK(s.worst < 1e-9);
}

TEST_CASE("multi-start sign search matches exhaustive search") {
  props::Summary s = props::sign_search_vs_oracle(50, 606);
  CHECK(s.failures == 0);
}
