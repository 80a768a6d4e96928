#include "toiep/io.hpp"

#include <cstdio>
#include <ostream>

namespace toiep {

namespace {

std::vector<double> vec(const RVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

RVector rvec(const Json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

Json to_json(const HermitianToeplitz& t) {
  return {{"n", t.n()}, {"first_row_re", vec(t.first_row().real())}, {"first_row_im", vec(t.first_row().imag())}};
}

Json to_json(const SymmetricToeplitz& t) { return to_json(t.to_hermitian()); }

Json to_json(const HermitianMatrix& m) {
  const int n = m.n();
  std::vector<double> re, im;
  re.reserve(n * n);
  im.reserve(n * n);
  for (int p = 0; p < n; ++p)
    for (int l = 0; l < n; ++l) {
      re.push_back(m(p, l).real());
      im.push_back(m(p, l).imag());
    }
  return {{"n", n}, {"re", re}, {"im", im}};
}

Json to_json(const SolveReport& r) {
  return {{"phases_deg", vec(r.final_phases.degrees())},
          {"residual_history", r.residual_history},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"starts", r.starts},
          {"warnings", r.warnings}};
}

Json to_json(const RankOneResult& r) {
  return {{"phases_deg", vec(r.phases.degrees())},
          {"secondary_eigen_mass", r.secondary_eigen_mass},
          {"principal_vector_re", vec(r.principal_vector.real())},
          {"principal_vector_im", vec(r.principal_vector.imag())},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"warnings", r.warnings}};
}

Json to_json(const SearchTrace& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) steps.push_back({{"lag", s.lag}, {"criterion", s.criterion}, {"merit", s.merit}});
  return {{"steps", steps}, {"terminal_criterion", t.terminal_criterion}, {"flips", t.flips}};
}

Json to_json(const MembershipResult& m) {
  Json ex = Json::array();
  for (auto [p, l] : m.excluded) ex.push_back({p, l});
  return {{"is_member", m.is_member},
          {"inconclusive", m.inconclusive},
          {"family", m.conjugate ? "conjugate" : "direct"},
          {"rank_ratio", m.rank_ratio},
          {"eigvec_moduli", vec(m.eigvec_moduli)},
          {"phase_steps_deg", vec(m.phase_steps_deg)},
          {"excluded", ex}};
}

HermitianToeplitz toeplitz_from_json(const Json& j) {
  const int n = j.at("n").get<int>();
  RVector re = rvec(j.at("first_row_re"));
  RVector im = j.contains("first_row_im") ? rvec(j.at("first_row_im")) : RVector::Zero(re.size());
  if (re.size() != n || im.size() != n) throw InvalidInput("toeplitz JSON: first row length differs from n");
  CVector row(n);
  for (int k = 0; k < n; ++k) row(k) = cd(re(k), im(k));
  return toeplitz_from_first_row(row, n);
}

HermitianMatrix matrix_from_json(const Json& j) {
  const int n = j.at("n").get<int>();
  RVector re = rvec(j.at("re"));
  RVector im = j.contains("im") ? rvec(j.at("im")) : RVector::Zero(re.size());
  if (re.size() != n * n || im.size() != n * n) throw InvalidInput("matrix JSON: entry count differs from n*n");
  CMatrix m(n, n);
  for (int p = 0; p < n; ++p)
    for (int l = 0; l < n; ++l) m(p, l) = cd(re(p * n + l), im(p * n + l));
  return HermitianMatrix(m);
}

void write_values_csv(std::ostream& os, const RVector& v) {
  for (int i = 0; i < v.size(); ++i) os << format_number(v(i)) << '\n';
}

void write_trace_csv(std::ostream& os, const SearchTrace& t) {
  os << "step,lag,criterion\n";
  for (size_t i = 0; i < t.steps.size(); ++i)
    os << i + 1 << ',' << t.steps[i].lag << ',' << format_number(t.steps[i].criterion) << '\n';
}

}  // namespace toiep
