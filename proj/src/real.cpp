#include "toiep/real.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "toiep/parallel.hpp"

namespace toiep {

SignPattern::SignPattern(std::vector<int> signs) : s_(std::move(signs)) {
  for (int v : s_)
    if (v != 1 && v != -1) throw InvalidInput("SignPattern: entries must be +1 or -1");
}

SignPattern SignPattern::of_row(const RVector& row) {
  std::vector<int> s(std::max<Eigen::Index>(row.size() - 1, 0));
  for (size_t k = 0; k < s.size(); ++k) s[k] = row(k + 1) < 0 ? -1 : 1;
  return SignPattern(std::move(s));
}

int SignPattern::negatives() const { return static_cast<int>(std::count(s_.begin(), s_.end(), -1)); }

SignPattern SignPattern::alternated() const {
  SignPattern out = *this;
  for (size_t i = 0; i < s_.size(); ++i)
    if ((i + 1) % 2 == 1) out.s_[i] = -out.s_[i];
  return out;
}

RVector SignPattern::apply(const RVector& moduli) const {
  if (moduli.size() != size() + 1) throw InvalidInput("SignPattern::apply: size mismatch");
  RVector row = moduli;
  for (int k = 1; k < moduli.size(); ++k) row(k) *= s_[k - 1];
  return row;
}

ProblemCSpec::ProblemCSpec(RVector moduli, RVector target_eigenvalues)
    : moduli_(std::move(moduli)), targets_(std::move(target_eigenvalues)) {
  if (moduli_.size() < 1 || !(moduli_(0) > 0.0)) throw InvalidInput("ProblemCSpec: moduli[0] must be positive");
  if ((moduli_.array() < 0.0).any()) throw InvalidInput("ProblemCSpec: moduli must be non-negative");
  if (targets_.size() != moduli_.size()) throw InvalidInput("ProblemCSpec: target count differs from n");
  std::sort(targets_.data(), targets_.data() + targets_.size());
}

ProblemCSpec::ProblemCSpec(RVector moduli, MraConstraint mra) : moduli_(std::move(moduli)), mra_(std::move(mra)) {
  if (moduli_.size() < 1 || !(moduli_(0) > 0.0)) throw InvalidInput("ProblemCSpec: moduli[0] must be positive");
  if ((moduli_.array() < 0.0).any()) throw InvalidInput("ProblemCSpec: moduli must be non-negative");
  if (mra_->ruler.n() != n()) throw InvalidInput("ProblemCSpec: ruler aperture differs from n");
  if (mra_->target_eigenvalues_m.size() != mra_->ruler.m())
    throw InvalidInput("ProblemCSpec: MRA target count differs from ruler size");
  RVector& t = mra_->target_eigenvalues_m;
  std::sort(t.data(), t.data() + t.size());
  if (mra_->noise_floor) targets_ = augment_noise_eigenvalues(t, *mra_->noise_floor, n());
}

ProblemCSpec ProblemCSpec::from_row(const RVector& row) {
  return ProblemCSpec(row.cwiseAbs(), eigenvalues(SymmetricToeplitz(row).dense()));
}

RVector mismatch(const ProblemCSpec& spec, const SignPattern& sigma) {
  const RMatrix t = SymmetricToeplitz(sigma.apply(spec.moduli())).dense();
  if (!spec.mra()) return eigenvalues(t) - spec.targets();
  const MraConstraint& mra = *spec.mra();
  RVector dm = eigenvalues(mra_select(t, mra.ruler)) - mra.target_eigenvalues_m;
  if (!mra.noise_floor) return dm;
  const int q = spec.n() - mra.ruler.m();
  RVector out(dm.size() + q);
  out.head(dm.size()) = dm;
  out.tail(q) = eigenvalues(t).head(q).array() - *mra.noise_floor;
  return out;
}

double criterion(const ProblemCSpec& spec, const SignPattern& sigma) {
  return mismatch(spec, sigma).cwiseAbs().maxCoeff();
}

namespace {

struct Score {
  double crit;
  double merit;
};

Score score(const ProblemCSpec& spec, const SignPattern& s, Merit m) {
  RVector d = mismatch(spec, s);
  const double c = d.cwiseAbs().maxCoeff();
  return {c, m == Merit::max_abs ? c : d.norm()};
}

std::vector<int> active_lags(const ProblemCSpec& spec, double tol) {
  std::vector<int> lags;
  for (int k = 1; k < spec.n(); ++k)
    if (spec.moduli()(k) >= tol) lags.push_back(k);
  return lags;
}

SearchResult finish(const ProblemCSpec& spec, SignPattern s, SearchTrace trace, const SearchOptions& opt) {
  trace.terminal_criterion = criterion(spec, s);
  SymmetricToeplitz m(s.apply(spec.moduli()));
  const bool exact = trace.terminal_criterion < opt.tol_exact;
  return {std::move(s), std::move(trace), std::move(m), exact};
}

}  // namespace

SearchResult max_element_search(const ProblemCSpec& spec, const SignPattern& start, const SearchOptions& opt) {
  if (start.size() != spec.n() - 1) throw InvalidInput("max_element_search: start pattern size mismatch");
  SignPattern s = start;
  SearchTrace trace;
  const auto lags = active_lags(spec, opt.zero_modulus_tol);
  Score cur = score(spec, s, opt.merit);
  for (int step = 0; step < opt.max_steps && cur.crit >= opt.tol_exact; ++step) {
    int best_lag = -1;
    Score best = cur;
    for (int k : lags) {
      s.flip(k);
      Score sc = score(spec, s, opt.merit);
      s.flip(k);
      if (sc.merit < best.merit) {  // strict: ties keep the lowest lag
        best = sc;
        best_lag = k;
      }
    }
    if (best_lag < 0) break;
    s.flip(best_lag);
    cur = best;
    trace.steps.push_back({best_lag, cur.crit, cur.merit});
    ++trace.flips;
  }
  return finish(spec, std::move(s), std::move(trace), opt);
}

SearchResult max_element_search(const ProblemCSpec& spec, const SearchOptions& opt) {
  return max_element_search(spec, SignPattern::all_positive(spec.n() - 1), opt);
}

SearchResult dynamic_programming_search(const ProblemCSpec& spec, const SearchOptions& opt) {
  const auto lags = active_lags(spec, opt.zero_modulus_tol);
  const int m = static_cast<int>(lags.size());
  auto better = [](const SearchResult& a, const SearchResult& b) {
    if (a.trace.terminal_criterion != b.trace.terminal_criterion)
      return a.trace.terminal_criterion < b.trace.terminal_criterion;
    return a.pattern < b.pattern;
  };
  auto run = [&](const std::vector<std::vector<int>>& preflips) {
    std::vector<SearchResult> results(preflips.size());
    parallel_for(static_cast<int>(preflips.size()), [&](int i) {
      SignPattern s0 = SignPattern::all_positive(spec.n() - 1);
      for (int k : preflips[i]) s0.flip(k);
      results[i] = max_element_search(spec, s0, opt);
      results[i].trace.flips += static_cast<int>(preflips[i].size());  // pre-flips count as flips
    });
    return *std::min_element(results.begin(), results.end(), better);
  };
  std::vector<std::vector<int>> singles{{}};
  for (int k : lags) singles.push_back({k});
  SearchResult best = run(singles);
  if (best.exact || m > opt.dp_pair_limit) return best;
  std::vector<std::vector<int>> pairs;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) pairs.push_back({lags[a], lags[b]});
  if (pairs.empty()) return best;
  SearchResult p = run(pairs);
  return better(p, best) ? p : best;
}

SearchResult subspace_growth_search(const ProblemCSpec& spec, const SearchOptions& opt) {
  if (!spec.mra() || !spec.mra()->noise_floor)
    throw InvalidInput("subspace_growth_search: needs an MRA constraint with a noise floor");
  const double floor = *spec.mra()->noise_floor;
  const int rank = spec.mra()->ruler.m();
  const RVector& mod = spec.moduli();
  RVector row = mod;
  // Leading m-block: the smallest max(m - rank, 0) eigenvalues sit on the
  // floor, the rest are not below it.
  auto block_mismatch = [&](int m) {
    RVector ev = eigenvalues(SymmetricToeplitz(row.head(m)).dense());
    const int q = std::max(m - rank, 0);
    double s = 0;
    for (int i = 0; i < m; ++i) {
      double d = ev(i) - floor;
      if (i >= q) d = std::min(d, 0.0);
      s += d * d;
    }
    return std::sqrt(s);
  };
  std::vector<int> signs(spec.n() - 1, 1);
  for (int m = 2; m <= spec.n(); ++m) {
    const int k = m - 1;
    if (mod(k) < opt.zero_modulus_tol) continue;
    row(k) = mod(k);
    const double plus = block_mismatch(m);
    row(k) = -mod(k);
    const double minus = block_mismatch(m);
    if (plus <= minus) row(k) = mod(k);
    signs[k - 1] = plus <= minus ? 1 : -1;
  }
  SignPattern grown(signs);
  SearchResult polished = max_element_search(spec, grown, opt);
  polished.trace.flips += grown.negatives();
  return polished;
}

SearchResult solve_problem_c(const ProblemCSpec& spec, const SearchOptions& opt) {
  std::optional<SearchResult> best;
  auto keep = [&](SearchResult r) {
    if (!best || r.trace.terminal_criterion < best->trace.terminal_criterion) best = std::move(r);
    return best->exact;
  };
  if (spec.mra() && spec.mra()->noise_floor && keep(subspace_growth_search(spec, opt))) return *best;
  if (keep(max_element_search(spec, opt))) return *best;
  keep(dynamic_programming_search(spec, opt));
  return *best;
}

SymmetricToeplitz isomorph(const SymmetricToeplitz& t) {
  RVector row = t.first_row();
  for (int k = 1; k < row.size(); k += 2) row(k) = -row(k);
  return SymmetricToeplitz(row);
}

RVector augment_noise_eigenvalues(const RVector& m_values, double noise_floor, int n) {
  if (m_values.size() > n) throw InvalidInput("augment_noise_eigenvalues: more values than n");
  if (m_values.size() == n) {
    RVector out = m_values;
    std::sort(out.data(), out.data() + out.size());
    return out;
  }
  const double lo = m_values.minCoeff();
  const double tol = 1e-10 * std::max(1.0, m_values.cwiseAbs().maxCoeff());
  if (noise_floor > lo + tol) throw InvalidInput("augment_noise_eigenvalues: noise floor exceeds the smallest eigenvalue");
  RVector out(n);
  out.head(m_values.size()) = m_values;
  out.tail(n - m_values.size()).setConstant(noise_floor);
  std::sort(out.data(), out.data() + out.size());
  return out;
}

}  // namespace toiep
