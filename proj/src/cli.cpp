#include "toiep/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "toiep/calib.hpp"
#include "toiep/covariance.hpp"
#include "toiep/hermitian.hpp"
#include "toiep/io.hpp"
#include "toiep/rankone.hpp"
#include "toiep/real.hpp"
#include "toiep/rng.hpp"

namespace toiep::cli {

namespace {

using Check = std::function<void(const std::string&)>;

struct KeySpec {
  std::string def;
  Check check;
};

double to_double(const std::string& v) {
  size_t pos = 0;
  double x = std::stod(v, &pos);
  if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument("not a number");
  return x;
}

long long to_int(const std::string& v) {
  // accepts 3e4 style counts
  double x = to_double(v);
  if (x != std::floor(x) || std::abs(x) > 9e18) throw std::invalid_argument("not an integer");
  return static_cast<long long>(x);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    auto b = cur.find_first_not_of(" \t"), e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

Check real_in(double lo, double hi, bool open_lo = false) {
  return [=](const std::string& v) {
    double x = to_double(v);
    if (x < lo || x > hi || (open_lo && x == lo)) {
      std::ostringstream os;
      os << "value " << v << " outside " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
      throw std::invalid_argument(os.str());
    }
  };
}

Check int_in(long long lo, long long hi) {
  return [=](const std::string& v) {
    long long x = to_int(v);
    if (x < lo || x > hi)
      throw std::invalid_argument("value " + v + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  };
}

Check one_of(std::vector<std::string> opts) {
  return [=](const std::string& v) {
    if (std::find(opts.begin(), opts.end(), v) == opts.end()) {
      std::string all;
      for (const auto& o : opts) all += (all.empty() ? "" : "|") + o;
      throw std::invalid_argument("expected one of " + all);
    }
  };
}

Check list_of(Check item) {
  return [=](const std::string& v) {
    for (const auto& x : split(v, ',')) item(x);
  };
}

Check any() {
  return [](const std::string&) {};
}

Check u64_value() {
  return [](const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("expected an unsigned integer");
    std::stoull(v);
  };
}

Check floor_value() {
  return [](const std::string& v) {
    if (v == "auto" || v == "none") return;
    if (to_double(v) < 0) throw std::invalid_argument("noise floor must be >= 0");
  };
}

Check ruler_value() {
  return [](const std::string& v) {
    if (v == "standard") return;
    for (const auto& x : split(v, ',')) to_int(x);
  };
}

const std::map<std::string, KeySpec>& schema() {
  static const std::map<std::string, KeySpec> s = {
      {"seed", {"1", u64_value()}},
      {"scenario.n", {"20", int_in(2, 4096)}},
      {"scenario.d_over_lambda", {"0.5", real_in(0, 10, true)}},
      {"scenario.theta_deg", {"20", real_in(-90, 90)}},
      {"scenario.noise_alpha", {"0", real_in(0, 1e6)}},
      {"scenario.phase_errors", {"random", one_of({"random", "none"})}},
      {"model.kind", {"sinc", one_of({"sinc", "exp", "two_band"})}},
      {"model.w", {"0.2", real_in(0, 0.5, true)}},
      {"model.alpha", {"1", real_in(0, 1e6)}},
      {"model.w2", {"0.1", real_in(0, 0.5, true)}},
      {"model.weight", {"0.5", real_in(0, 1e6)}},
      {"model.theta_deg", {"20", real_in(-90, 90)}},
      {"samples.t", {"0", int_in(0, 10000000000LL)}},
      {"reconstruct.mode", {"real", one_of({"real", "hermitian-newton", "rank-one", "mra"})}},
      {"reconstruct.problem", {"model", one_of({"model", "counterexample"})}},
      {"newton.max_step_deg", {"15", real_in(0, 180, true)}},
      {"newton.tol", {"1e-6", real_in(0, 1, true)}},
      {"newton.max_iters", {"500", int_in(1, 10000000)}},
      {"newton.restarts", {"0", int_in(0, 100000)}},
      {"newton.ap", {"true", one_of({"true", "false"})}},
      {"search.merit", {"euclidean", one_of({"euclidean", "max_abs"})}},
      {"search.tol_exact", {"1e-10", real_in(0, 1, true)}},
      {"search.strategy", {"auto", one_of({"auto", "greedy", "dp"})}},
      {"mra.ruler", {"standard", ruler_value()}},
      {"mra.noise_floor", {"auto", floor_value()}},
      {"calibrate.route", {"rank-one", one_of({"rank-one", "toeplitz"})}},
      {"calibrate.input", {"", any()}},
      {"sweep.w", {"0.1,0.15,0.2,0.27,0.3,0.35,0.4,0.45", list_of(real_in(0, 0.5, true))}},
      {"sweep.t", {"300,3000,30000,300000", list_of(int_in(0, 10000000000LL))}},
      {"sweep.long_run_t", {"30000000", int_in(1, 10000000000LL)}},
      {"sweep.trials", {"10", int_in(1, 1000000)}},
      {"sweep.threads", {"0", int_in(0, 1024)}},
      {"sweep.fig39_t", {"", list_of(int_in(1, 10000000000LL))}},
      {"spectrum.input", {"", any()}},
      {"spectrum.grid", {"2048", int_in(2, 1 << 22)}},
  };
  return s;
}

}  // namespace

std::vector<std::string> known_keys() {
  std::vector<std::string> k;
  for (const auto& [key, _] : schema()) k.push_back(key);
  return k;
}

RunConfig::RunConfig() {
  for (const auto& [k, spec] : schema()) values_[k] = spec.def;
}

void RunConfig::set(const std::string& key, const std::string& value, const std::string& where) {
  auto it = schema().find(key);
  if (it == schema().end()) throw ConfigError(where + ": unknown key '" + key + "'");
  try {
    it->second.check(value);
  } catch (const std::exception& e) {
    throw ConfigError(where + ": invalid value for '" + key + "': " + e.what());
  }
  values_[key] = value;
}

void RunConfig::set_assignment(const std::string& kv, const std::string& where) {
  auto eq = kv.find('=');
  if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)), where);
}

RunConfig RunConfig::parse(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  int no = 0;
  while (std::getline(is, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    cfg.set_assignment(line, source + ":" + std::to_string(no));
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

const std::string& RunConfig::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
  return it->second;
}

double RunConfig::num(const std::string& key) const { return to_double(str(key)); }
long long RunConfig::integer(const std::string& key) const { return to_int(str(key)); }
std::uint64_t RunConfig::u64(const std::string& key) const { return std::stoull(str(key)); }
bool RunConfig::flag(const std::string& key) const { return str(key) == "true"; }

std::vector<double> RunConfig::nums(const std::string& key) const {
  std::vector<double> out;
  for (const auto& x : split(str(key), ',')) out.push_back(to_double(x));
  return out;
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : values_) {
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string RunConfig::hash_hex() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

namespace {

// ---- output helpers -------------------------------------------------------

struct Output {
  const RunConfig& cfg;
  std::filesystem::path dir;

  Output(const RunConfig& c, const std::string& d) : cfg(c), dir(d) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + d + "': " + ec.message());
  }

  std::ofstream open(const std::string& name) const {
    std::ofstream f(dir / name);
    if (!f) throw ConfigError("cannot write '" + (dir / name).string() + "'");
    return f;
  }

  std::string meta() const { return "# config_hash=" + cfg.hash_hex() + " seed=" + cfg.str("seed") + "\n"; }

  void csv(const std::string& name, const std::string& header, const std::vector<std::vector<std::string>>& rows,
           const std::string& extra_meta = "") const {
    auto f = open(name);
    f << meta() << extra_meta << header << '\n';
    for (const auto& r : rows) {
      for (size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << r[i];
      f << '\n';
    }
  }

  void json(const std::string& name, Json j) const {
    j["meta"] = {{"config_hash", cfg.hash_hex()}, {"seed", cfg.u64("seed")}};
    auto f = open(name);
    f << j.dump(1) << '\n';
  }
};

std::string fmt(double x) { return format_number(x); }

// ---- config -> domain objects ----------------------------------------------

CovarianceModel model_of(const RunConfig& c) {
  const std::string kind = c.str("model.kind");
  if (kind == "sinc") return Sinc{c.num("model.w")};
  if (kind == "exp") return Exponential{c.num("model.w"), c.num("model.alpha")};
  return TwoBand{c.num("model.w"), c.num("model.w2"), c.num("model.theta_deg"), c.num("model.weight")};
}

ArrayScenario scenario_of(const RunConfig& c) {
  ArrayScenario s;
  s.n = static_cast<int>(c.integer("scenario.n"));
  s.d_over_lambda = c.num("scenario.d_over_lambda");
  s.theta_deg = c.num("scenario.theta_deg");
  s.noise_alpha = c.num("scenario.noise_alpha");
  s.model = model_of(c);
  s.seed = c.u64("seed");
  if (c.str("scenario.phase_errors") == "none") s.phase_errors = DiagPhase::identity(s.n);
  return s;
}

HermitianToeplitz model_toeplitz(const RunConfig& c) {
  ArrayScenario s = scenario_of(c);
  return generate(with_noise(s.noise_alpha, s.model), s.n, s.d_over_lambda);
}

NewtonConfig newton_of(const RunConfig& c) {
  NewtonConfig n;
  n.max_step_deg = c.num("newton.max_step_deg");
  n.tol_residual = c.num("newton.tol");
  n.max_iters = static_cast<int>(c.integer("newton.max_iters"));
  n.restarts = static_cast<int>(c.integer("newton.restarts"));
  n.init = RandomInit{c.u64("seed")};
  return n;
}

SearchOptions search_of(const RunConfig& c) {
  SearchOptions o;
  o.merit = c.str("search.merit") == "max_abs" ? Merit::max_abs : Merit::euclidean;
  o.tol_exact = c.num("search.tol_exact");
  return o;
}

Route route_of(const RunConfig& c) { return c.str("calibrate.route") == "toeplitz" ? Route::toeplitz : Route::rank_one; }

MraRuler ruler_of(const RunConfig& c, int n) {
  if (c.str("mra.ruler") == "standard") {
    if (n != 102) throw ConfigError("mra.ruler: the standard ruler needs scenario.n = 102");
    return MraRuler::ruler_17_of_102();
  }
  std::vector<int> pos;
  for (double x : c.nums("mra.ruler")) pos.push_back(static_cast<int>(x));
  try {
    return MraRuler(pos, n);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("mra.ruler: ") + e.what());
  }
}

RVector real_row(const HermitianToeplitz& t) {
  if (t.first_row().imag().cwiseAbs().maxCoeff() > 1e-14 * std::abs(t.first_row()(0)))
    throw ConfigError("model is not real-valued; choose a sinc or exp model for this mode");
  return t.first_row().real();
}

std::vector<std::vector<std::string>> value_rows(const std::vector<RVector>& cols) {
  std::vector<std::vector<std::string>> rows;
  const Eigen::Index n = cols.empty() ? 0 : cols[0].size();
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<std::string> r{std::to_string(i)};
    for (const auto& c : cols) r.push_back(i < c.size() ? fmt(c(i)) : "");
    rows.push_back(r);
  }
  return rows;
}

void write_spectrum(const Output& out, const std::string& name, const MeSpectrum& s) {
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < s.grid.size(); ++i) rows.push_back({fmt(s.grid(i)), fmt(s.values(i))});
  out.csv(name, "mu,S", rows, s.ridge_applied ? "# ridge_applied=true\n" : "");
}

HermitianMatrix counterexample_matrix() {
  RMatrix a(6, 6);
  a << 10, 1, 1, 1, -1, -1, 1, 10, -1, -1, -1, 1, 1, -1, 10, 1, -1, 1, 1, -1, 1, 10, -1, -1, -1, -1, -1, -1, 10, -1,
      -1, 1, 1, -1, -1, 10;
  return HermitianMatrix::from_real(a);
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, const RunOptions& opt) {
  Output out(cfg, opt.out_dir);
  ArrayScenario s = scenario_of(cfg);
  SimulatedScenario sim = simulate_scenario(s);
  const long long t = cfg.integer("samples.t");
  HermitianMatrix r_hat = t > 0 ? sample_covariance(sim.true_r, t, derive_seed(s.seed, {1})).matrix : sim.true_r;
  out.json("true_toeplitz.json", to_json(sim.true_toeplitz));
  out.json("true_r.json", to_json(sim.true_r));
  Json sj = to_json(r_hat);
  sj["t"] = t;
  out.json("sample_covariance.json", sj);
  out.csv("phases.csv", "element,phase_error_deg,applied_deg",
          value_rows({sim.phase_errors.values() * (180.0 / kPi), sim.applied.values() * (180.0 / kPi)}));
  return kOk;
}

int cmd_reconstruct(const RunConfig& cfg, const RunOptions& opt) {
  Output out(cfg, opt.out_dir);
  const std::string mode = cfg.str("reconstruct.mode");
  const bool counter = cfg.str("reconstruct.problem") == "counterexample";

  if (mode == "real" || mode == "mra") {
    std::optional<ProblemCSpec> spec;
    RVector truth;
    if (counter) {
      if (mode == "mra") throw ConfigError("reconstruct.problem = counterexample only applies to mode real");
      RVector mod(6);
      mod << 10, 1, 1, 1, 1, 1;
      spec.emplace(mod, eigenvalues(counterexample_matrix()));
    } else {
      truth = real_row(model_toeplitz(cfg));
      if (mode == "real") {
        spec.emplace(ProblemCSpec::from_row(truth));
      } else {
        MraRuler ruler = ruler_of(cfg, static_cast<int>(truth.size()));
        RVector tm = eigenvalues(mra_select(SymmetricToeplitz(truth).dense(), ruler));
        std::optional<double> floor;
        const std::string nf = cfg.str("mra.noise_floor");
        if (nf == "auto") floor = tm.minCoeff();
        else if (nf != "none") floor = std::stod(nf);
        spec.emplace(truth.cwiseAbs(), MraConstraint{ruler, tm, floor});
      }
    }
    SearchOptions so = search_of(cfg);
    const std::string strat = cfg.str("search.strategy");
    SearchResult r = strat == "greedy" ? max_element_search(*spec, so)
                     : strat == "dp"   ? dynamic_programming_search(*spec, so)
                                       : solve_problem_c(*spec, so);
    out.json("reconstructed.json", to_json(r.matrix));
    Json rep = to_json(r.trace);
    rep["exact"] = r.exact;
    rep["signs"] = r.pattern.values();
    RVector got = eigenvalues(r.matrix.dense());
    rep["eigenvalues"] = std::vector<double>(got.data(), got.data() + got.size());
    if (truth.size()) {
      SymmetricToeplitz t(truth);
      rep["max_entry_error_direct"] = (r.matrix.first_row() - truth).cwiseAbs().maxCoeff();
      rep["max_entry_error_isomorph"] = (isomorph(r.matrix).first_row() - truth).cwiseAbs().maxCoeff();
    }
    out.json("report.json", rep);
    {
      auto f = out.open("trace.csv");
      f << out.meta();
      write_trace_csv(f, r.trace);
    }
    if (spec->targets().size())
      out.csv("eigenvalues.csv", "index,target,reconstructed", value_rows({spec->targets(), got}));
    return r.exact ? kOk : kNotConverged;
  }

  if (counter) throw ConfigError("reconstruct.problem = counterexample only applies to mode real");
  HermitianToeplitz t = model_toeplitz(cfg);
  NewtonConfig nc = newton_of(cfg);

  if (mode == "hermitian-newton") {
    ProblemASpec spec = ProblemASpec::from_toeplitz(t);
    ProblemAResult res = solve_problem_a(spec, nc);
    HermitianToeplitz rec = res.matrix;
    Json rep = to_json(res.report);
    if (cfg.flag("newton.ap")) {
      ApResult ap = alternating_projections(rec, spec.targets());
      rec = ap.matrix;
      rep["ap_residual"] = ap.residual;
      rep["ap_sweeps"] = ap.sweeps;
      rep["ap_modulus_drift"] = (rec.first_row().cwiseAbs() - spec.moduli()).cwiseAbs().maxCoeff();
    }
    out.json("reconstructed.json", to_json(rec));
    out.json("report.json", rep);
    out.json("membership.json", to_json(family_membership_test(rec, t)));
    RVector got = eigenvalues(rec.matrix());
    out.csv("eigenvalues.csv", "index,target,reconstructed", value_rows({spec.targets(), got}));
    return res.report.converged ? kOk : kNotConverged;
  }

  // rank-one
  ArrayScenario s = scenario_of(cfg);
  DiagPhase err = s.phase_errors ? *s.phase_errors : random_phase_errors(s.n, s.seed);
  HermitianMatrix r = apply_phase_errors(t, err);
  ProblemBSpec spec(r);
  RankOneResult res = solve_problem_b(spec, nc);
  CVector row(t.n());
  row(0) = t.first_row()(0);
  SymmetricToeplitz mod = modulus_average(r);
  for (int k = 1; k < t.n(); ++k) row(k) = std::polar(mod.first_row()(k), -res.phases[k - 1]);
  HermitianToeplitz rec(row);
  out.json("reconstructed.json", to_json(rec));
  out.json("report.json", to_json(res));
  Json mem = to_json(family_membership_test(rec, t));
  RVector vmod = res.principal_vector.cwiseAbs();
  RVector steps(t.n() - 1);
  for (int i = 0; i + 1 < t.n(); ++i)
    steps(i) = deg(wrap_phase(std::arg(res.principal_vector(i + 1) * std::conj(res.principal_vector(i))) -
                              (err[i + 1] - err[i])));
  mem["principal_moduli"] = std::vector<double>(vmod.data(), vmod.data() + vmod.size());
  mem["phase_steps_minus_errors_deg"] = std::vector<double>(steps.data(), steps.data() + steps.size());
  out.json("membership.json", mem);
  return res.converged ? kOk : kNotConverged;
}

int cmd_calibrate(const RunConfig& cfg, const RunOptions& opt) {
  Output out(cfg, opt.out_dir);
  ArrayScenario s = scenario_of(cfg);
  std::optional<DiagPhase> truth;
  HermitianMatrix r_hat;
  const std::string input = cfg.str("calibrate.input");
  if (!input.empty()) {
    std::ifstream f(input);
    if (!f) throw ConfigError("cannot open input matrix '" + input + "'");
    try {
      r_hat = matrix_from_json(Json::parse(f));
    } catch (const std::exception& e) {
      throw ConfigError("cannot parse input matrix '" + input + "': " + e.what());
    }
  } else {
    SimulatedScenario sim = simulate_scenario(s);
    const long long t = cfg.integer("samples.t");
    r_hat = t > 0 ? sample_covariance(sim.true_r, t, derive_seed(s.seed, {1})).matrix : sim.true_r;
    truth = sim.phase_errors;
  }
  PipelineResult p = calibrate(r_hat, s.d_over_lambda, route_of(cfg));
  if (truth) p.estimate.rmse_deg = phase_rmse(p.estimate.phases, *truth);
  RVector est = p.estimate.phases.values() * (180.0 / kPi);
  if (truth)
    out.csv("phases.csv", "element,estimated_deg,true_deg", value_rows({est, truth->values() * (180.0 / kPi)}));
  else
    out.csv("phases.csv", "element,estimated_deg", value_rows({est}));
  write_spectrum(out, "spectrum_direct.csv", p.isomorph.direct_spectrum);
  write_spectrum(out, "spectrum_alternating.csv", p.isomorph.alternating_spectrum);
  Json sum = {{"route", to_string(route_of(cfg))},
              {"isomorph", to_string(p.isomorph.choice)},
              {"ambiguous", p.isomorph.ambiguous},
              {"direct_score", p.isomorph.direct_score},
              {"alternating_score", p.isomorph.alternating_score},
              {"low_confidence", p.estimate.low_confidence},
              {"warnings", p.estimate.warnings},
              {"signs", p.pattern.values()}};
  if (p.estimate.rmse_deg) sum["rmse_deg"] = *p.estimate.rmse_deg;
  out.json("summary.json", sum);
  return p.isomorph.ambiguous ? kAmbiguous : kOk;
}

int cmd_sweep(const RunConfig& cfg, const RunOptions& opt) {
  Output out(cfg, opt.out_dir);
  ArrayScenario s = scenario_of(cfg);
  std::vector<double> ws = cfg.nums("sweep.w");
  std::vector<long long> ts;
  for (double t : cfg.nums("sweep.t")) ts.push_back(static_cast<long long>(t));
  if (opt.long_run) ts.push_back(cfg.integer("sweep.long_run_t"));
  if (ws.empty() || ts.empty()) throw ConfigError("sweep grid is empty");
  const int trials = static_cast<int>(cfg.integer("sweep.trials"));
  McTable tab = monte_carlo_rmse(s, ws, ts, trials, cfg.u64("seed"), route_of(cfg),
                                 static_cast<unsigned>(cfg.integer("sweep.threads")));
  std::vector<std::vector<std::string>> rows;
  for (const auto& o : tab.trials)
    rows.push_back({fmt(o.w), std::to_string(o.t), std::to_string(o.trial), o.ok ? fmt(o.rmse_deg) : "nan",
                    o.ok ? "1" : "0", to_string(o.isomorph)});
  out.csv("sweep.csv", "W,T,trial,rmse_deg,converged,isomorph", rows);
  Json cells = Json::array();
  for (const auto& c : tab.cells)
    cells.push_back({{"W", c.w}, {"T", c.t}, {"mean_rmse_deg", c.ok ? Json(c.mean_rmse) : Json()},
                     {"ok", c.ok}, {"failed", c.failed}});
  out.json("summary.json", {{"trials", trials}, {"route", to_string(route_of(cfg))}, {"cells", cells}});

  std::vector<double> f39 = cfg.nums("sweep.fig39_t");
  if (!f39.empty()) {
    // eigenvalues without phase errors: true, sample, redundancy averaged, reconstructed
    ArrayScenario e = s;
    e.phase_errors = DiagPhase::identity(s.n);
    e.theta_deg = 0;
    e.model = with_bandwidth(s.model, ws.front());
    SimulatedScenario sim = simulate_scenario(e);
    RVector tv = eigenvalues(sim.true_r);
    std::vector<std::vector<std::string>> erows;
    for (size_t i = 0; i < f39.size(); ++i) {
      const long long t = static_cast<long long>(f39[i]);
      HermitianMatrix r_hat = sample_covariance(sim.true_r, t, derive_seed(cfg.u64("seed"), {99, i})).matrix;
      RVector sv = eigenvalues(r_hat);
      RVector av = eigenvalues(redundancy_average(r_hat).matrix());
      PipelineResult p = calibrate(r_hat, s.d_over_lambda, route_of(cfg));
      RVector rv = eigenvalues(p.reconstructed.dense());
      for (int k = 0; k < s.n; ++k)
        erows.push_back({std::to_string(t), std::to_string(k), fmt(tv(k)), fmt(sv(k)), fmt(av(k)), fmt(rv(k))});
    }
    out.csv("fig39_eigenvalues.csv", "T,index,true,sample,redundancy_averaged,reconstructed", erows,
            "# W=" + fmt(ws.front()) + "\n");
  }
  int failed = 0;
  for (const auto& c : tab.cells) failed += c.failed;
  return failed ? kNotConverged : kOk;
}

int cmd_spectrum(const RunConfig& cfg, const RunOptions& opt) {
  Output out(cfg, opt.out_dir);
  HermitianToeplitz t;
  const std::string input = cfg.str("spectrum.input");
  if (!input.empty()) {
    std::ifstream f(input);
    if (!f) throw ConfigError("cannot open input Toeplitz '" + input + "'");
    try {
      t = toeplitz_from_json(Json::parse(f));
    } catch (const std::exception& e) {
      throw ConfigError("cannot parse input Toeplitz '" + input + "': " + e.what());
    }
  } else {
    t = model_toeplitz(cfg);
  }
  const int grid = static_cast<int>(cfg.integer("spectrum.grid"));
  write_spectrum(out, "spectrum.csv", me_spectrum(t, grid));
  if (t.first_row().imag().cwiseAbs().maxCoeff() == 0.0) {
    SymmetricToeplitz st(t.first_row().real());
    IsomorphChoice c = select_physical_isomorph(st, cfg.num("scenario.d_over_lambda"));
    write_spectrum(out, "spectrum_isomorph.csv", c.alternating_spectrum);
    out.json("isomorph.json", {{"choice", to_string(c.choice)},
                               {"ambiguous", c.ambiguous},
                               {"direct_score", c.direct_score},
                               {"alternating_score", c.alternating_score}});
    if (c.ambiguous) return kAmbiguous;
  }
  return kOk;
}

int run_command(const std::string& name, const RunConfig& cfg, const RunOptions& opt) {
  if (name == "simulate") return cmd_simulate(cfg, opt);
  if (name == "reconstruct") return cmd_reconstruct(cfg, opt);
  if (name == "calibrate") return cmd_calibrate(cfg, opt);
  if (name == "sweep") return cmd_sweep(cfg, opt);
  if (name == "spectrum") return cmd_spectrum(cfg, opt);
  throw ConfigError("unknown command '" + name + "'");
}

}  // namespace toiep::cli
