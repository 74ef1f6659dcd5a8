#include "lrnr/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "lrnr/characteristics.hpp"
#include "lrnr/errors.hpp"
#include "lrnr/oracle.hpp"

namespace lrnr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr double kPi = 3.14159265358979323846;

double smooth_bump(double x) {
  const double s = std::sin(kPi * x);
  return 0.5 * s * s;
}

struct EntropyPipeline {
  std::shared_ptr<ExtendedInitialData> ext;
  std::shared_ptr<LaxOleinikOracle> oracle;
  ShockTimeTable table;
};

EntropyPipeline make_pipeline(const ExperimentConfig& cfg, int n_grid) {
  EntropyPipeline p;
  const auto flux = cfg.make_flux_ptr();
  const auto u0 = cfg.u0_pc();
  p.ext = std::make_shared<ExtendedInitialData>(extend_initial(u0, flux));
  p.oracle = std::make_shared<LaxOleinikOracle>(u0, flux, cfg.T);
  p.table = build_shock_table(*p.ext, p.oracle, n_grid);
  return p;
}

int table_grid_for(std::size_t K) { return std::max(256, static_cast<int>(2 * K)); }

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

// evenly spread subset of the sup-over-t samples, always including the horizon
std::vector<double> subsample(const std::vector<double>& ts, std::size_t n) {
  if (ts.size() <= n) return ts;
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(ts[(ts.size() - 1) * i / (n - 1)]);
  return out;
}

double sampled_l1(const std::function<double(double)>& f, const std::function<double(double)>& g, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) / n;
    s += std::abs(f(x) - g(x));
  }
  return s / n;
}

std::ofstream open_out(const std::string& path) {
  std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream os(path);
  if (!os) throw IOError("cannot open " + path);
  return os;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  if (K.empty()) throw ConfigError("K list is empty");
  if (!std::is_sorted(K.begin(), K.end())) throw ConfigError("K list must be sorted");
  for (auto k : K)
    if (k < 2) throw ConfigError("every K must be at least 2");
  if (builder != "entropy" && builder != "classical") throw ConfigError("unknown builder " + builder);
  if (builder == "entropy") {
    if (values.size() != breakpoints.size() + 1) throw ConfigError("values must have one more entry than breakpoints");
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end())) throw ConfigError("breakpoints must be sorted");
  }
  if (audit_samples < 1) throw ConfigError("audit_samples must be positive");
}

FluxPtr ExperimentConfig::make_flux_ptr() const {
  try {
    return make_flux(flux, flux_coeffs);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

PiecewiseConstantFn ExperimentConfig::u0_pc() const {
  if (builder != "entropy") throw ConfigError("piecewise constant data requested for a smooth preset");
  return PiecewiseConstantFn(breakpoints, values);
}

std::function<double(double)> ExperimentConfig::u0_smooth() const {
  if (preset == "smooth_bump") return smooth_bump;
  throw ConfigError("no smooth initial data for preset '" + preset + "'");
}

std::vector<std::string> preset_names() {
  return {"stationary_shock", "merge_two_shocks", "shock_rarefaction", "smooth_bump", "zero"};
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "stationary_shock") {
    c.breakpoints = {0.2, 0.5, 0.8};
    c.values = {0.0, 1.0, -1.0, 0.0};
    c.T = 0.25;
  } else if (name == "merge_two_shocks") {
    c.breakpoints = {0.0, 0.2, 0.4};
    c.values = {0.0, 2.0, 1.0, 0.0};
    c.T = 0.3;
  } else if (name == "shock_rarefaction") {
    c.breakpoints = {0.2, 0.5};
    c.values = {0.0, 1.0, 0.0};
    c.T = 0.8;
  } else if (name == "smooth_bump") {
    c.builder = "classical";
    c.T = 0.3;
    c.K = {16, 32, 64, 128};
  } else if (name == "zero") {
    c.breakpoints = {0.5};
    c.values = {0.0, 0.0};
    c.T = 0.25;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"preset", c.preset},
                     {"flux", c.flux},
                     {"flux_coeffs", c.flux_coeffs},
                     {"breakpoints", c.breakpoints},
                     {"values", c.values},
                     {"builder", c.builder},
                     {"T", c.T},
                     {"K", c.K},
                     {"lrnr_K_max", c.lrnr_K_max},
                     {"audit_samples", c.audit_samples},
                     {"out_dir", c.out_dir},
                     {"seed", c.seed},
                     {"tolerances",
                      {{"oracle_l1", c.tol.oracle_l1},
                       {"relief_l1", c.tol.relief_l1},
                       {"slope_max", c.tol.slope_max},
                       {"budget_factor", c.tol.budget_factor},
                       {"rank_max", c.tol.rank_max},
                       {"classical_rank_max", c.tol.classical_rank_max},
                       {"affinity", c.tol.affinity},
                       {"equivalence", c.tol.equivalence},
                       {"march_equal", c.tol.march_equal},
                       {"timing_lo", c.tol.timing_lo},
                       {"timing_hi", c.tol.timing_hi}}}};
}

void merge_config(ExperimentConfig& c, const nlohmann::json& j) {
  try {
    if (j.contains("preset") && !j["preset"].get<std::string>().empty()) {
      // a preset resets the data fields before the remaining keys apply
      const auto keep_out = c.out_dir;
      const auto keep_seed = c.seed;
      c = preset_config(j["preset"].get<std::string>());
      c.out_dir = keep_out;
      c.seed = keep_seed;
    }
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("flux", c.flux);
    get("flux_coeffs", c.flux_coeffs);
    get("breakpoints", c.breakpoints);
    get("values", c.values);
    if (j.contains("breakpoints") && !j.contains("preset")) c.preset.clear();
    get("builder", c.builder);
    get("T", c.T);
    get("K", c.K);
    get("lrnr_K_max", c.lrnr_K_max);
    get("audit_samples", c.audit_samples);
    get("out_dir", c.out_dir);
    get("seed", c.seed);
    if (j.contains("tolerances")) {
      const auto& t = j["tolerances"];
      auto tget = [&](const char* key, auto& field) {
        if (t.contains(key)) field = t[key].get<std::decay_t<decltype(field)>>();
      };
      tget("oracle_l1", c.tol.oracle_l1);
      tget("relief_l1", c.tol.relief_l1);
      tget("slope_max", c.tol.slope_max);
      tget("budget_factor", c.tol.budget_factor);
      tget("rank_max", c.tol.rank_max);
      tget("classical_rank_max", c.tol.classical_rank_max);
      tget("affinity", c.tol.affinity);
      tget("equivalence", c.tol.equivalence);
      tget("march_equal", c.tol.march_equal);
      tget("timing_lo", c.tol.timing_lo);
      tget("timing_hi", c.tol.timing_hi);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream is(path);
  if (!is) throw IOError("cannot read config " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  merge_config(base, j);
  return base;
}

void apply_env(ExperimentConfig& c) {
  if (const char* d = std::getenv("LRNR_OUT_DIR"); d && *d) c.out_dir = d;
}

// ---------------------------------------------------------------- convergence

double fit_loglog_slope(const std::vector<double>& K, const std::vector<double>& err, double floor) {
  if (K.size() != err.size()) throw ShapeMismatch("K and error lists differ in length");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < K.size(); ++i) {
    if (!(err[i] > floor) || !(K[i] > 0.0)) continue;
    const double x = std::log(K[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double den = n * sxx - sx * sx;
  if (n < 2 || den <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

std::vector<double> sup_t_samples(double T, std::size_t K) {
  std::vector<double> ts;
  for (std::size_t k = 0; k <= K; ++k) {
    ts.push_back(T * static_cast<double>(k) / static_cast<double>(K));
    if (k < K) ts.push_back(T * (static_cast<double>(k) + 0.5) / static_cast<double>(K));
  }
  return ts;
}

namespace {

ConvergenceRow convergence_entropy(const ExperimentConfig& cfg, std::size_t K) {
  ConvergenceRow row;
  row.K = K;
  auto t0 = Clock::now();
  auto pipe = make_pipeline(cfg, table_grid_for(K));
  row.table_seconds = seconds_since(t0);

  t0 = Clock::now();
  EntropyBuildConfig bc;
  bc.K = K;
  bc.T = cfg.T;
  const auto ea = build_entropy(pipe.ext, pipe.table, bc);
  row.build_seconds = seconds_since(t0);

  t0 = Clock::now();
  const Interval dom(0.0, 1.0);
  for (double t : sup_t_samples(cfg.T, K)) {
    const auto prof = pipe.oracle->profile(t);
    row.l1_hbar = std::max(row.l1_hbar, prof.l1_distance(hbar_profile(ea, t), dom));
  }
  row.eval_seconds = seconds_since(t0);

  if (K <= cfg.lrnr_K_max) {
    const auto model = build_5layer_lrnr(ea);
    row.l1_lrnr = 0.0;
    for (double t : subsample(sup_t_samples(cfg.T, K), 5)) {
      const auto prof = pipe.oracle->profile(t);
      row.l1_lrnr = std::max(row.l1_lrnr, sampled_l1([&](double x) { return forward(model, x, t); },
                                                     [&](double x) { return prof(x); }, 1024));
    }
  }
  row.predicted = error_budget(cfg.u0_pc(), *cfg.make_flux_ptr(), cfg.T, K).entropy_bound;
  // absolute floor: zero data has a zero budget
  row.within_budget = row.l1_hbar <= cfg.tol.budget_factor * row.predicted + 1e-10;
  return row;
}

ConvergenceRow convergence_classical(const ExperimentConfig& cfg, std::size_t K) {
  ConvergenceRow row;
  row.K = K;
  const auto flux = cfg.make_flux_ptr();
  const auto u0 = cfg.u0_smooth();
  auto t0 = Clock::now();
  const auto b = build_classical_lrnr(u0, flux, cfg.T, K);
  row.build_seconds = seconds_since(t0);
  const CharacteristicOracle oracle(u0, flux, Interval(0.0, 1.0));
  t0 = Clock::now();
  for (double t : sup_t_samples(cfg.T, K))
    row.l1_hbar = std::max(row.l1_hbar, oracle.l1_distance(b.output_p1(t, Interval(0.0, 1.0)), t));
  row.eval_seconds = seconds_since(t0);
  if (K <= cfg.lrnr_K_max) {
    row.l1_lrnr = 0.0;
    for (double t : subsample(sup_t_samples(cfg.T, K), 5))
      row.l1_lrnr = std::max(row.l1_lrnr, sampled_l1([&](double x) { return forward(b.model(), x, t); },
                                                     [&](double x) { return oracle.solution(x, t); }, 1024));
  }
  return row;
}

}  // namespace

ConvergenceReport run_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  ConvergenceReport rep;
  rep.preset = cfg.preset;
  rep.builder = cfg.builder;
  bool all_ok = true;
  std::vector<double> ks, es;
  for (auto K : cfg.K) {
    ConvergenceRow row;
    try {
      row = cfg.builder == "entropy" ? convergence_entropy(cfg, K) : convergence_classical(cfg, K);
      ks.push_back(static_cast<double>(K));
      es.push_back(row.l1_hbar);
    } catch (const Error& e) {
      row.K = K;
      row.error = e.what();
      row.within_budget = false;
      all_ok = false;
    }
    rep.rows.push_back(row);
  }
  rep.slope = fit_loglog_slope(ks, es);
  const double max_err = es.empty() ? 0.0 : *std::max_element(es.begin(), es.end());
  // identically exact data has no rate to fit
  rep.slope_ok = std::isnan(rep.slope) ? (all_ok && max_err <= 1e-10) : rep.slope <= cfg.tol.slope_max;
  rep.budget_ok = all_ok && std::all_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.within_budget; });
  rep.pass = rep.slope_ok && rep.budget_ok;
  return rep;
}

// ---------------------------------------------------------------- audit

AuditReport audit_model(const LRNRModel& model, const std::function<double(double, double)>& reference, double T,
                        std::size_t expected_depth, int rank_max, const Tolerances& tol, int samples,
                        std::uint64_t seed) {
  model.validate();
  AuditReport r;
  r.label = model.label;
  r.depth = model.depth();
  r.expected_depth = expected_depth;
  r.rank_max = rank_max;
  const std::vector<double> ts{0.0, 0.5 * T, T};
  bool rank_ok = true;
  for (std::size_t l = 1; l <= model.depth(); ++l) {
    LayerAudit la;
    la.index = l;
    la.rows = model.layers[l - 1].rows;
    la.cols = model.layers[l - 1].cols;
    la.svd_rank = layer_rank(model, l, ts);
    la.coefficient_rank = coefficient_rank(model, l);
    la.factor_count = model.layers[l - 1].weight_factors.size();
    rank_ok = rank_ok && la.svd_rank <= rank_max;
    r.layers.push_back(la);
  }
  r.affinity_residual = affinity_residual(model, {0.0, 0.25 * T, 0.5 * T, T, 2.0 * T});
  r.dof = dof_count(model);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 1.0), ut(0.0, T);
  for (int i = 0; i < samples; ++i) {
    const double x = ux(rng), t = ut(rng);
    r.max_deviation = std::max(r.max_deviation, std::abs(forward(model, x, t) - reference(x, t)));
  }
  r.depth_ok = r.depth == expected_depth;
  r.rank_ok = rank_ok;
  r.affine_ok = r.affinity_residual <= tol.affinity;
  r.equiv_ok = r.max_deviation <= tol.equivalence;
  r.pass = r.depth_ok && r.rank_ok && r.affine_ok && r.equiv_ok;
  return r;
}

std::vector<AuditReport> run_audit(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<AuditReport> out;
  for (auto K : cfg.K) {
    if (cfg.builder == "entropy") {
      auto pipe = make_pipeline(cfg, table_grid_for(K));
      EntropyBuildConfig bc;
      bc.K = K;
      bc.T = cfg.T;
      const auto ea = build_entropy(pipe.ext, pipe.table, bc);
      const auto model = build_5layer_lrnr(ea, true);
      auto r = audit_model(model, [&](double x, double t) { return hbar_eval(ea, x, t); }, cfg.T, 5, cfg.tol.rank_max,
                           cfg.tol, cfg.audit_samples, cfg.seed + K);
      r.K = K;
      r.dof_per_K = static_cast<double>(r.dof) / static_cast<double>(K);
      out.push_back(r);
    } else {
      const auto b = build_classical_lrnr(cfg.u0_smooth(), cfg.make_flux_ptr(), cfg.T, K);
      const auto model = b.model();
      auto r = audit_model(
          model, [&](double x, double t) { return b.output_p1(t, Interval(0.0, 1.0))(x); }, cfg.T, 2,
          cfg.tol.classical_rank_max, cfg.tol, cfg.audit_samples, cfg.seed + K);
      r.K = K;
      r.dof_per_K = static_cast<double>(r.dof) / static_cast<double>(K);
      out.push_back(r);
    }
  }
  return out;
}

// ---------------------------------------------------------------- timing

TimingReport run_timing(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.builder != "entropy") throw ConfigError("timing needs the entropy builder");
  if (cfg.K.size() < 2) throw ConfigError("timing needs at least two K values");
  TimingReport rep;
  std::mt19937_64 rng(cfg.seed);
  for (auto K : cfg.K) {
    auto pipe = make_pipeline(cfg, table_grid_for(K));
    EntropyBuildConfig bc;
    bc.K = K;
    bc.T = cfg.T;
    const auto ea = build_entropy(pipe.ext, pipe.table, bc);
    const auto xs = linspace(0.0, 1.0, K), ts = linspace(0.0, cfg.T, K);
    std::vector<double> vals;
    double best = std::numeric_limits<double>::infinity(), total = 0.0;
    for (int rep_i = 0; rep_i < 200 && (rep_i < 7 || total < 0.3); ++rep_i) {
      const auto t0 = Clock::now();
      vals = march_eval(ea, xs, ts);
      const double s = seconds_since(t0);
      best = std::min(best, s);
      total += s;
    }
    // pointwise spot check; all points for small grids
    const std::size_t n = K * K;
    const std::size_t n_check = std::min<std::size_t>(n, 4096);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t c = 0; c < n_check; ++c) {
      const std::size_t idx = n_check == n ? c : pick(rng);
      const double ref = hbar_eval(ea, xs[idx % K], ts[idx / K]);
      rep.max_march_deviation = std::max(rep.max_march_deviation, std::abs(vals[idx] - ref));
    }
    TimingRow row;
    row.K = K;
    row.seconds = best;
    row.ns_per_point = best * 1e9 / static_cast<double>(n);
    row.ratio = rep.rows.empty() ? 0.0 : best / rep.rows.back().seconds;
    rep.rows.push_back(row);
  }
  const double last = rep.rows.back().ratio;
  rep.ratio_ok = last >= cfg.tol.timing_lo && last <= cfg.tol.timing_hi;
  rep.equal_ok = rep.max_march_deviation <= cfg.tol.march_equal;
  rep.pass = rep.ratio_ok && rep.equal_ok;
  return rep;
}

// ---------------------------------------------------------------- consistency

ConsistencyReport run_consistency(const ExperimentConfig& cfg, int n_t, int n_x) {
  cfg.validate();
  ConsistencyReport rep;
  rep.preset = cfg.preset;
  auto pipe = make_pipeline(cfg, 256);
  const double c_x = pipe.ext->length();
  for (int i = 1; i <= n_t; ++i) {
    const double t = cfg.T * i / n_t;
    rep.t_samples.push_back(t);
    const XhatSlice slice(*pipe.ext, pipe.table, t);
    const auto segs = slice.relief_segments(c_x);
    double e = 0.0, r = 0.0;
    for (int m = 0; m < n_x; ++m) {
      const double x = (m + 0.5) / n_x;
      const double ent = slice.entropy(x);
      e += std::abs(ent - pipe.oracle->solution(x, t));
      r += std::abs(slice.relief(segs, x) - ent);
    }
    rep.max_entropy_l1 = std::max(rep.max_entropy_l1, e / n_x);
    rep.max_relief_l1 = std::max(rep.max_relief_l1, r / n_x);
  }
  rep.pass = rep.max_entropy_l1 <= cfg.tol.oracle_l1 && rep.max_relief_l1 <= cfg.tol.relief_l1;
  return rep;
}

// ---------------------------------------------------------------- export

std::string export_data(const ExperimentConfig& cfg, const std::string& what, std::size_t K) {
  cfg.validate();
  const std::string tag = cfg.preset.empty() ? "custom" : cfg.preset;
  const std::filesystem::path dir(cfg.out_dir);
  const Interval dom(0.0, 1.0);

  if (cfg.builder == "classical") {
    const auto b = build_classical_lrnr(cfg.u0_smooth(), cfg.make_flux_ptr(), cfg.T, K);
    if (what == "weights") {
      const auto path = (dir / ("weights_" + tag + ".json")).string();
      auto os = open_out(path);
      nlohmann::json j = b.model();
      os << j.dump(1) << '\n';
      return path;
    }
    if (what != "solution") throw ConfigError("classical presets export only solution and weights");
    const CharacteristicOracle oracle(cfg.u0_smooth(), cfg.make_flux_ptr(), dom);
    const auto path = (dir / ("solution_" + tag + ".csv")).string();
    auto os = open_out(path);
    os << "x,t,u_oracle,hbar,lrnr\n";
    for (double t : linspace(0.0, cfg.T, 21)) {
      const auto h = b.output_p1(t, dom);
      for (double x : linspace(0.0, 1.0, 201))
        os << fmt(x) << ',' << fmt(t) << ',' << fmt(oracle.solution(x, t)) << ',' << fmt(h(x)) << ','
           << fmt(forward(b.model(), x, t)) << '\n';
    }
    return path;
  }

  auto pipe = make_pipeline(cfg, table_grid_for(K));
  EntropyBuildConfig bc;
  bc.K = K;
  bc.T = cfg.T;
  const auto ea = build_entropy(pipe.ext, pipe.table, bc);

  if (what == "weights") {
    const auto path = (dir / ("weights_" + tag + ".json")).string();
    auto os = open_out(path);
    nlohmann::json j = build_5layer_lrnr(ea);
    os << j.dump(1) << '\n';
    return path;
  }
  if (what == "lambda") {
    const auto path = (dir / ("lambda_" + tag + ".csv")).string();
    auto os = open_out(path);
    os << "z,lambda\n";
    for (std::size_t i = 0; i < pipe.table.grid.size(); ++i)
      os << fmt(pipe.table.grid[i]) << ',' << fmt(pipe.table.lambda_vals[i]) << '\n';
    return path;
  }
  if (what == "characteristics") {
    const auto path = (dir / ("characteristics_" + tag + ".csv")).string();
    auto os = open_out(path);
    os << "x_hat_domain_point,t,xhat0,xhat,chieut\n";
    const auto zs = linspace(pipe.ext->ext_dom.lo, pipe.ext->ext_dom.hi, 101);
    for (double t : linspace(0.0, cfg.T, 21)) {
      const XhatSlice slice(*pipe.ext, pipe.table, t);
      for (double z : zs)
        os << fmt(z) << ',' << fmt(t) << ',' << fmt(pipe.ext->xhat0(z, t)) << ',' << fmt(slice.xhat(z)) << ','
           << fmt(chieut_eval(ea, z, t)) << '\n';
    }
    return path;
  }
  if (what == "solution") {
    const auto model = build_5layer_lrnr(ea);
    const auto path = (dir / ("solution_" + tag + ".csv")).string();
    auto os = open_out(path);
    os << "x,t,u_oracle,hbar,lrnr\n";
    const auto xs = linspace(0.0, 1.0, 201);
    const auto ts = linspace(0.0, cfg.T, 21);
    const auto hb = march_eval(ea, xs, ts);
    for (std::size_t it = 0; it < ts.size(); ++it)
      for (std::size_t ix = 0; ix < xs.size(); ++ix)
        os << fmt(xs[ix]) << ',' << fmt(ts[it]) << ',' << fmt(pipe.oracle->solution(xs[ix], ts[it])) << ','
           << fmt(hb[it * xs.size() + ix]) << ',' << fmt(forward(model, xs[ix], ts[it])) << '\n';
    return path;
  }
  throw ConfigError("unknown export target '" + what + "'");
}

// ---------------------------------------------------------------- json

namespace {
nlohmann::json num_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
}  // namespace

void to_json(nlohmann::json& j, const ConvergenceRow& r) {
  j = nlohmann::json{{"K", r.K},
                     {"l1_hbar", r.l1_hbar},
                     {"l1_lrnr", r.l1_lrnr < 0 ? nlohmann::json(nullptr) : nlohmann::json(r.l1_lrnr)},
                     {"table_seconds", r.table_seconds},
                     {"build_seconds", r.build_seconds},
                     {"eval_seconds", r.eval_seconds},
                     {"predicted", r.predicted < 0 ? nlohmann::json(nullptr) : nlohmann::json(r.predicted)},
                     {"within_budget", r.within_budget}};
  if (!r.error.empty()) j["error"] = r.error;
}

void to_json(nlohmann::json& j, const ConvergenceReport& r) {
  j = nlohmann::json{{"preset", r.preset},     {"builder", r.builder},     {"rows", r.rows},
                     {"slope", std::isnan(r.slope) ? nlohmann::json("NA") : nlohmann::json(r.slope)},
                     {"slope_ok", r.slope_ok}, {"budget_ok", r.budget_ok}, {"pass", r.pass}};
}

void to_json(nlohmann::json& j, const LayerAudit& r) {
  j = nlohmann::json{{"layer", r.index},
                     {"rows", r.rows},
                     {"cols", r.cols},
                     {"svd_rank", r.svd_rank},
                     {"coefficient_rank", r.coefficient_rank},
                     {"factor_count", r.factor_count}};
}

void to_json(nlohmann::json& j, const AuditReport& r) {
  j = nlohmann::json{{"label", r.label},
                     {"K", r.K},
                     {"depth", r.depth},
                     {"layers", r.layers},
                     {"affinity_residual", r.affinity_residual},
                     {"dof", r.dof},
                     {"dof_per_K", r.dof_per_K},
                     {"max_deviation", num_or_null(r.max_deviation)},
                     {"rank_max", r.rank_max},
                     {"depth_ok", r.depth_ok},
                     {"rank_ok", r.rank_ok},
                     {"affine_ok", r.affine_ok},
                     {"equiv_ok", r.equiv_ok},
                     {"pass", r.pass}};
}

void to_json(nlohmann::json& j, const TimingRow& r) {
  j = nlohmann::json{{"K", r.K}, {"seconds", r.seconds}, {"ns_per_point", r.ns_per_point}, {"ratio", r.ratio}};
}

void to_json(nlohmann::json& j, const TimingReport& r) {
  j = nlohmann::json{{"rows", r.rows},
                     {"max_march_deviation", r.max_march_deviation},
                     {"ratio_ok", r.ratio_ok},
                     {"equal_ok", r.equal_ok},
                     {"pass", r.pass}};
}

void to_json(nlohmann::json& j, const ConsistencyReport& r) {
  j = nlohmann::json{{"preset", r.preset},
                     {"t_samples", r.t_samples},
                     {"max_entropy_l1", r.max_entropy_l1},
                     {"max_relief_l1", r.max_relief_l1},
                     {"pass", r.pass}};
}

}  // namespace lrnr
