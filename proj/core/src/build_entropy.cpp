#include "lrnr/build_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lrnr/errors.hpp"

namespace lrnr {

namespace {

double tau(const EntropyApprox& ea, std::size_t k, double t) {
  return static_cast<double>(ea.config.K) / ea.config.T * (t - ea.layers[k - 1].t_k);
}

// eta term k at z for time t, or nothing if the shift has cleared the domain
bool eta_term(const EntropyApprox& ea, std::size_t k, double z, double t, double& out) {
  const double tk = tau(ea, k, t);
  if (tk >= 1.0) return false;
  const double sh = ea.config.c_x * std::max(tk, 0.0);
  out = ea.eta[k - 1](z - sh);
  return true;
}

StepSum make_u0_eps(const ExtendedInitialData& ext, std::size_t K, double eps) {
  StepSum s;
  s.eps = eps;
  std::size_t n_neg = 0;
  double rise = 0.0;
  std::size_t n_fans = 0;
  for (std::size_t i = 0; i < ext.pieces.size(); ++i) {
    const auto& p = ext.pieces[i];
    if (p.fan) {
      ++n_fans;
      rise += ext.flux->fprime_inverse(p.nu_plus) - ext.flux->fprime_inverse(p.nu_minus);
    }
  }
  // leading piece starting below zero state is represented by a step at z = 0
  if (!ext.pieces.empty() && !ext.pieces.front().fan && ext.pieces.front().value != 0.0) ++n_neg;
  for (double z : ext.jump_images()) (void)z, ++n_neg;
  if (n_neg + n_fans > K) throw OutOfRange("K too small for the number of jumps and fans");
  const std::size_t spare = K - n_neg;
  std::vector<std::size_t> fan_steps;
  std::size_t used = 0;
  for (const auto& p : ext.pieces) {
    if (!p.fan) continue;
    const double r = ext.flux->fprime_inverse(p.nu_plus) - ext.flux->fprime_inverse(p.nu_minus);
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(spare * r / rise)));
    fan_steps.push_back(n);
    used += n;
  }
  // hand out the remainder to the widest fans first
  while (n_fans > 0 && used < spare) {
    std::size_t best = 0;
    double best_h = -1.0;
    std::size_t f = 0;
    for (const auto& p : ext.pieces) {
      if (!p.fan) continue;
      const double r = ext.flux->fprime_inverse(p.nu_plus) - ext.flux->fprime_inverse(p.nu_minus);
      if (r / fan_steps[f] > best_h) {
        best_h = r / fan_steps[f];
        best = f;
      }
      ++f;
    }
    ++fan_steps[best];
    ++used;
  }

  if (!ext.pieces.empty() && !ext.pieces.front().fan && ext.pieces.front().value != 0.0) {
    s.x.push_back(ext.pieces.front().a);
    s.c.push_back(ext.pieces.front().value);
  }
  std::size_t f = 0;
  for (std::size_t i = 0; i < ext.pieces.size(); ++i) {
    const auto& p = ext.pieces[i];
    if (p.fan) {
      const double ul = ext.flux->fprime_inverse(p.nu_minus), ur = ext.flux->fprime_inverse(p.nu_plus);
      const std::size_t n = fan_steps[f++];
      const double h = (ur - ul) / static_cast<double>(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double level = ul + (static_cast<double>(j) + 0.5) * h;
        const double frac = (ext.flux->fp(level) - p.nu_minus) / (p.nu_plus - p.nu_minus);
        s.x.push_back(p.a + frac * (p.b - p.a));
        s.c.push_back(h);
      }
    }
    if (i + 1 < ext.pieces.size()) {
      const auto& q = ext.pieces[i + 1];
      if (!p.fan && !q.fan && q.value < p.value) {
        s.x.push_back(p.b);
        s.c.push_back(q.value - p.value);
      }
    }
  }
  return s;
}

PiecewiseLinearFn prune(const std::vector<double>& z, std::vector<double> v) {
  const std::size_t n = z.size();
  v.front() = 0.0;
  v.back() = 0.0;
  std::vector<double> slope(n - 1);
  double smax = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    slope[i] = (v[i + 1] - v[i]) / (z[i + 1] - z[i]);
    smax = std::max(smax, std::abs(slope[i]));
  }
  const double tol = 1e-12 * std::max(1.0, smax);
  std::vector<double> kz{z.front()}, kv{v.front()};
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (std::abs(slope[i] - slope[i - 1]) > tol) {
      kz.push_back(z[i]);
      kv.push_back(v[i]);
    }
  }
  kz.push_back(z.back());
  kv.push_back(v.back());
  return PiecewiseLinearFn(kz, kv);
}

}  // namespace

EntropyApprox build_entropy(std::shared_ptr<const ExtendedInitialData> ext_ptr, ShockTimeTable table,
                            EntropyBuildConfig cfg) {
  const ExtendedInitialData& ext = *ext_ptr;
  if (cfg.K < 2) throw OutOfRange("K must be at least 2");
  if (cfg.T <= 0.0) cfg.T = table.T;
  if (cfg.T > table.T * (1.0 + 1e-12)) throw HorizonExceeded("build horizon exceeds the shock table horizon");
  const double L = ext.length();
  if (cfg.c_x <= 0.0) cfg.c_x = L;
  if (cfg.c_x < L) throw InvalidCx("relief shift must be at least the extended domain length");
  if (cfg.eps <= 0.0) cfg.eps = 1.0 / static_cast<double>(cfg.K);
  cfg.eps0 = cfg.T / static_cast<double>(cfg.K);
  const std::size_t K = cfg.K;

  EntropyApprox ea;
  ea.u0_eps = make_u0_eps(ext, K, cfg.eps);
  {
    std::vector<double> xs = ea.u0_eps.x;
    std::sort(xs.begin(), xs.end());
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      if (xs[i + 1] > xs[i]) gap = std::min(gap, xs[i + 1] - xs[i]);
    cfg.eps1 = std::isfinite(gap) ? 0.5 * gap : cfg.eps;
  }
  ea.config = cfg;
  ea.ext = ext_ptr;
  ea.table = std::move(table);

  std::vector<XhatSlice> slices;
  slices.reserve(K);
  ea.layers.resize(K);
  for (std::size_t k = 1; k <= K; ++k) {
    ea.layers[k - 1].k = k;
    ea.layers[k - 1].t_k = static_cast<double>(k - 1) * cfg.T / static_cast<double>(K);
    slices.emplace_back(ext, ea.table, ea.layers[k - 1].t_k);
  }

  // spatial grid: structural points are pinned, the rest is merged at h_min
  std::vector<std::pair<double, bool>> cand;
  for (double z : ext.knots()) cand.emplace_back(z, true);
  for (const auto& g : ext.gammas)
    for (int i = 1; i < 8; ++i) cand.emplace_back(g.lo + g.length() * i / 8.0, false);
  for (std::size_t i = 0; i <= K; ++i) cand.emplace_back(ext.ext_dom.lo + L * i / static_cast<double>(K), false);
  for (double x : ea.u0_eps.x) cand.emplace_back(x, false);
  for (const auto& s : slices)
    for (const auto& c : s.components()) {
      cand.emplace_back(c.lo, false);
      cand.emplace_back(c.hi, false);
    }
  std::sort(cand.begin(), cand.end());
  const double h_min = 1e-3 * L / static_cast<double>(K);
  std::vector<double> zg;
  std::vector<bool> pinned;
  for (const auto& [z, pin] : cand) {
    if (z < ext.ext_dom.lo || z > ext.ext_dom.hi) continue;
    if (!zg.empty() && z - zg.back() < h_min) {
      if (pin && !pinned.back()) {
        zg.back() = z;
        pinned.back() = true;
      }
      continue;
    }
    zg.push_back(z);
    pinned.push_back(pin);
  }
  ea.z_grid = zg;
  const std::size_t Q = zg.size();

  const auto jumps = ext.jump_images();
  std::vector<double> v_prev;
  for (std::size_t k = 1; k <= K; ++k) {
    auto& layer = ea.layers[k - 1];
    const auto& s = slices[k - 1];
    std::vector<double> X(Q), v(Q);
    for (std::size_t i = 0; i < Q; ++i) X[i] = s.xhat(zg[i]);
    if (k == 1) {
      for (std::size_t i = 0; i < Q; ++i) {
        v[i] = ext.speed(zg[i]);
        if (std::binary_search(jumps.begin(), jumps.end(), zg[i]))
          v[i] = ext.flux->rh_speed(ext.uhat(zg[i], Side::Left), ext.uhat(zg[i], Side::Right));
      }
    } else {
      for (std::size_t i = 0; i < Q; ++i) v[i] = (X[i] - ext.i_hat(zg[i])) / layer.t_k;
    }
    layer.jieut_k = PiecewiseLinearFn(zg, X);
    layer.vtilde = PiecewiseLinearFn(zg, v);
    if (k > 1) {
      std::vector<double> d(Q);
      for (std::size_t i = 0; i < Q; ++i) d[i] = v[i] - v_prev[i];
      ea.eta.push_back(prune(zg, d));
    }
    v_prev = std::move(v);
  }
  const auto& vK = ea.layers.back().vtilde;
  for (double x : ea.u0_eps.x) {
    ea.ihat_at_steps.push_back(ext.i_hat(x));
    ea.vK_at_steps.push_back(vK(x));
  }
  return ea;
}

EntropyApprox build_entropy(const PiecewiseConstantFn& u0, FluxPtr flux, double T, std::size_t K) {
  auto ext = std::make_shared<ExtendedInitialData>(extend_initial(u0, flux));
  auto oracle = std::make_shared<LaxOleinikOracle>(u0, flux, T);
  const int n_grid = std::max(256, static_cast<int>(2 * K));
  auto table = build_shock_table(*ext, oracle, n_grid);
  EntropyBuildConfig cfg;
  cfg.K = K;
  cfg.T = T;
  return build_entropy(ext, std::move(table), cfg);
}

double chieut_eval(const EntropyApprox& ea, double z, double t) {
  if (t < 0.0 || t > ea.config.T * (1.0 + 1e-12)) throw HorizonExceeded("t outside [0,T]");
  if (!ea.ext->ext_dom.contains(z, 1e-12 * (1.0 + ea.ext->length())))
    throw OutOfDomain("point outside the extended domain");
  double acc = 0.0, term = 0.0;
  for (std::size_t k = ea.config.K - 1; k >= 1; --k)
    if (eta_term(ea, k, z, t, term)) acc += term;
  return ea.ext->i_hat(z) + t * ea.layers.back().vtilde(z) - t * acc;
}

std::vector<double> chieut_at_steps(const EntropyApprox& ea, double t) {
  if (t < 0.0 || t > ea.config.T * (1.0 + 1e-12)) throw HorizonExceeded("t outside [0,T]");
  const std::size_t P = ea.u0_eps.x.size();
  std::vector<double> g(P);
  for (std::size_t p = 0; p < P; ++p) {
    const double z = ea.u0_eps.x[p];
    double acc = 0.0, term = 0.0;
    for (std::size_t k = ea.config.K - 1; k >= 1; --k)
      if (eta_term(ea, k, z, t, term)) acc += term;
    g[p] = ea.ihat_at_steps[p] + t * ea.vK_at_steps[p] - t * acc;
  }
  return g;
}

double hbar_eval(const EntropyApprox& ea, double x, double t) {
  if (!ea.ext->dom_x.contains(x, 1e-12)) throw OutOfDomain("point outside the spatial domain");
  const auto g = chieut_at_steps(ea, t);
  double s = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) s += ea.u0_eps.c[p] * rho_eps(ea.config.eps, x - g[p]);
  return s;
}

PiecewiseLinearFn hbar_profile(const EntropyApprox& ea, double t) {
  StepSum s = ea.u0_eps;
  s.x = chieut_at_steps(ea, t);
  return s.to_p1(ea.ext->dom_x);
}

std::vector<double> march_eval(const EntropyApprox& ea, const std::vector<double>& x_grid,
                               const std::vector<double>& t_grid) {
  const std::size_t K = ea.config.K, P = ea.u0_eps.x.size(), Nx = x_grid.size();
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
    if (t_grid[i + 1] < t_grid[i]) throw OutOfRange("t_grid must be nondecreasing");
  // suffix[j][p] = sum over k = K-1 down to j of eta_k(x_p), in the pointwise summation order
  std::vector<std::vector<double>> suffix(K + 1, std::vector<double>(P, 0.0));
  for (std::size_t j = K - 1; j >= 1; --j)
    for (std::size_t p = 0; p < P; ++p) suffix[j][p] = suffix[j + 1][p] + ea.eta[j - 1](ea.u0_eps.x[p]);

  bool uniform = Nx >= 2;
  const double x0 = Nx ? x_grid[0] : 0.0;
  const double dx = Nx >= 2 ? (x_grid[Nx - 1] - x0) / static_cast<double>(Nx - 1) : 0.0;
  for (std::size_t m = 0; uniform && m < Nx; ++m)
    if (std::abs(x_grid[m] - (x0 + dx * m)) > 1e-12 * (1.0 + std::abs(x_grid[m]))) uniform = false;
  if (dx <= 0.0) uniform = false;

  const double eps = ea.config.eps, h = 0.5 * eps;
  std::vector<double> out(t_grid.size() * Nx, 0.0);
  std::vector<double> g(P), dA(Nx + 1), dB(Nx + 1);
  std::size_t j = 1;
  for (std::size_t it = 0; it < t_grid.size(); ++it) {
    const double t = t_grid[it];
    if (t < 0.0 || t > ea.config.T * (1.0 + 1e-12)) throw HorizonExceeded("t outside [0,T]");
    while (j < K && ea.layers[j].t_k <= t) ++j;  // t_j <= t < t_{j+1}
    for (std::size_t p = 0; p < P; ++p) {
      const double z = ea.u0_eps.x[p];
      double acc = suffix[j + 1 <= K ? j + 1 : K][p], term = 0.0;
      for (std::size_t k = std::min(j, K - 1); k + 1 >= j && k >= 1; --k)
        if (eta_term(ea, k, z, t, term)) acc += term;
      g[p] = ea.ihat_at_steps[p] + t * ea.vK_at_steps[p] - t * acc;
    }
    double* row = out.data() + it * Nx;
    if (uniform) {
      std::fill(dA.begin(), dA.end(), 0.0);
      std::fill(dB.begin(), dB.end(), 0.0);
      auto first_above = [&](double v, bool strict) {
        double m = std::floor((v - x0) / dx);
        m = std::clamp(m, -1.0, static_cast<double>(Nx));
        auto i = static_cast<long>(m);
        if (i < 0) i = 0;
        auto ok = [&](long q) { return strict ? x_grid[q] > v : x_grid[q] >= v; };
        while (i > 0 && ok(i - 1)) --i;
        while (i < static_cast<long>(Nx) && !ok(i)) ++i;
        return static_cast<std::size_t>(i);
      };
      for (std::size_t p = 0; p < P; ++p) {
        const double c = ea.u0_eps.c[p], lo = g[p] - h, hi = g[p] + h;
        const std::size_t m1 = first_above(lo, true), m2 = first_above(hi, false);
        const double b = c / eps, a = -c * lo / eps;
        dA[m1] += a;
        dB[m1] += b;
        dA[m2] += c - a;
        dB[m2] -= b;
      }
      double A = 0.0, B = 0.0;
      for (std::size_t m = 0; m < Nx; ++m) {
        A += dA[m];
        B += dB[m];
        row[m] = A + B * x_grid[m];
      }
    } else {
      for (std::size_t m = 0; m < Nx; ++m) {
        double s = 0.0;
        for (std::size_t p = 0; p < P; ++p) s += ea.u0_eps.c[p] * rho_eps(eps, x_grid[m] - g[p]);
        row[m] = s;
      }
    }
  }
  return out;
}

LRNRModel build_5layer_lrnr(const EntropyApprox& ea, bool audit, FiveLayerInfo* info) {
  const std::size_t K = ea.config.K;
  const double T = ea.config.T, cx = ea.config.c_x, eps = ea.config.eps;
  std::vector<double> xp = ea.u0_eps.x, cp = ea.u0_eps.c, ih = ea.ihat_at_steps, vk = ea.vK_at_steps;
  if (xp.empty()) {
    xp = {0.0};
    cp = {0.0};
    ih = {ea.ext->i_hat(0.0)};
    vk = {ea.layers.back().vtilde(0.0)};
  }
  const std::size_t P = xp.size();

  // slope-change expansion of every eta_k: eta_k(y) = sum_q s_q relu(y - z_q)
  std::vector<std::size_t> sk;
  std::vector<double> sz, sv;
  for (std::size_t k = 1; k < K; ++k) {
    const auto& e = ea.eta[k - 1];
    const auto& kz = e.knots();
    const auto& kv = e.values();
    for (std::size_t q = 0; q < kz.size(); ++q) {
      const double left = q == 0 ? 0.0 : (kv[q] - kv[q - 1]) / (kz[q] - kz[q - 1]);
      const double right = q + 1 == kz.size() ? 0.0 : (kv[q + 1] - kv[q]) / (kz[q + 1] - kz[q]);
      if (right - left != 0.0) {
        sk.push_back(k);
        sz.push_back(kz[q]);
        sv.push_back(right - left);
      }
    }
  }
  if (sk.empty()) {
    // keep the layer shapes non-degenerate
    sk.push_back(1);
    sz.push_back(0.0);
    sv.push_back(0.0);
  }
  const std::size_t S = sk.size();
  if (info) {
    info->num_slope_terms = S;
    info->num_steps = P;
  }
  const std::size_t d1 = 2 + (K - 1), d2 = 2 + P * S, d3 = 2 + P, d4 = 2 * P;
  if (audit && std::max({d1, d2, d3, d4}) > kDenseWidthCap)
    throw CapExceeded("entropy model too wide for dense audit");

  auto ones = [](std::size_t n) { return std::vector<double>(n, 1.0); };
  LRNRModel m;
  m.label = "entropy_5layer";
  m.arch.dims = {1, d1, d2, d3, d4, 1};

  // layer 1: [relu(x), relu(-x), relu(tau_k)]
  LowRankLayer L1;
  L1.rows = d1;
  L1.cols = 1;
  L1.weight_factors.push_back({Rank1Factor{{1.0, -1.0}, {1.0}, FactorKind::Kron, 0, 0, true}, {1.0, 0.0}});
  {
    std::vector<double> shift(K - 1);
    for (std::size_t k = 1; k < K; ++k) shift[k - 1] = -static_cast<double>(K) / T * ea.layers[k - 1].t_k;
    if (K > 1) {
      L1.bias_factors.push_back({Rank1Factor{shift, {1.0}, FactorKind::Kron, 2, 0, false}, {1.0, 0.0}});
      L1.bias_factors.push_back(
          {Rank1Factor{ones(K - 1), {1.0}, FactorKind::Kron, 2, 0, true}, {0.0, static_cast<double>(K) / T}});
    }
  }

  // layer 2: [relu(x), relu(-x), relu(x_p - z_s - c_x relu(tau_{k(s)}))]
  LowRankLayer L2;
  L2.rows = d2;
  L2.cols = d1;
  L2.sparse_weights.push_back({0, 0, {1.0, 0.0}, -1});
  L2.sparse_weights.push_back({1, 1, {1.0, 0.0}, -1});
  for (std::size_t p = 0; p < P; ++p)
    for (std::size_t s = 0; s < S; ++s) L2.sparse_weights.push_back({2 + p * S + s, 2 + sk[s] - 1, {-cx, 0.0}, 0});
  {
    std::vector<double> mz(S);
    for (std::size_t s = 0; s < S; ++s) mz[s] = -sz[s];
    L2.bias_factors.push_back({Rank1Factor{xp, ones(S), FactorKind::KronVec, 2, 0, false}, {1.0, 0.0}});
    L2.bias_factors.push_back({Rank1Factor{ones(P), mz, FactorKind::KronVec, 2, 0, false}, {1.0, 0.0}});
  }

  // layer 3: [relu(x), relu(-x), chieut(x_p, t) + lift_p]
  std::vector<double> lift(P), base(P);
  for (std::size_t p = 0; p < P; ++p) {
    double lb = ih[p] + std::min(0.0, T * vk[p]);
    for (std::size_t s = 0; s < S; ++s)
      if (sv[s] > 0.0) lb -= T * sv[s] * std::max(0.0, xp[p] - sz[s]);
    lift[p] = std::max(0.0, -lb) + 1.0;
    base[p] = ih[p] + lift[p];
  }
  LowRankLayer L3;
  L3.rows = d3;
  L3.cols = d2;
  L3.sparse_weights.push_back({0, 0, {1.0, 0.0}, -1});
  L3.sparse_weights.push_back({1, 1, {1.0, 0.0}, -1});
  {
    Rank1Factor f{ones(P), sv, FactorKind::KronDL, 2, 2, false};
    f.transpose = true;
    L3.weight_factors.push_back({f, {0.0, -1.0}});
  }
  L3.bias_factors.push_back({Rank1Factor{base, {1.0}, FactorKind::Kron, 2, 0, false}, {1.0, 0.0}});
  L3.bias_factors.push_back({Rank1Factor{vk, {1.0}, FactorKind::Kron, 2, 0, false}, {0.0, 1.0}});

  // layer 4: relu(x - chieut(x_p, t) +- eps/2)
  LowRankLayer L4;
  L4.rows = d4;
  L4.cols = d3;
  L4.weight_factors.push_back({Rank1Factor{ones(d4), {1.0, -1.0}, FactorKind::Kron, 0, 0, true}, {1.0, 0.0}});
  L4.weight_factors.push_back(
      {Rank1Factor{std::vector<double>(P, -1.0), {1.0, 1.0}, FactorKind::KronDL, 0, 2, true}, {1.0, 0.0}});
  L4.bias_factors.push_back({Rank1Factor{lift, {1.0, 1.0}, FactorKind::KronVec, 0, 0, false}, {1.0, 0.0}});
  L4.bias_factors.push_back({Rank1Factor{ones(P), {0.5 * eps, -0.5 * eps}, FactorKind::KronVec, 0, 0, false}, {1.0, 0.0}});

  // layer 5: sum_p (c_p / eps) (relu(+) - relu(-))
  LowRankLayer L5;
  L5.rows = 1;
  L5.cols = d4;
  {
    std::vector<double> w(P);
    for (std::size_t p = 0; p < P; ++p) w[p] = cp[p] / eps;
    Rank1Factor f{w, {1.0, -1.0}, FactorKind::KronVec, 0, 0, false};
    f.transpose = true;
    L5.weight_factors.push_back({f, {1.0, 0.0}});
  }

  m.layers = {std::move(L1), std::move(L2), std::move(L3), std::move(L4), std::move(L5)};
  m.validate();
  return m;
}

ErrorBudget error_budget(const PiecewiseConstantFn& u0, const ConvexFlux& flux, double T, std::size_t K) {
  ErrorBudget b;
  const auto& v = u0.values();
  const double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
  b.tv_u0 = total_variation(u0);
  b.fpp_max = flux.max_fpp(lo, hi);
  b.C = T * b.tv_u0 * b.fpp_max;
  const double k = static_cast<double>(K);
  b.char_bound = b.C / k;
  b.chieut_bound = (1.0 + 10.0 * b.C) / k;
  b.entropy_bound = b.tv_u0 * (1.0 + b.tv_u0) * (1.0 + T * b.fpp_max) / k;
  return b;
}

}  // namespace lrnr
