#include "lrnr/build_classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "lrnr/errors.hpp"

namespace lrnr {

AdmissibilityReport check_admissible(const std::vector<PiecewiseLinearFn>& phi, const std::vector<Interval>& coeff_A,
                                     const Interval& dom) {
  AdmissibilityReport rep;
  if (phi.empty() || phi.size() != coeff_A.size()) {
    rep.diagnostics = "phi and coefficient box sizes differ";
    return rep;
  }
  std::vector<double> knots;
  for (const auto& p : phi) knots.insert(knots.end(), p.knots().begin(), p.knots().end());
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  const std::size_t r = phi.size();
  double cmin = std::numeric_limits<double>::infinity(), cmax = -cmin;
  bool covers = true;
  std::ostringstream diag;
  for (std::size_t mask = 0; mask < (std::size_t{1} << r); ++mask) {
    std::vector<double> a(r);
    for (std::size_t i = 0; i < r; ++i) a[i] = (mask >> i) & 1 ? coeff_A[i].hi : coeff_A[i].lo;
    auto g = [&](double x) {
      double s = 0.0;
      for (std::size_t i = 0; i < r; ++i) s += a[i] * phi[i](x);
      return s;
    };
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
      const double s = (g(knots[k + 1]) - g(knots[k])) / (knots[k + 1] - knots[k]);
      if (s < cmin) {
        cmin = s;
        if (s <= 0.0) diag << "non-increasing piece at corner " << mask << " on [" << knots[k] << "," << knots[k + 1] << "]; ";
      }
      cmax = std::max(cmax, s);
    }
    if (g(knots.front()) > dom.lo || g(knots.back()) < dom.hi) {
      covers = false;
      diag << "range does not cover the domain at corner " << mask << "; ";
    }
  }
  rep.c_A = cmin;
  rep.C_A = cmax;
  rep.ok = covers && cmin > 0.0;
  rep.diagnostics = diag.str();
  return rep;
}

StepSum ibtrick_compose(const StepSum& f_eps, const PiecewiseLinearFn& g_eps) {
  StepSum out = f_eps;
  for (auto& x : out.x) x = g_eps(x);
  return out;
}

double compose_error_bound(double tv_f, double gprime_inf, double f_l1_err, double rho_l1, double g_err_on_grid) {
  return gprime_inf * f_l1_err + tv_f * ((1.0 + gprime_inf) * rho_l1 + g_err_on_grid);
}

std::vector<LayerCoeffs> TwoLayerBuild::mu(const std::vector<double>& alpha, const std::vector<double>& beta) const {
  if (alpha.size() != r_phi || beta.size() != r_psi) throw ShapeMismatch("coefficient vector sizes");
  std::vector<LayerCoeffs> c(2);
  c[0].gamma = {1.0};
  c[0].theta = alpha;
  c[0].theta.push_back(1.0);
  c[1].gamma = beta;
  return c;
}

TwoLayerBuild build_2layer(const TransportedSubspace& ts, double eps) {
  if (!(eps > 0.0)) throw InvalidEps("eps must be positive");
  if (ts.phi.empty() || ts.psi.empty()) throw NotAdmissible("empty transported subspace");
  if (ts.coeff_A.size() != ts.phi.size() || ts.coeff_B.size() != ts.psi.size())
    throw NotAdmissible("coefficient boxes do not match the bases");
  for (const auto& p : ts.psi)
    if (p.base != 0.0 || p.x.size() != p.c.size()) throw NotAdmissible("psi must be a step sum without offset");

  TwoLayerBuild out;
  out.eps = eps;
  out.r_phi = ts.phi.size();
  out.r_psi = ts.psi.size();
  for (const auto& p : ts.psi) out.grid.insert(out.grid.end(), p.x.begin(), p.x.end());
  std::sort(out.grid.begin(), out.grid.end());
  out.grid.erase(std::unique(out.grid.begin(), out.grid.end()), out.grid.end());
  const std::size_t N = out.grid.size();
  std::map<double, std::size_t> idx;
  for (std::size_t k = 0; k < N; ++k) idx[out.grid[k]] = k;

  LRNRModel& m = out.model;
  m.label = "two_layer";
  m.arch.dims = {1, 2 * N, 1};

  LowRankLayer L1;
  L1.rows = 2 * N;
  L1.cols = 1;
  L1.weight_factors.push_back({Rank1Factor{std::vector<double>(2 * N, 1.0), {1.0}, FactorKind::Kron, 0, 0, true}, {1.0, 0.0}});
  for (const auto& phi : ts.phi) {
    std::vector<double> v(2 * N);
    for (std::size_t k = 0; k < N; ++k) v[2 * k] = v[2 * k + 1] = -phi(out.grid[k]);
    L1.bias_factors.push_back({Rank1Factor{v, {1.0}, FactorKind::Kron, 0, 0, false}, {0.0, 0.0}});
  }
  std::vector<double> pm(2 * N);
  for (std::size_t k = 0; k < N; ++k) {
    pm[2 * k] = 0.5 * eps;
    pm[2 * k + 1] = -0.5 * eps;
  }
  L1.bias_factors.push_back({Rank1Factor{pm, {1.0}, FactorKind::Kron, 0, 0, true}, {1.0, 0.0}});

  LowRankLayer L2;
  L2.rows = 1;
  L2.cols = 2 * N;
  for (const auto& psi : ts.psi) {
    std::vector<double> w(2 * N, 0.0);
    for (std::size_t s = 0; s < psi.x.size(); ++s) {
      const std::size_t k = idx.at(psi.x[s]);
      w[2 * k] += psi.c[s] / eps;
      w[2 * k + 1] -= psi.c[s] / eps;
    }
    L2.weight_factors.push_back({Rank1Factor{{1.0}, w, FactorKind::Kron, 0, 0, false}, {0.0, 0.0}});
  }
  m.layers = {std::move(L1), std::move(L2)};
  m.validate();
  return out;
}

PiecewiseLinearFn ClassicalBuild::output_p1(double t, const Interval& dom) const {
  StepSum s = u0_eps;
  for (std::size_t k = 0; k < s.x.size(); ++k) s.x[k] = grid[k] + t * fprime_u0[k];
  return s.to_p1(dom);
}

ClassicalBuild build_classical_lrnr(const std::function<double(double)>& u0, FluxPtr flux, double T, std::size_t K,
                                    double eps) {
  if (K < 2) throw OutOfRange("K must be at least 2");
  if (!(T > 0.0)) throw OutOfRange("T must be positive");
  ClassicalBuild b;
  b.T = T;
  b.K = K;
  b.flux = flux;
  const double h = 1.0 / static_cast<double>(K);
  if (eps <= 0.0) eps = 0.5 * h;
  // piecewise constant fit at cell midpoints, written as steps on the cell edges
  std::vector<double> mid(K);
  for (std::size_t k = 0; k < K; ++k) mid[k] = u0((k + 0.5) * h);
  b.u0_eps.eps = eps;
  for (std::size_t k = 0; k <= K; ++k) {
    const double left = k == 0 ? 0.0 : mid[k - 1];
    const double right = k == K ? 0.0 : mid[k];
    b.grid.push_back(k * h);
    b.u0_eps.x.push_back(k * h);
    b.u0_eps.c.push_back(right - left);
    b.fprime_u0.push_back(flux->fp(u0(k * h)));
  }
  // characteristics must stay ordered on the trick grid for t in [0, T]
  for (std::size_t k = 0; k + 1 < b.grid.size(); ++k) {
    const double d = (b.grid[k + 1] + T * b.fprime_u0[k + 1]) - (b.grid[k] + T * b.fprime_u0[k]);
    if (!(d > 0.0)) throw ShockBeforeHorizon("characteristics cross before the horizon");
  }
  TransportedSubspace ts;
  ts.phi = {PiecewiseLinearFn::identity(Interval(0.0, 1.0)), PiecewiseLinearFn(b.grid, b.fprime_u0)};
  StepSum psi = b.u0_eps;
  psi.eps = 0.0;
  ts.psi = {psi};
  ts.coeff_A = {Interval(1.0 - 1e-12, 1.0 + 1e-12), Interval(0.0, T)};
  ts.coeff_B = {Interval(1.0 - 1e-12, 1.0 + 1e-12)};
  b.two_layer = build_2layer(ts, eps);
  // affine schedules: alpha = (1, t), beta = 1
  auto& L1 = b.two_layer.model.layers[0];
  L1.bias_factors[0].coeff = {1.0, 0.0};
  L1.bias_factors[1].coeff = {0.0, 1.0};
  b.two_layer.model.layers[1].weight_factors[0].coeff = {1.0, 0.0};
  b.two_layer.model.label = "classical";
  return b;
}

}  // namespace lrnr
