#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lrnr/flux.hpp"
#include "lrnr/lrnr_core.hpp"
#include "lrnr/oracle.hpp"
#include "lrnr/pwlin.hpp"

namespace lrnr {

// Family (sum beta_i psi_i) composed with the left inverse of (sum alpha_i phi_i).
struct TransportedSubspace {
  std::vector<PiecewiseLinearFn> phi;
  std::vector<StepSum> psi;  // hard step sums (eps ignored), base 0
  std::vector<Interval> coeff_A;
  std::vector<Interval> coeff_B;
};

struct AdmissibilityReport {
  bool ok = false;
  double c_A = 0.0;
  double C_A = 0.0;
  std::string diagnostics;
};

AdmissibilityReport check_admissible(const std::vector<PiecewiseLinearFn>& phi, const std::vector<Interval>& coeff_A,
                                     const Interval& dom);

// x -> sum_i c_i rho_eps(x - g_eps(x_i)); returned as a relocated step sum.
StepSum ibtrick_compose(const StepSum& f_eps, const PiecewiseLinearFn& g_eps);

// Right-hand side of the composition error bound for step sums f_eps with disjoint ramps.
double compose_error_bound(double tv_f, double gprime_inf, double f_l1_err, double rho_l1, double g_err_on_grid);

struct TwoLayerBuild {
  LRNRModel model;
  std::vector<double> grid;  // trick grid x_k
  double eps = 0.0;
  std::size_t r_phi = 0;
  std::size_t r_psi = 0;
  // coefficient map (alpha, beta) -> per-layer term coefficients
  std::vector<LayerCoeffs> mu(const std::vector<double>& alpha, const std::vector<double>& beta) const;
};

TwoLayerBuild build_2layer(const TransportedSubspace& ts, double eps);

struct ClassicalBuild {
  TwoLayerBuild two_layer;
  StepSum u0_eps;            // steps on the uniform grid, eps applied
  std::vector<double> grid;  // x_k
  std::vector<double> fprime_u0;  // F'(u0(x_k))
  double T = 0.0;
  std::size_t K = 0;
  FluxPtr flux;

  const LRNRModel& model() const { return two_layer.model; }
  // the model output at time t as an exact P1 function of x
  PiecewiseLinearFn output_p1(double t, const Interval& dom) const;
};

ClassicalBuild build_classical_lrnr(const std::function<double(double)>& u0, FluxPtr flux, double T, std::size_t K,
                                    double eps = 0.0);

}  // namespace lrnr
