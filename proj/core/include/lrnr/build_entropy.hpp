#pragma once

#include <memory>
#include <vector>

#include "lrnr/characteristics.hpp"
#include "lrnr/lrnr_core.hpp"
#include "lrnr/oracle.hpp"
#include "lrnr/pwlin.hpp"

namespace lrnr {

struct EntropyBuildConfig {
  std::size_t K = 16;
  double T = 0.0;     // 0: take the horizon from the shock table
  double c_x = 0.0;   // 0: the extended domain length
  double eps = 0.0;   // 0: 1/K
  double eps0 = 0.0;  // derived: T/K
  double eps1 = 0.0;  // derived: half the smallest gap of the step grid (reported only)
  int table_grid = 0; // 0: max(256, 2K)
};

struct TimeLayer {
  std::size_t k = 0;
  double t_k = 0.0;
  PiecewiseLinearFn jieut_k;  // Xhat(z_i, t_k) on the spatial grid
  PiecewiseLinearFn vtilde;   // time slope of the layer approximation
};

struct EntropyApprox {
  EntropyBuildConfig config;
  std::shared_ptr<const ExtendedInitialData> ext;
  ShockTimeTable table;
  std::vector<double> z_grid;
  std::vector<TimeLayer> layers;        // k = 1..K
  std::vector<PiecewiseLinearFn> eta;   // eta[k-1] for k = 1..K-1, pruned knots
  StepSum u0_eps;                       // steps x_p, heights c_p on the extended domain
  std::vector<double> ihat_at_steps;    // Ihat(x_p)
  std::vector<double> vK_at_steps;      // vtilde_K(x_p)

  std::size_t K() const { return config.K; }
  double T() const { return config.T; }
};

EntropyApprox build_entropy(std::shared_ptr<const ExtendedInitialData> ext, ShockTimeTable table,
                            EntropyBuildConfig config);
EntropyApprox build_entropy(const PiecewiseConstantFn& u0, FluxPtr flux, double T, std::size_t K);

double chieut_eval(const EntropyApprox& ea, double z, double t);
// chieut at the step locations x_p
std::vector<double> chieut_at_steps(const EntropyApprox& ea, double t);
double hbar_eval(const EntropyApprox& ea, double x, double t);
PiecewiseLinearFn hbar_profile(const EntropyApprox& ea, double t);
// row-major values[it * x_grid.size() + ix]
std::vector<double> march_eval(const EntropyApprox& ea, const std::vector<double>& x_grid,
                               const std::vector<double>& t_grid);

struct FiveLayerInfo {
  std::size_t num_slope_terms = 0;  // S
  std::size_t num_steps = 0;        // P
};

LRNRModel build_5layer_lrnr(const EntropyApprox& ea, bool audit = false, FiveLayerInfo* info = nullptr);

struct ErrorBudget {
  double tv_u0 = 0.0;
  double fpp_max = 0.0;
  double C = 0.0;              // T * TV(u0) * max F''
  double char_bound = 0.0;     // characteristics vs time layer: C / K
  double chieut_bound = 0.0;   // (1 + 10 C) / K
  double entropy_bound = 0.0;  // TV (1 + TV)(1 + T max F'') / K
};

ErrorBudget error_budget(const PiecewiseConstantFn& u0, const ConvexFlux& flux, double T, std::size_t K);

}  // namespace lrnr
