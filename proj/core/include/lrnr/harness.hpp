#pragma once

#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "lrnr/build_classical.hpp"
#include "lrnr/build_entropy.hpp"
#include "lrnr/lrnr_core.hpp"

namespace lrnr {

struct Tolerances {
  double oracle_l1 = 1e-6;       // entropy_eval vs oracle
  double relief_l1 = 1e-5;       // relief_eval vs entropy_eval
  double slope_max = -0.8;       // fitted log-log slope must not exceed this
  double budget_factor = 10.0;   // measured error <= factor * predicted
  int rank_max = 2;              // entropy model per-layer rank
  int classical_rank_max = 3;
  double affinity = 1e-12;
  double equivalence = 1e-9;     // |forward - hbar|
  double march_equal = 1e-12;
  double timing_lo = 3.0;
  double timing_hi = 5.0;
};

// "entropy" for piecewise constant data, "classical" for smooth pre-shock data.
struct ExperimentConfig {
  std::string preset;  // empty when u0 is given explicitly
  std::string flux = "burgers";
  std::vector<double> flux_coeffs;
  std::vector<double> breakpoints;
  std::vector<double> values;
  std::string builder = "entropy";
  double T = 0.25;
  std::vector<std::size_t> K{16, 32, 64, 128, 256};
  std::size_t lrnr_K_max = 64;  // LRNR forward L1 is measured only up to this K
  int audit_samples = 200;
  Tolerances tol;
  std::string out_dir = "out";
  std::uint64_t seed = 12345;

  void validate() const;
  FluxPtr make_flux_ptr() const;
  PiecewiseConstantFn u0_pc() const;                 // entropy builder data
  std::function<double(double)> u0_smooth() const;   // classical builder data
};

std::vector<std::string> preset_names();
ExperimentConfig preset_config(const std::string& name);

void to_json(nlohmann::json& j, const ExperimentConfig& c);
// keys absent from j keep the values already in c
void merge_config(ExperimentConfig& c, const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
// LRNR_OUT_DIR overrides the configured output directory
void apply_env(ExperimentConfig& c);

// slope of log(err) against log(K); NaN when undefined (fewer than 2 usable points)
double fit_loglog_slope(const std::vector<double>& K, const std::vector<double>& err, double floor = 1e-12);

std::vector<double> sup_t_samples(double T, std::size_t K);

struct ConvergenceRow {
  std::size_t K = 0;
  double l1_hbar = 0.0;     // sup over t samples
  double l1_lrnr = -1.0;    // negative when not measured
  double table_seconds = 0.0;
  double build_seconds = 0.0;
  double eval_seconds = 0.0;
  double predicted = -1.0;  // negative when no budget applies
  bool within_budget = true;
  std::string error;        // non-empty when this K failed
};

struct ConvergenceReport {
  std::string preset;
  std::string builder;
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;  // NaN when undefined
  bool slope_ok = false;
  bool budget_ok = false;
  bool pass = false;
};

ConvergenceReport run_convergence(const ExperimentConfig& cfg);

struct LayerAudit {
  std::size_t index = 0;
  std::size_t rows = 0, cols = 0;
  int svd_rank = 0;
  int coefficient_rank = 0;
  std::size_t factor_count = 0;
};

struct AuditReport {
  std::string label;
  std::size_t K = 0;
  std::size_t depth = 0;
  std::vector<LayerAudit> layers;
  double affinity_residual = 0.0;
  std::size_t dof = 0;
  double dof_per_K = 0.0;
  double max_deviation = 0.0;  // |forward - reference| over random samples
  std::size_t expected_depth = 0;
  int rank_max = 0;
  bool depth_ok = false, rank_ok = false, affine_ok = false, equiv_ok = false;
  bool pass = false;
};

// Audit any model against a reference function on [0,1] x [0,T].
AuditReport audit_model(const LRNRModel& model, const std::function<double(double, double)>& reference, double T,
                        std::size_t expected_depth, int rank_max, const Tolerances& tol, int samples,
                        std::uint64_t seed);
std::vector<AuditReport> run_audit(const ExperimentConfig& cfg);

struct TimingRow {
  std::size_t K = 0;
  double seconds = 0.0;  // one march over a K x K grid, best of repeats
  double ns_per_point = 0.0;
  double ratio = 0.0;    // seconds / seconds of the previous K
};

struct TimingReport {
  std::vector<TimingRow> rows;
  double max_march_deviation = 0.0;
  bool ratio_ok = false;
  bool equal_ok = false;
  bool pass = false;
};

TimingReport run_timing(const ExperimentConfig& cfg);

struct ConsistencyReport {
  std::string preset;
  std::vector<double> t_samples;
  double max_entropy_l1 = 0.0;  // entropy_eval vs oracle
  double max_relief_l1 = 0.0;   // relief_eval vs entropy_eval
  bool pass = false;
};

ConsistencyReport run_consistency(const ExperimentConfig& cfg, int n_t = 8, int n_x = 512);

// Writes <out_dir>/<what>_<preset>.csv (or .json for weights); returns the path.
// what: solution, characteristics, lambda, weights
std::string export_data(const ExperimentConfig& cfg, const std::string& what, std::size_t K);

void to_json(nlohmann::json& j, const ConvergenceRow& r);
void to_json(nlohmann::json& j, const ConvergenceReport& r);
void to_json(nlohmann::json& j, const LayerAudit& r);
void to_json(nlohmann::json& j, const AuditReport& r);
void to_json(nlohmann::json& j, const TimingRow& r);
void to_json(nlohmann::json& j, const TimingReport& r);
void to_json(nlohmann::json& j, const ConsistencyReport& r);

}  // namespace lrnr
