#pragma once

#include <cstddef>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

namespace lrnr {

enum class FactorKind { Kron, KronDL, KronDR, KronVec };

const char* to_string(FactorKind k);
FactorKind factor_kind_from_string(const std::string& s);

// Coefficient a + b t.
struct CoeffSchedule {
  double a = 0.0;
  double b = 0.0;
  double operator()(double t) const { return a + b * t; }
};

// Rank-1 building block placed as a block at (row_offset, col_offset).
//   Kron   : uL uR^T                  (|uL| x |uR|)
//   KronDL : diag(uL) (x) uR          (|uL||uR| x |uL|)
//   KronDR : uL (x) diag(uR)          (|uL||uR| x |uR|)
//   KronVec: uL (x) uR as a column    (|uL||uR| x 1)
// transpose swaps the block's rows and columns. Bias factors must have one column.
struct Rank1Factor {
  std::vector<double> uL;
  std::vector<double> uR;
  FactorKind kind = FactorKind::Kron;
  std::size_t row_offset = 0;
  std::size_t col_offset = 0;
  bool structural = false;  // entries are fixed constants, excluded from dof
  bool transpose = false;

  std::size_t rows() const;
  std::size_t cols() const;
  double entry(std::size_t i, std::size_t j) const;  // block-local
};

struct ScheduledFactor {
  Rank1Factor factor;
  CoeffSchedule coeff;
};

// Explicit entry with its own schedule. Entries sharing a non-negative tag share
// one stored parameter; tag < 0 marks a structural constant.
struct SparseEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  CoeffSchedule coeff;
  long tag = -1;
};

struct DenseMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;  // row-major
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

struct LowRankLayer {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<ScheduledFactor> weight_factors;
  std::vector<ScheduledFactor> bias_factors;
  std::vector<SparseEntry> sparse_weights;
  std::vector<SparseEntry> sparse_biases;  // col ignored

  void validate() const;
};

struct ArchSpec {
  std::vector<std::size_t> dims;
  std::size_t depth() const { return dims.empty() ? 0 : dims.size() - 1; }
  std::size_t width() const;
};

struct LRNRModel {
  ArchSpec arch;
  std::vector<LowRankLayer> layers;
  std::string label;

  void validate() const;
  std::size_t depth() const { return layers.size(); }
  // number of scheduled rank-1 weight factors, maximized over layers
  std::size_t factor_rank() const;
};

constexpr std::size_t kDenseWidthCap = 4096;

std::pair<DenseMatrix, std::vector<double>> materialize(const LowRankLayer& layer, double t);

// Per-term coefficient vectors for general (non-affine) parameter maps.
struct LayerCoeffs {
  std::vector<double> gamma;  // one per weight factor
  std::vector<double> theta;  // one per bias factor
};

double forward(const LRNRModel& model, double x, double t);  // structured path
double forward_dense(const LRNRModel& model, double x, double t);
// Sparse entries are part of the base network and must be constant in t; throws ShapeMismatch otherwise.
double forward_with_coeffs(const LRNRModel& model, double x, const std::vector<LayerCoeffs>& coeffs);
std::vector<LayerCoeffs> schedule_coeffs(const LRNRModel& model, double t);

// SVD rank with relative threshold, maximized over t samples (layer index 1-based).
int layer_rank(const LRNRModel& model, std::size_t layer, const std::vector<double>& t_samples, double rel_tol = 1e-9);
// dimension of span{W(t), B(t)} over t: the number of independent coefficient matrices
int coefficient_rank(const LRNRModel& model, std::size_t layer);
// max |W(t) - W(0) - t (W(1) - W(0))| over weights and biases
double affinity_residual(const LRNRModel& model, const std::vector<double>& t_samples);
std::size_t dof_count(const LRNRModel& model);

void to_json(nlohmann::json& j, const LRNRModel& model);
LRNRModel model_from_json(const nlohmann::json& j);

}  // namespace lrnr
