#include "lrnr/lrnr_core.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "lrnr/errors.hpp"

namespace lrnr {

const char* to_string(FactorKind k) {
  switch (k) {
    case FactorKind::Kron:
      return "kron";
    case FactorKind::KronDL:
      return "kron_dL";
    case FactorKind::KronDR:
      return "kron_dR";
    case FactorKind::KronVec:
      return "kron_vec";
  }
  return "kron";
}

FactorKind factor_kind_from_string(const std::string& s) {
  if (s == "kron") return FactorKind::Kron;
  if (s == "kron_dL") return FactorKind::KronDL;
  if (s == "kron_dR") return FactorKind::KronDR;
  if (s == "kron_vec") return FactorKind::KronVec;
  throw ConfigError("unknown factor kind '" + s + "'");
}

namespace {

std::size_t base_rows(const Rank1Factor& f) {
  return f.kind == FactorKind::Kron ? f.uL.size() : f.uL.size() * f.uR.size();
}

std::size_t base_cols(const Rank1Factor& f) {
  switch (f.kind) {
    case FactorKind::Kron:
      return f.uR.size();
    case FactorKind::KronDL:
      return f.uL.size();
    case FactorKind::KronDR:
      return f.uR.size();
    case FactorKind::KronVec:
      return 1;
  }
  return 0;
}

double base_entry(const Rank1Factor& f, std::size_t i, std::size_t j) {
  const std::size_t n = f.uR.size();
  switch (f.kind) {
    case FactorKind::Kron:
      return f.uL[i] * f.uR[j];
    case FactorKind::KronDL:
      return (i / n == j) ? f.uL[j] * f.uR[i % n] : 0.0;
    case FactorKind::KronDR:
      return (i % n == j) ? f.uL[i / n] * f.uR[j] : 0.0;
    case FactorKind::KronVec:
      return f.uL[i / n] * f.uR[i % n];
  }
  return 0.0;
}

}  // namespace

std::size_t Rank1Factor::rows() const { return transpose ? base_cols(*this) : base_rows(*this); }
std::size_t Rank1Factor::cols() const { return transpose ? base_rows(*this) : base_cols(*this); }
double Rank1Factor::entry(std::size_t i, std::size_t j) const {
  return transpose ? base_entry(*this, j, i) : base_entry(*this, i, j);
}

std::size_t ArchSpec::width() const {
  std::size_t w = 0;
  for (auto d : dims) w = std::max(w, d);
  return w;
}

void LowRankLayer::validate() const {
  for (const auto& sf : weight_factors) {
    const auto& f = sf.factor;
    if (f.row_offset + f.rows() > rows || f.col_offset + f.cols() > cols)
      throw ShapeMismatch("weight factor does not fit the layer");
  }
  for (const auto& sf : bias_factors) {
    const auto& f = sf.factor;
    if (f.cols() != 1 || f.row_offset + f.rows() > rows) throw ShapeMismatch("bias factor does not fit the layer");
  }
  for (const auto& e : sparse_weights)
    if (e.row >= rows || e.col >= cols) throw ShapeMismatch("sparse weight outside the layer");
  for (const auto& e : sparse_biases)
    if (e.row >= rows) throw ShapeMismatch("sparse bias outside the layer");
}

void LRNRModel::validate() const {
  if (arch.dims.size() != layers.size() + 1) throw ShapeMismatch("architecture and layer count disagree");
  if (arch.dims.front() != 1 || arch.dims.back() != 1) throw ShapeMismatch("input and output must be scalar");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].cols != arch.dims[l] || layers[l].rows != arch.dims[l + 1])
      throw ShapeMismatch("layer " + std::to_string(l + 1) + " shape disagrees with the architecture");
    layers[l].validate();
  }
}

std::size_t LRNRModel::factor_rank() const {
  std::size_t r = 0;
  for (const auto& l : layers) r = std::max(r, l.weight_factors.size());
  return r;
}

std::pair<DenseMatrix, std::vector<double>> materialize(const LowRankLayer& layer, double t) {
  layer.validate();
  if (layer.rows > kDenseWidthCap || layer.cols > kDenseWidthCap)
    throw CapExceeded("dense materialization is capped at width " + std::to_string(kDenseWidthCap));
  DenseMatrix W{layer.rows, layer.cols, std::vector<double>(layer.rows * layer.cols, 0.0)};
  std::vector<double> B(layer.rows, 0.0);
  for (const auto& sf : layer.weight_factors) {
    const double g = sf.coeff(t);
    const auto& f = sf.factor;
    for (std::size_t i = 0; i < f.rows(); ++i)
      for (std::size_t j = 0; j < f.cols(); ++j) W(f.row_offset + i, f.col_offset + j) += g * f.entry(i, j);
  }
  for (const auto& e : layer.sparse_weights) W(e.row, e.col) += e.coeff(t);
  for (const auto& sf : layer.bias_factors) {
    const double th = sf.coeff(t);
    for (std::size_t i = 0; i < sf.factor.rows(); ++i) B[sf.factor.row_offset + i] += th * sf.factor.entry(i, 0);
  }
  for (const auto& e : layer.sparse_biases) B[e.row] += e.coeff(t);
  return {std::move(W), std::move(B)};
}

namespace {

void apply_factor(const Rank1Factor& f, double g, const std::vector<double>& x, std::vector<double>& y) {
  const std::size_t m = f.uL.size(), n = f.uR.size();
  const std::size_t r = f.row_offset, c = f.col_offset;
  if (!f.transpose) {
    switch (f.kind) {
      case FactorKind::Kron: {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += f.uR[j] * x[c + j];
        s *= g;
        for (std::size_t i = 0; i < m; ++i) y[r + i] += f.uL[i] * s;
        return;
      }
      case FactorKind::KronDL:
        for (std::size_t i = 0; i < m; ++i) {
          const double s = g * f.uL[i] * x[c + i];
          for (std::size_t j = 0; j < n; ++j) y[r + i * n + j] += s * f.uR[j];
        }
        return;
      case FactorKind::KronDR:
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) y[r + i * n + j] += g * f.uL[i] * f.uR[j] * x[c + j];
        return;
      case FactorKind::KronVec: {
        const double s = g * x[c];
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) y[r + i * n + j] += s * f.uL[i] * f.uR[j];
        return;
      }
    }
  }
  switch (f.kind) {
    case FactorKind::Kron: {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += f.uL[i] * x[c + i];
      s *= g;
      for (std::size_t j = 0; j < n; ++j) y[r + j] += f.uR[j] * s;
      return;
    }
    case FactorKind::KronDL:
      for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += f.uR[j] * x[c + i * n + j];
        y[r + i] += g * f.uL[i] * s;
      }
      return;
    case FactorKind::KronDR:
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += f.uL[i] * x[c + i * n + j];
        y[r + j] += g * f.uR[j] * s;
      }
      return;
    case FactorKind::KronVec: {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) s += f.uL[i] * f.uR[j] * x[c + i * n + j];
      y[r] += g * s;
      return;
    }
  }
}

void apply_layer(const LowRankLayer& layer, const std::vector<double>& x, std::vector<double>& y,
                 const LayerCoeffs& c, double t) {
  y.assign(layer.rows, 0.0);
  for (std::size_t k = 0; k < layer.weight_factors.size(); ++k)
    if (c.gamma[k] != 0.0) apply_factor(layer.weight_factors[k].factor, c.gamma[k], x, y);
  for (const auto& e : layer.sparse_weights) y[e.row] += e.coeff(t) * x[e.col];
  for (std::size_t k = 0; k < layer.bias_factors.size(); ++k) {
    const auto& f = layer.bias_factors[k].factor;
    const double th = c.theta[k];
    if (th == 0.0) continue;
    for (std::size_t i = 0; i < f.rows(); ++i) y[f.row_offset + i] += th * f.entry(i, 0);
  }
  for (const auto& e : layer.sparse_biases) y[e.row] += e.coeff(t);
}

double run(const LRNRModel& model, double x, const std::vector<LayerCoeffs>& coeffs, double t) {
  std::vector<double> cur{x}, next;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    apply_layer(model.layers[l], cur, next, coeffs[l], t);
    if (l + 1 < model.layers.size())
      for (auto& v : next) v = std::max(v, 0.0);
    cur.swap(next);
  }
  return cur.at(0);
}

}  // namespace

std::vector<LayerCoeffs> schedule_coeffs(const LRNRModel& model, double t) {
  std::vector<LayerCoeffs> out(model.layers.size());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    for (const auto& sf : model.layers[l].weight_factors) out[l].gamma.push_back(sf.coeff(t));
    for (const auto& sf : model.layers[l].bias_factors) out[l].theta.push_back(sf.coeff(t));
  }
  return out;
}

double forward(const LRNRModel& model, double x, double t) { return run(model, x, schedule_coeffs(model, t), t); }

double forward_with_coeffs(const LRNRModel& model, double x, const std::vector<LayerCoeffs>& coeffs) {
  if (coeffs.size() != model.layers.size()) throw ShapeMismatch("coefficient list does not match the layers");
  for (std::size_t l = 0; l < coeffs.size(); ++l) {
    if (coeffs[l].gamma.size() != model.layers[l].weight_factors.size() ||
        coeffs[l].theta.size() != model.layers[l].bias_factors.size())
      throw ShapeMismatch("coefficient vector length mismatch");
    for (const auto* list : {&model.layers[l].sparse_weights, &model.layers[l].sparse_biases})
      for (const auto& e : *list)
        if (e.coeff.b != 0.0) throw ShapeMismatch("time-dependent sparse entry has no coefficient slot");
  }
  return run(model, x, coeffs, 0.0);
}

double forward_dense(const LRNRModel& model, double x, double t) {
  std::vector<double> cur{x};
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto [W, B] = materialize(model.layers[l], t);
    if (W.cols != cur.size()) throw ShapeMismatch("layer input size mismatch");
    std::vector<double> next(B);
    for (std::size_t i = 0; i < W.rows; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < W.cols; ++j) s += W(i, j) * cur[j];
      next[i] += s;
    }
    if (l + 1 < model.layers.size())
      for (auto& v : next) v = std::max(v, 0.0);
    cur.swap(next);
  }
  return cur.at(0);
}

int layer_rank(const LRNRModel& model, std::size_t layer, const std::vector<double>& t_samples, double rel_tol) {
  if (layer < 1 || layer > model.layers.size()) throw OutOfRange("layer index out of range");
  int best = 0;
  for (double t : t_samples) {
    const auto [W, B] = materialize(model.layers[layer - 1], t);
    (void)B;
    Eigen::MatrixXd M(W.rows, W.cols);
    for (std::size_t i = 0; i < W.rows; ++i)
      for (std::size_t j = 0; j < W.cols; ++j) M(i, j) = W(i, j);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) continue;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > rel_tol * s(0)) ++r;
    best = std::max(best, r);
  }
  return best;
}

int coefficient_rank(const LRNRModel& model, std::size_t layer) {
  if (layer < 1 || layer > model.layers.size()) throw OutOfRange("layer index out of range");
  const auto& L = model.layers[layer - 1];
  const auto [W0, B0] = materialize(L, 0.0);
  const auto [W1, B1] = materialize(L, 1.0);
  const std::size_t n = W0.data.size() + B0.size();
  Eigen::MatrixXd M(n, 2);
  for (std::size_t i = 0; i < W0.data.size(); ++i) {
    M(i, 0) = W0.data[i];
    M(i, 1) = W1.data[i];
  }
  for (std::size_t i = 0; i < B0.size(); ++i) {
    M(W0.data.size() + i, 0) = B0[i];
    M(W0.data.size() + i, 1) = B1[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) return 0;
  return s(1) > 1e-12 * s(0) ? 2 : 1;
}

double affinity_residual(const LRNRModel& model, const std::vector<double>& t_samples) {
  double worst = 0.0;
  for (const auto& L : model.layers) {
    const auto [W0, B0] = materialize(L, 0.0);
    const auto [W1, B1] = materialize(L, 1.0);
    for (double t : t_samples) {
      const auto [Wt, Bt] = materialize(L, t);
      for (std::size_t i = 0; i < Wt.data.size(); ++i)
        worst = std::max(worst, std::abs(Wt.data[i] - W0.data[i] - t * (W1.data[i] - W0.data[i])));
      for (std::size_t i = 0; i < Bt.size(); ++i)
        worst = std::max(worst, std::abs(Bt[i] - B0[i] - t * (B1[i] - B0[i])));
    }
  }
  return worst;
}

std::size_t dof_count(const LRNRModel& model) {
  auto stored = [](double v) { return v != 0.0 && v != 1.0 && v != -1.0; };
  std::size_t n = 0;
  std::set<long> tags;
  for (const auto& L : model.layers) {
    for (const auto* list : {&L.weight_factors, &L.bias_factors}) {
      for (const auto& sf : *list) {
        if (!sf.factor.structural) {
          for (double v : sf.factor.uL) n += stored(v);
          for (double v : sf.factor.uR) n += stored(v);
        }
        n += stored(sf.coeff.a) + stored(sf.coeff.b);
      }
    }
    for (const auto* list : {&L.sparse_weights, &L.sparse_biases}) {
      for (const auto& e : *list) {
        if (e.tag < 0 || !tags.insert(e.tag).second) continue;
        n += stored(e.coeff.a) + stored(e.coeff.b);
      }
    }
  }
  return n;
}

namespace {

nlohmann::json factor_json(const ScheduledFactor& sf) {
  return nlohmann::json{{"uL", sf.factor.uL},
                        {"uR", sf.factor.uR},
                        {"kind", to_string(sf.factor.kind)},
                        {"row_offset", sf.factor.row_offset},
                        {"col_offset", sf.factor.col_offset},
                        {"structural", sf.factor.structural},
                        {"transpose", sf.factor.transpose},
                        {"a", sf.coeff.a},
                        {"b", sf.coeff.b}};
}

ScheduledFactor factor_from(const nlohmann::json& j) {
  ScheduledFactor sf;
  sf.factor.uL = j.at("uL").get<std::vector<double>>();
  sf.factor.uR = j.at("uR").get<std::vector<double>>();
  sf.factor.kind = factor_kind_from_string(j.at("kind").get<std::string>());
  sf.factor.row_offset = j.value("row_offset", std::size_t{0});
  sf.factor.col_offset = j.value("col_offset", std::size_t{0});
  sf.factor.structural = j.value("structural", false);
  sf.factor.transpose = j.value("transpose", false);
  sf.coeff.a = j.at("a").get<double>();
  sf.coeff.b = j.at("b").get<double>();
  return sf;
}

nlohmann::json sparse_json(const std::vector<SparseEntry>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& e : v) a.push_back({e.row, e.col, e.coeff.a, e.coeff.b, e.tag});
  return a;
}

std::vector<SparseEntry> sparse_from(const nlohmann::json& j) {
  std::vector<SparseEntry> out;
  for (const auto& e : j) {
    out.push_back(SparseEntry{e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(),
                              CoeffSchedule{e.at(2).get<double>(), e.at(3).get<double>()}, e.at(4).get<long>()});
  }
  return out;
}

}  // namespace

void to_json(nlohmann::json& j, const LRNRModel& model) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& L : model.layers) {
    nlohmann::json f = nlohmann::json::array(), b = nlohmann::json::array();
    for (const auto& sf : L.weight_factors) f.push_back(factor_json(sf));
    for (const auto& sf : L.bias_factors) b.push_back(factor_json(sf));
    layers.push_back({{"rows", L.rows},
                      {"cols", L.cols},
                      {"factors", f},
                      {"bias_factors", b},
                      {"sparse", sparse_json(L.sparse_weights)},
                      {"sparse_bias", sparse_json(L.sparse_biases)}});
  }
  j = nlohmann::json{{"label", model.label}, {"arch", model.arch.dims}, {"layers", layers}};
}

LRNRModel model_from_json(const nlohmann::json& j) {
  LRNRModel m;
  try {
    m.label = j.value("label", std::string{});
    m.arch.dims = j.at("arch").get<std::vector<std::size_t>>();
    for (const auto& lj : j.at("layers")) {
      LowRankLayer L;
      L.rows = lj.at("rows").get<std::size_t>();
      L.cols = lj.at("cols").get<std::size_t>();
      for (const auto& f : lj.at("factors")) L.weight_factors.push_back(factor_from(f));
      for (const auto& f : lj.at("bias_factors")) L.bias_factors.push_back(factor_from(f));
      L.sparse_weights = sparse_from(lj.at("sparse"));
      L.sparse_biases = sparse_from(lj.value("sparse_bias", nlohmann::json::array()));
      m.layers.push_back(std::move(L));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model JSON: ") + e.what());
  }
  m.validate();
  return m;
}

}  // namespace lrnr
