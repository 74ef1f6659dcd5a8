#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <random>

#include "lrnr/build_entropy.hpp"
#include "lrnr/errors.hpp"
#include "lrnr/lrnr_core.hpp"

using namespace lrnr;

namespace {

LRNRModel rho_gadget(double eps, double c) {
  LRNRModel m;
  m.label = "gadget";
  m.arch.dims = {1, 2, 1};
  LowRankLayer L1;
  L1.rows = 2;
  L1.cols = 1;
  L1.weight_factors.push_back({Rank1Factor{{1.0, 1.0}, {1.0}, FactorKind::Kron, 0, 0, true}, {1.0, 0.0}});
  L1.bias_factors.push_back({Rank1Factor{{0.5 * eps, -0.5 * eps}, {1.0}, FactorKind::Kron, 0, 0, true}, {1.0, 0.0}});
  L1.bias_factors.push_back({Rank1Factor{{-c, -c}, {1.0}, FactorKind::Kron, 0, 0, false}, {1.0, 0.0}});
  LowRankLayer L2;
  L2.rows = 1;
  L2.cols = 2;
  L2.weight_factors.push_back({Rank1Factor{{1.0}, {1.0 / eps, -1.0 / eps}, FactorKind::Kron, 0, 0, false}, {1.0, 0.0}});
  m.layers = {L1, L2};
  m.validate();
  return m;
}

LRNRModel random_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto vec = [&](std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
  };
  LRNRModel m;
  m.arch.dims = {1, 6, 6, 1};
  LowRankLayer L1;
  L1.rows = 6;
  L1.cols = 1;
  L1.weight_factors.push_back({Rank1Factor{vec(6), {1.0}, FactorKind::Kron, 0, 0, false}, {u(rng), u(rng)}});
  L1.bias_factors.push_back({Rank1Factor{vec(3), vec(2), FactorKind::KronVec, 0, 0, false}, {u(rng), u(rng)}});
  LowRankLayer L2;
  L2.rows = 6;
  L2.cols = 6;
  L2.weight_factors.push_back({Rank1Factor{vec(6), vec(6), FactorKind::Kron, 0, 0, false}, {u(rng), u(rng)}});
  L2.weight_factors.push_back({Rank1Factor{vec(3), vec(2), FactorKind::KronDL, 0, 1, false}, {u(rng), u(rng)}});
  Rank1Factor tr{vec(2), vec(3), FactorKind::KronDR, 0, 0, false};
  tr.transpose = true;
  L2.weight_factors.push_back({tr, {u(rng), u(rng)}});
  L2.sparse_weights.push_back({4, 5, {u(rng), u(rng)}, 3});
  L2.sparse_biases.push_back({2, 0, {u(rng), u(rng)}, -1});
  LowRankLayer L3;
  L3.rows = 1;
  L3.cols = 6;
  Rank1Factor out{vec(3), vec(2), FactorKind::KronVec, 0, 0, false};
  out.transpose = true;
  L3.weight_factors.push_back({out, {u(rng), u(rng)}});
  L3.bias_factors.push_back({Rank1Factor{{1.0}, {1.0}, FactorKind::Kron, 0, 0, false}, {u(rng), u(rng)}});
  m.layers = {L1, L2, L3};
  m.validate();
  return m;
}

}  // namespace

TEST(FactorKinds, KronDRArithmetic) {
  LowRankLayer L;
  L.rows = 4;
  L.cols = 2;
  L.weight_factors.push_back({Rank1Factor{{1.0, 2.0}, {3.0, 4.0}, FactorKind::KronDR, 0, 0, false}, {1.0, 0.0}});
  const auto [W, B] = materialize(L, 0.3);
  const double expect[4][2] = {{3, 0}, {0, 4}, {6, 0}, {0, 8}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(W(i, j), expect[i][j]);
  for (double b : B) EXPECT_DOUBLE_EQ(b, 0.0);
}

TEST(FactorKinds, KronDLAndVecShapes) {
  Rank1Factor dl{{1.0, 2.0}, {3.0, 4.0, 5.0}, FactorKind::KronDL};
  EXPECT_EQ(dl.rows(), 6u);
  EXPECT_EQ(dl.cols(), 2u);
  EXPECT_DOUBLE_EQ(dl.entry(4, 1), 8.0);
  EXPECT_DOUBLE_EQ(dl.entry(4, 0), 0.0);
  Rank1Factor v{{1.0, 2.0}, {3.0, 4.0}, FactorKind::KronVec};
  EXPECT_EQ(v.rows(), 4u);
  EXPECT_EQ(v.cols(), 1u);
  EXPECT_DOUBLE_EQ(v.entry(3, 0), 8.0);
  v.transpose = true;
  EXPECT_EQ(v.rows(), 1u);
  EXPECT_DOUBLE_EQ(v.entry(0, 2), 6.0);
  for (auto k : {FactorKind::Kron, FactorKind::KronDL, FactorKind::KronDR, FactorKind::KronVec})
    EXPECT_EQ(factor_kind_from_string(to_string(k)), k);
}

TEST(Schedule, ZeroAtTimeZeroAndAffine) {
  LowRankLayer L;
  L.rows = 2;
  L.cols = 2;
  L.weight_factors.push_back({Rank1Factor{{1.0, 2.0}, {3.0, 4.0}, FactorKind::Kron, 0, 0, false}, {0.0, 1.0}});
  const auto W0 = materialize(L, 0.0).first;
  for (double w : W0.data) EXPECT_DOUBLE_EQ(w, 0.0);
  std::mt19937_64 rng(5);
  const auto m = random_model(rng);
  for (const auto& layer : m.layers) {
    const auto a = materialize(layer, 0.0), b = materialize(layer, 1.0), h = materialize(layer, 0.5);
    for (std::size_t i = 0; i < h.first.data.size(); ++i)
      EXPECT_NEAR(h.first.data[i], 0.5 * (a.first.data[i] + b.first.data[i]), 1e-15);
  }
  EXPECT_LE(affinity_residual(m, {0.0, 0.3, 0.7, 1.0, 2.5}), 1e-14);
}

TEST(Forward, IdentityModel) {
  LRNRModel m;
  m.arch.dims = {1, 1};
  LowRankLayer L;
  L.rows = 1;
  L.cols = 1;
  L.weight_factors.push_back({Rank1Factor{{1.0}, {1.0}}, {1.0, 0.0}});
  m.layers = {L};
  for (double x : {-0.3, 0.0, 0.8}) EXPECT_DOUBLE_EQ(forward(m, x, 0.2), x);
}

TEST(Forward, RhoGadget) {
  const double eps = 0.1, c = 0.4;
  const auto m = rho_gadget(eps, c);
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    EXPECT_NEAR(forward(m, x, 0.0), rho_eps(eps, x - c), 1e-14);
  }
  // -c twice in the bias, +-1/eps in the output row
  EXPECT_EQ(dof_count(m), 4u);
}

TEST(Forward, StructuredEqualsDense) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_model(rng);
    for (int s = 0; s < 10; ++s) {
      const double x = u(rng), t = u(rng);
      EXPECT_NEAR(forward(m, x, t), forward_dense(m, x, t), 1e-12);
    }
  }
}

TEST(Forward, ScheduleCoefficientsPath) {
  std::mt19937_64 rng(21);
  auto m = random_model(rng);
  EXPECT_THROW(forward_with_coeffs(m, 0.1, schedule_coeffs(m, 0.2)), ShapeMismatch);
  for (auto& L : m.layers) {
    for (auto& e : L.sparse_weights) e.coeff.b = 0.0;
    for (auto& e : L.sparse_biases) e.coeff.b = 0.0;
  }
  for (double t : {0.0, 0.4, 1.3})
    for (double x : {-0.5, 0.25})
      EXPECT_NEAR(forward_with_coeffs(m, x, schedule_coeffs(m, t)), forward(m, x, t), 1e-12);
}

TEST(Forward, EntropyModelEqualsDensePath) {
  const auto ea = build_entropy(PiecewiseConstantFn({0.0, 0.2, 0.4}, {0.0, 2.0, 1.0, 0.0}), make_flux("burgers"), 0.3, 8);
  const auto m = build_5layer_lrnr(ea, true);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(0.0, 1.0), ut(0.0, 0.3);
  for (int i = 0; i < 100; ++i) {
    const double x = ux(rng), t = ut(rng);
    EXPECT_NEAR(forward(m, x, t), forward_dense(m, x, t), 1e-12);
  }
}

TEST(Rank, KnownMatrices) {
  LRNRModel m;
  m.arch.dims = {1, 3, 3};
  LowRankLayer L1;
  L1.rows = 3;
  L1.cols = 1;
  LowRankLayer L2;
  L2.rows = 3;
  L2.cols = 3;
  L2.weight_factors.push_back({Rank1Factor{{1.0, 2.0, 3.0}, {1.0, -1.0, 0.5}}, {1.0, 0.0}});
  m.layers = {L1, L2};
  EXPECT_EQ(layer_rank(m, 1, {0.0, 1.0}), 0);
  EXPECT_EQ(layer_rank(m, 2, {0.0, 1.0}), 1);
  m.layers[1].weight_factors.push_back({Rank1Factor{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}, {0.0, 1.0}});
  EXPECT_EQ(layer_rank(m, 2, {0.0}), 1);
  EXPECT_EQ(layer_rank(m, 2, {0.0, 1.0}), 2);
  EXPECT_EQ(coefficient_rank(m, 2), 2);
  EXPECT_THROW(layer_rank(m, 3, {0.0}), OutOfRange);
}

TEST(Dof, SharedTagsCountOnce) {
  LRNRModel m;
  m.arch.dims = {1, 3};
  LowRankLayer L;
  L.rows = 3;
  L.cols = 1;
  for (std::size_t r = 0; r < 3; ++r) L.sparse_weights.push_back({r, 0, {0.7, 0.0}, 4});
  m.layers = {L};
  EXPECT_EQ(dof_count(m), 1u);
}

TEST(Json, RoundTripPreservesForward) {
  std::mt19937_64 rng(17);
  const auto m = random_model(rng);
  nlohmann::json j = m;
  const auto back = model_from_json(nlohmann::json::parse(j.dump()));
  for (double x : {-0.7, 0.1, 0.9})
    for (double t : {0.0, 0.5}) EXPECT_DOUBLE_EQ(forward(back, x, t), forward(m, x, t));
  EXPECT_THROW(model_from_json(nlohmann::json::object()), Error);
}

TEST(Validate, ShapeMismatchDetected) {
  auto m = rho_gadget(0.1, 0.2);
  m.arch.dims = {1, 3, 1};
  EXPECT_THROW(m.validate(), ShapeMismatch);
}

TEST(Materialize, CapEnforced) {
  LowRankLayer L;
  L.rows = kDenseWidthCap + 1;
  L.cols = 1;
  EXPECT_THROW(materialize(L, 0.0), CapExceeded);
}
