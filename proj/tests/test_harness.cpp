#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "lrnr/errors.hpp"
#include "lrnr/harness.hpp"

using namespace lrnr;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("lrnr_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const char* cli = std::getenv("LRNR_CLI");
  if (!cli) return -1;
  const int rc = std::system((std::string(cli) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Config, PresetsAreValid) {
  for (const auto& name : preset_names()) EXPECT_NO_THROW(preset_config(name).validate()) << name;
  EXPECT_THROW(preset_config("nope"), ConfigError);
}

TEST(Config, ValidationCatchesErrors) {
  auto c = preset_config("merge_two_shocks");
  c.K = {32, 16};
  EXPECT_THROW(c.validate(), ConfigError);
  c = preset_config("merge_two_shocks");
  c.values.pop_back();
  EXPECT_THROW(c.validate(), ConfigError);
  c = preset_config("merge_two_shocks");
  c.T = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, FileThenEnvironmentPrecedence) {
  const auto dir = temp_dir("cfg");
  const auto path = (dir / "c.json").string();
  std::ofstream(path) << R"({"preset": "stationary_shock", "T": 0.2, "K": [8, 16], "out_dir": "from_file",
                            "tolerances": {"slope_max": -0.9}})";
  auto c = load_config(path);
  EXPECT_EQ(c.preset, "stationary_shock");
  EXPECT_DOUBLE_EQ(c.T, 0.2);
  EXPECT_EQ(c.K, (std::vector<std::size_t>{8, 16}));
  EXPECT_EQ(c.out_dir, "from_file");
  EXPECT_DOUBLE_EQ(c.tol.slope_max, -0.9);
  ::setenv("LRNR_OUT_DIR", "from_env", 1);
  apply_env(c);
  ::unsetenv("LRNR_OUT_DIR");
  EXPECT_EQ(c.out_dir, "from_env");
}

TEST(Config, RoundTripAndErrors) {
  const auto c = preset_config("shock_rarefaction");
  nlohmann::json j = c;
  ExperimentConfig d;
  merge_config(d, j);
  EXPECT_EQ(d.values, c.values);
  EXPECT_DOUBLE_EQ(d.T, c.T);
  const auto dir = temp_dir("badcfg");
  std::ofstream((dir / "bad.json").string()) << "{not json";
  EXPECT_THROW(load_config((dir / "bad.json").string()), ConfigError);
  EXPECT_THROW(load_config((dir / "missing.json").string()), IOError);
  std::ofstream((dir / "type.json").string()) << R"({"T": "soon"})";
  EXPECT_THROW(load_config((dir / "type.json").string()), ConfigError);
}

TEST(Slope, ExactPowerLawAndUndefined) {
  EXPECT_NEAR(fit_loglog_slope({16, 32, 64}, {1.0 / 16, 1.0 / 32, 1.0 / 64}), -1.0, 1e-12);
  EXPECT_NEAR(fit_loglog_slope({10, 100}, {1.0, 0.01}), -2.0, 1e-12);
  EXPECT_TRUE(std::isnan(fit_loglog_slope({16, 32}, {0.0, 0.0})));
  EXPECT_TRUE(std::isnan(fit_loglog_slope({16}, {0.1})));
}

TEST(Samples, CellMidpointsPlusGridTimes) {
  const auto ts = sup_t_samples(0.3, 4);
  ASSERT_EQ(ts.size(), 9u);
  EXPECT_DOUBLE_EQ(ts.front(), 0.0);
  EXPECT_DOUBLE_EQ(ts.back(), 0.3);
  EXPECT_NEAR(ts[1], 0.0375, 1e-15);
}

TEST(Convergence, ZeroPresetHasNoRate) {
  auto c = preset_config("zero");
  c.K = {8, 16};
  const auto r = run_convergence(c);
  for (const auto& row : r.rows) EXPECT_LE(row.l1_hbar, 1e-10);
  EXPECT_TRUE(std::isnan(r.slope));
  EXPECT_TRUE(r.pass);
  nlohmann::json j = r;
  EXPECT_EQ(j["slope"], "NA");
}

TEST(Convergence, MergeSmallKRate) {
  auto c = preset_config("merge_two_shocks");
  c.K = {8, 16, 32};
  const auto r = run_convergence(c);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.slope, -0.8);
  for (const auto& row : r.rows) {
    EXPECT_GE(row.l1_hbar, 0.0);
    EXPECT_NEAR(row.l1_lrnr, row.l1_hbar, 0.05 * row.l1_hbar);
  }
}

TEST(Audit, ClassicalPasses) {
  auto c = preset_config("smooth_bump");
  c.K = {16};
  const auto r = run_audit(c);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_TRUE(r[0].pass);
  EXPECT_EQ(r[0].depth, 2u);
}

TEST(Audit, TamperedModelFails) {
  auto c = preset_config("smooth_bump");
  const auto b = build_classical_lrnr(c.u0_smooth(), c.make_flux_ptr(), c.T, 16);
  auto model = b.model();
  auto ref = [&](double x, double t) { return b.output_p1(t, Interval(0.0, 1.0))(x); };
  EXPECT_TRUE(audit_model(model, ref, c.T, 2, 3, c.tol, 50, 1).pass);
  // splice in an identity hidden layer: same output, full-rank extra layer
  const std::size_t n = model.layers[0].rows;
  LowRankLayer id;
  id.rows = n;
  id.cols = n;
  for (std::size_t i = 0; i < n; ++i) id.sparse_weights.push_back({i, i, {1.0, 0.0}, -1});
  model.layers.insert(model.layers.begin() + 1, id);
  model.arch.dims.insert(model.arch.dims.begin() + 1, n);
  model.validate();
  const auto r = audit_model(model, ref, c.T, 2, 3, c.tol, 50, 1);
  EXPECT_TRUE(r.equiv_ok);
  EXPECT_FALSE(r.rank_ok);
  EXPECT_FALSE(r.depth_ok);
  EXPECT_FALSE(r.pass);
}

TEST(Consistency, MergePreset) {
  const auto r = run_consistency(preset_config("merge_two_shocks"), 4, 256);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_entropy_l1, 1e-6);
}

TEST(Timing, SmallGridsEqualPointwise) {
  auto c = preset_config("merge_two_shocks");
  c.K = {16, 32};
  const auto r = run_timing(c);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_TRUE(r.equal_ok);
  EXPECT_GT(r.rows[1].ratio, 0.0);
  c.K = {16};
  EXPECT_THROW(run_timing(c), ConfigError);
}

TEST(Export, DeterministicCsvAndHeaders) {
  auto c = preset_config("stationary_shock");
  c.out_dir = temp_dir("export").string();
  for (const std::string what : {"solution", "characteristics", "lambda"}) {
    const auto p1 = export_data(c, what, 8);
    const auto a = slurp(p1);
    const auto p2 = export_data(c, what, 8);
    EXPECT_EQ(a, slurp(p2)) << what;
    const auto header = a.substr(0, a.find('\n'));
    if (what == "solution") EXPECT_EQ(header, "x,t,u_oracle,hbar,lrnr");
    if (what == "characteristics") EXPECT_EQ(header, "x_hat_domain_point,t,xhat0,xhat,chieut");
    if (what == "lambda") EXPECT_EQ(header, "z,lambda");
  }
  EXPECT_THROW(export_data(c, "pictures", 8), ConfigError);
}

TEST(Export, LambdaIsVShapedAroundJumpImage) {
  auto c = preset_config("stationary_shock");
  c.out_dir = temp_dir("lambda").string();
  std::ifstream is(export_data(c, "lambda", 8));
  std::string line;
  std::getline(is, line);
  double best_z = 0.0, best = 1e300;
  std::vector<std::pair<double, double>> rows;
  while (std::getline(is, line)) {
    double z, l;
    char comma;
    std::istringstream ss(line);
    ss >> z >> comma >> l;
    rows.emplace_back(z, l);
    if (l < best) best = l, best_z = z;
  }
  EXPECT_NEAR(best, 0.0, 1e-8);
  for (const auto& [z, l] : rows)
    if (std::abs(z - best_z) < 0.2) EXPECT_NEAR(l, std::abs(z - best_z), 1e-8);
}

TEST(Export, WeightsRoundTrip) {
  auto c = preset_config("merge_two_shocks");
  c.out_dir = temp_dir("weights").string();
  const auto path = export_data(c, "weights", 8);
  const auto model = model_from_json(nlohmann::json::parse(slurp(path)));
  const auto ea = build_entropy(c.u0_pc(), c.make_flux_ptr(), c.T, 8);
  const auto ref = build_5layer_lrnr(ea);
  for (double x : {0.1, 0.45, 0.8})
    for (double t : {0.0, 0.13, 0.3}) EXPECT_DOUBLE_EQ(forward(model, x, t), forward(ref, x, t));
}

TEST(Export, UnwritableDirectory) {
  auto c = preset_config("merge_two_shocks");
  c.out_dir = "/dev/null/nowhere";
  EXPECT_THROW(export_data(c, "lambda", 8), IOError);
}

TEST(Cli, ExitCodes) {
  if (!std::getenv("LRNR_CLI")) GTEST_SKIP() << "command line tool not built";
  const auto dir = temp_dir("cli");
  const std::string out = " --out " + dir.string();
  EXPECT_EQ(run_cli("audit --preset smooth_bump --K 16" + out), 0);
  std::ofstream((dir / "strict.json").string()) << R"({"preset": "smooth_bump", "tolerances": {"classical_rank_max": 0}})";
  EXPECT_EQ(run_cli("audit --K 16 --config " + (dir / "strict.json").string() + out), 2);
  EXPECT_EQ(run_cli("solve --preset nope" + out), 1);
  EXPECT_EQ(run_cli("convergence --preset zero --K 8 16" + out), 0);
  EXPECT_TRUE(fs::exists(dir / "convergence_zero.json"));
  EXPECT_EQ(run_cli("export --what lambda --preset merge_two_shocks --K 8" + out), 0);
  EXPECT_TRUE(fs::exists(dir / "lambda_merge_two_shocks.csv"));
}
