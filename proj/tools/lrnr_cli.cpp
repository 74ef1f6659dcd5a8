// Command line front end for the lrnr experiments.
// Exit codes: 0 all checks passed, 2 an acceptance check failed, 1 operational error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "lrnr/characteristics.hpp"
#include "lrnr/errors.hpp"
#include "lrnr/harness.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string preset;
  std::vector<std::size_t> K;
  std::optional<double> T;
  std::string flux;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--preset", o.preset, "named initial data");
  sub->add_option("--K", o.K, "K values (space separated)");
  sub->add_option("--T", o.T, "time horizon");
  sub->add_option("--flux", o.flux, "flux name");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--seed", o.seed, "random seed");
}

// file < environment < flags
lrnr::ExperimentConfig resolve(const Overrides& o) {
  lrnr::ExperimentConfig c = lrnr::preset_config("merge_two_shocks");
  if (!o.config.empty()) c = lrnr::load_config(o.config, c);
  lrnr::apply_env(c);
  if (!o.preset.empty()) {
    nlohmann::json j{{"preset", o.preset}};
    lrnr::merge_config(c, j);
  }
  if (!o.K.empty()) {
    c.K = o.K;
    std::sort(c.K.begin(), c.K.end());
  }
  if (o.T) c.T = *o.T;
  if (!o.flux.empty()) c.flux = o.flux;
  if (!o.out.empty()) c.out_dir = o.out;
  if (o.seed) c.seed = *o.seed;
  c.validate();
  return c;
}

void emit(const lrnr::ExperimentConfig& c, const std::string& name, const nlohmann::json& j) {
  std::cout << j.dump(2) << std::endl;
  const std::filesystem::path dir(c.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / (name + "_" + (c.preset.empty() ? std::string("custom") : c.preset) + ".json");
  std::ofstream os(path);
  if (!os) throw lrnr::IOError("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lrnr: entropy solutions as low rank ReLU networks"};
  app.require_subcommand(1);
  Overrides o;

  double x = 0.5, t = -1.0;
  auto* solve = app.add_subcommand("solve", "evaluate the oracle, the rarefied map and the network at (x, t)");
  add_common(solve, o);
  solve->add_option("--x", x, "spatial point");
  solve->add_option("--t", t, "time (default: the horizon)");

  auto* conv = app.add_subcommand("convergence", "L1 error against K and fitted rate");
  add_common(conv, o);
  auto* audit = app.add_subcommand("audit", "depth, rank, affinity and equivalence checks of the built network");
  add_common(audit, o);
  auto* timing = app.add_subcommand("timing", "march_eval wall clock on K x K grids");
  add_common(timing, o);

  std::string what = "solution";
  auto* exp = app.add_subcommand("export", "write CSV or JSON data");
  add_common(exp, o);
  exp->add_option("--what", what, "solution, characteristics, lambda or weights")
      ->check(CLI::IsMember({"solution", "characteristics", "lambda", "weights"}));

  std::string weights;
  auto* inspect = app.add_subcommand("inspect", "summarize a weights file or the extended data of a preset");
  add_common(inspect, o);
  inspect->add_option("--weights", weights, "weights JSON produced by export")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*inspect && !weights.empty()) {
      std::ifstream is(weights);
      nlohmann::json j;
      is >> j;
      const auto model = lrnr::model_from_json(j);
      nlohmann::json out{{"label", model.label}, {"dims", model.arch.dims}, {"depth", model.depth()},
                         {"factor_rank", model.factor_rank()}, {"dof", lrnr::dof_count(model)}};
      std::cout << out.dump(2) << std::endl;
      return 0;
    }
    const auto cfg = resolve(o);
    if (*solve) {
      const double tt = t < 0.0 ? cfg.T : t;
      nlohmann::json out{{"x", x}, {"t", tt}};
      if (cfg.builder == "entropy") {
        const auto u0 = cfg.u0_pc();
        const auto flux = cfg.make_flux_ptr();
        auto oracle = std::make_shared<lrnr::LaxOleinikOracle>(u0, flux, cfg.T);
        auto ext = std::make_shared<lrnr::ExtendedInitialData>(lrnr::extend_initial(u0, flux));
        const std::size_t K = cfg.K.front();
        auto table = lrnr::build_shock_table(*ext, oracle, std::max(256, static_cast<int>(2 * K)));
        out["u_left"] = oracle->solution(x, tt, lrnr::Side::Left);
        out["u_right"] = oracle->solution(x, tt, lrnr::Side::Right);
        out["entropy_eval"] = lrnr::entropy_eval(*ext, table, x, tt);
        lrnr::EntropyBuildConfig bc;
        bc.K = K;
        bc.T = cfg.T;
        const auto ea = lrnr::build_entropy(ext, table, bc);
        out["K"] = K;
        out["hbar"] = lrnr::hbar_eval(ea, x, tt);
        out["lrnr"] = lrnr::forward(lrnr::build_5layer_lrnr(ea), x, tt);
      } else {
        const auto u0 = cfg.u0_smooth();
        const auto flux = cfg.make_flux_ptr();
        const lrnr::CharacteristicOracle oracle(u0, flux, lrnr::Interval(0.0, 1.0));
        const auto b = lrnr::build_classical_lrnr(u0, flux, cfg.T, cfg.K.front());
        out["u"] = oracle.solution(x, tt);
        out["K"] = cfg.K.front();
        out["lrnr"] = lrnr::forward(b.model(), x, tt);
      }
      std::cout << out.dump(2) << std::endl;
      return 0;
    }
    if (*conv) {
      const auto rep = lrnr::run_convergence(cfg);
      emit(cfg, "convergence", rep);
      return rep.pass ? 0 : 2;
    }
    if (*audit) {
      const auto reps = lrnr::run_audit(cfg);
      bool pass = true;
      for (const auto& r : reps) pass = pass && r.pass;
      emit(cfg, "audit", reps);
      return pass ? 0 : 2;
    }
    if (*timing) {
      const auto rep = lrnr::run_timing(cfg);
      emit(cfg, "timing", rep);
      return rep.pass ? 0 : 2;
    }
    if (*exp) {
      std::cout << lrnr::export_data(cfg, what, cfg.K.front()) << std::endl;
      return 0;
    }
    if (*inspect) {
      nlohmann::json out{{"config", cfg}};
      if (cfg.builder == "entropy") {
        const auto ext = lrnr::extend_initial(cfg.u0_pc(), cfg.make_flux_ptr());
        out["extended"] = ext;
      }
      std::cout << out.dump(2) << std::endl;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
