#pragma once

#include <memory>
#include <nlohmann/json_fwd.hpp>
#include <utility>
#include <vector>

#include "lrnr/flux.hpp"
#include "lrnr/oracle.hpp"
#include "lrnr/pwlin.hpp"

namespace lrnr {

// One piece of the extended initial data on the extended domain: either the image
// of a constant piece of u0, or a fan interval on which F'(u) is affine in z.
struct UhatPiece {
  double a = 0.0;
  double b = 0.0;
  bool fan = false;
  double value = 0.0;    // constant pieces
  double origin = 0.0;   // fan pieces: jump location in the original domain
  double nu_minus = 0.0; // fan pieces: F' of the left state
  double nu_plus = 0.0;  // fan pieces: F' of the right state
};

struct ExtendedInitialData {
  PiecewiseConstantFn u0;
  FluxPtr flux;
  Interval dom_x{0.0, 1.0};
  Interval ext_dom{0.0, 1.0};
  std::vector<double> fan_origins;
  std::vector<double> fan_widths;
  std::vector<Interval> gammas;
  std::vector<double> nu_minus;
  std::vector<double> nu_plus;
  std::vector<UhatPiece> pieces;
  PiecewiseLinearFn i_hat;

  double iota(double x) const;
  std::size_t piece_at(double z, Side side = Side::Point) const;
  double uhat(double z, Side side = Side::Point) const;
  double speed(double z, Side side = Side::Point) const;  // F'(uhat)
  double foot(double z) const { return i_hat(z); }
  double xhat0(double z, double t, Side side = Side::Point) const;
  // piece boundaries, including both ends of the extended domain
  std::vector<double> knots() const;
  // images of the downward jumps of u0
  std::vector<double> jump_images() const;
  double length() const { return ext_dom.length(); }
};

ExtendedInitialData extend_initial(const PiecewiseConstantFn& u0, FluxPtr flux);

double shock_time(const ExtendedInitialData& ext, const LaxOleinikOracle& oracle, double z, double tol_t);

struct ShockTimeTable {
  std::vector<double> grid;
  std::vector<double> lambda_vals;
  double T = 0.0;
  double tol_t = 0.0;
  double sentinel = 0.0;
  std::shared_ptr<const LaxOleinikOracle> oracle;

  // direct predicate: the characteristic from z has merged into a shock by time t
  bool in_shock(const ExtendedInitialData& ext, double z, double t) const;
  double lambda(const ExtendedInitialData& ext, double z) const;
};

ShockTimeTable build_shock_table(const ExtendedInitialData& ext, std::shared_ptr<const LaxOleinikOracle> oracle,
                                 int n_grid);

// Connected component of the shock set at a fixed time. lo and hi are the
// alive-side limits; value is the shock position.
struct ShockComponent {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;
};

struct ReliefSegment {
  double za = 0.0, zb = 0.0;
  double va = 0.0, vb = 0.0;
};

// Rarefied characteristics at one time: shock components plus the exact
// piecewise linear map z -> Xhat(z,t) on the extended domain.
class XhatSlice {
 public:
  XhatSlice(const ExtendedInitialData& ext, const ShockTimeTable& table, double t);

  double t() const { return t_; }
  const std::vector<ShockComponent>& components() const { return comps_; }
  const PiecewiseLinearFn& profile() const { return profile_; }
  const ShockComponent* find(double z) const;
  bool in_shock(double z) const { return find(z) != nullptr; }

  double xhat(double z) const { return profile_(z); }
  double inverse(double x) const;  // left inverse of Xhat(.,t), clamped to the extended domain
  double entropy(double x) const;

  std::vector<ReliefSegment> relief_segments(double c_x) const;
  double relief(const std::vector<ReliefSegment>& segs, double x) const;
  double relief(double x, double c_x) const { return relief(relief_segments(c_x), x); }

 private:
  const ExtendedInitialData* ext_;
  double t_;
  std::vector<ShockComponent> comps_;
  PiecewiseLinearFn profile_;
  std::unique_ptr<MonotoneInverse> inv_;
};

std::pair<double, double> endpoints(const ExtendedInitialData& ext, const ShockTimeTable& table, double z, double t);
double xhat(const ExtendedInitialData& ext, const ShockTimeTable& table, double z, double t);
double entropy_eval(const ExtendedInitialData& ext, const ShockTimeTable& table, double x, double t);
double relief_eval(const ExtendedInitialData& ext, const ShockTimeTable& table, double x, double t, double c_x);

void to_json(nlohmann::json& j, const ExtendedInitialData& ext);
void to_json(nlohmann::json& j, const ShockTimeTable& table);

}  // namespace lrnr
