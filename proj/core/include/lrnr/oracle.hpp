#pragma once

#include <functional>
#include <vector>

#include "lrnr/flux.hpp"
#include "lrnr/pwlin.hpp"

namespace lrnr {

struct MinimizerSet {
  double y_minus = 0.0;
  double y_plus = 0.0;
  double value = 0.0;
};

// Exact solution at a fixed time as a list of constant and fan pieces.
struct ProfileSegment {
  double a = 0.0;
  double b = 0.0;
  bool fan = false;
  double value = 0.0;   // constant pieces
  double origin = 0.0;  // fan pieces: u = (F')^{-1}((x - origin) / t)
};

class SolutionProfile {
 public:
  SolutionProfile(double t, std::vector<ProfileSegment> segs, FluxPtr flux);

  double operator()(double x) const;
  double t() const { return t_; }
  const std::vector<ProfileSegment>& segments() const { return segs_; }
  // exact for constant pieces and linear fans, Gauss-Legendre otherwise
  double l1_distance(const PiecewiseLinearFn& h, const Interval& dom) const;
  // positions where the profile jumps
  std::vector<double> discontinuities(double tol = 1e-12) const;

 private:
  double t_;
  std::vector<ProfileSegment> segs_;
  FluxPtr flux_;
};

class LaxOleinikOracle {
 public:
  LaxOleinikOracle(PiecewiseConstantFn u0, FluxPtr flux, double T);

  MinimizerSet minimize(double x, double t) const;
  double objective(double y, double x, double t) const;
  // left / right limit of the entropy solution at (x,t)
  double solution(double x, double t, Side side = Side::Left) const;
  bool alive(double foot, double speed, double t) const;
  SolutionProfile profile(double t, int n_scan = 256) const;

  double primitive(double y) const;  // U0(y) = int_0^y u0
  const PiecewiseConstantFn& u0() const { return u0_; }
  const FluxPtr& flux() const { return flux_; }
  double T() const { return T_; }
  double tol_y() const { return tol_y_; }
  Interval dom_x() const { return Interval(0.0, 1.0); }

 private:
  void check_time(double t) const;
  int foot_class(double x, double t) const;

  PiecewiseConstantFn u0_;
  FluxPtr flux_;
  double T_;
  std::vector<double> U_at_bp_;
  double umin_ = 0.0, umax_ = 0.0;
  double tol_y_ = 0.0;
};

// Pre-shock classical solution for smooth data: u(x,t) = u0(y), y + t F'(u0(y)) = x.
class CharacteristicOracle {
 public:
  CharacteristicOracle(std::function<double(double)> u0, FluxPtr flux, Interval dom);
  double foot(double x, double t) const;
  double solution(double x, double t) const;
  // L1 distance on dom between u(.,t) and a P1 function, composite Gauss-Legendre
  double l1_distance(const PiecewiseLinearFn& h, double t, int panels_per_knot = 4) const;
  double u0(double x) const { return u0_(x); }

 private:
  std::function<double(double)> u0_;
  FluxPtr flux_;
  Interval dom_;
  double smin_ = 0.0, smax_ = 0.0;
};

// integral of |f| over [a,b] for smooth f: panels, sign-change splitting, 8-point Gauss-Legendre
double integrate_abs(const std::function<double(double)>& f, double a, double b, int panels = 8);

}  // namespace lrnr
