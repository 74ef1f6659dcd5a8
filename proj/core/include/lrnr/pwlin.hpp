#pragma once

#include <cstddef>
#include <vector>

namespace lrnr {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  Interval() = default;
  Interval(double lo_, double hi_);

  double length() const { return hi - lo; }
  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
};

enum class Side { Left, Right, Point };

// Piecewise constant function. values[i] is the value on the i-th open piece,
// i.e. values.size() == breakpoints.size() + 1. Right-continuous representative.
class PiecewiseConstantFn {
 public:
  PiecewiseConstantFn();
  PiecewiseConstantFn(std::vector<double> breakpoints, std::vector<double> values);

  double operator()(double x, Side side = Side::Point) const;
  std::size_t piece_index(double x, Side side = Side::Point) const;

  const std::vector<double>& breakpoints() const { return bp_; }
  const std::vector<double>& values() const { return v_; }
  std::size_t num_pieces() const { return v_.size(); }
  // value jump across breakpoint i (right value minus left value)
  double jump(std::size_t i) const { return v_[i + 1] - v_[i]; }

 private:
  std::vector<double> bp_;
  std::vector<double> v_;
};

// Continuous piecewise linear function, clamped to the end values outside the knots.
class PiecewiseLinearFn {
 public:
  PiecewiseLinearFn();
  PiecewiseLinearFn(std::vector<double> knots, std::vector<double> values);

  static PiecewiseLinearFn identity(const Interval& dom);
  static PiecewiseLinearFn constant(const Interval& dom, double c);

  double operator()(double x) const;
  // segment index i such that knots[i] <= x < knots[i+1], clamped to [0, n-1]
  std::size_t segment(double x) const;
  double slope(std::size_t seg) const;

  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  std::size_t size() const { return x_.size(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

double total_variation(const PiecewiseConstantFn& f);
double total_variation(const PiecewiseLinearFn& f);
double positive_variation(const PiecewiseConstantFn& f);
double positive_variation(const PiecewiseLinearFn& f);

// g^+(y) = inf{x : g(x) = y} for nondecreasing g, restricted to the knot range.
double left_inverse(const PiecewiseLinearFn& g, double y);

// Validates monotonicity once; repeated queries are O(log n).
class MonotoneInverse {
 public:
  explicit MonotoneInverse(const PiecewiseLinearFn& g);
  double operator()(double y) const;
  const PiecewiseLinearFn& fn() const { return g_; }

 private:
  PiecewiseLinearFn g_;
  double tol_;
};

// rho = indicator of (0, inf); rho(0) = 0.
inline double rho(double x) { return x > 0.0 ? 1.0 : 0.0; }
double rho_eps(double eps, double x);

// x -> base + sum_i c_i rho_eps(x - x_i); eps == 0 selects the hard step.
struct StepSum {
  double base = 0.0;
  std::vector<double> x;
  std::vector<double> c;
  double eps = 0.0;

  double operator()(double xq) const;
  double total_variation() const;
  PiecewiseLinearFn to_p1(const Interval& dom) const;
  PiecewiseConstantFn to_p0() const;
};

double l1_distance(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g, const Interval& dom);
double l1_distance(const PiecewiseConstantFn& f, const PiecewiseConstantFn& g, const Interval& dom);
double l1_distance(const PiecewiseConstantFn& f, const PiecewiseLinearFn& g, const Interval& dom);
double l1_distance(const PiecewiseLinearFn& f, const PiecewiseConstantFn& g, const Interval& dom);

double linf_distance(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g, const Interval& dom,
                     int sample_n);
double linf_distance(const PiecewiseConstantFn& f, const PiecewiseLinearFn& g, const Interval& dom,
                     int sample_n);

// exact integral of |d| over [a,b] for d affine with end values da, db
double abs_linear_integral(double da, double db, double a, double b);

}  // namespace lrnr
