#include "lrnr/pwlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lrnr/errors.hpp"

namespace lrnr {

namespace {

void require_strictly_increasing(const std::vector<double>& xs, const char* what) {
  for (double v : xs) {
    if (!std::isfinite(v)) throw OutOfRange(std::string(what) + " contains a non-finite value");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw OutOfRange(std::string(what) + " must be strictly increasing");
  }
}

double scale_of(const std::vector<double>& v) {
  double s = 1.0;
  for (double y : v) s = std::max(s, std::abs(y));
  return s;
}

template <class F>
double sum_abs_diffs(const std::vector<double>& v, F&& pick) {
  double s = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) s += pick(v[i] - v[i - 1]);
  return s;
}

// Limits of f at the two ends of an open interval (a,b) on which f has no knot.
std::pair<double, double> inner_limits(const PiecewiseLinearFn& f, double a, double b) {
  return {f(a), f(b)};
}
std::pair<double, double> inner_limits(const PiecewiseConstantFn& f, double a, double b) {
  double v = f(0.5 * (a + b));
  return {v, v};
}

const std::vector<double>& knot_list(const PiecewiseLinearFn& f) { return f.knots(); }
const std::vector<double>& knot_list(const PiecewiseConstantFn& f) { return f.breakpoints(); }

template <class A, class B>
std::vector<double> merged_knots(const A& f, const B& g, const Interval& dom) {
  std::vector<double> ks{dom.lo, dom.hi};
  for (double k : knot_list(f))
    if (k > dom.lo && k < dom.hi) ks.push_back(k);
  for (double k : knot_list(g))
    if (k > dom.lo && k < dom.hi) ks.push_back(k);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

template <class A, class B>
double l1_impl(const A& f, const B& g, const Interval& dom) {
  const auto ks = merged_knots(f, g, dom);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
    const double a = ks[i], b = ks[i + 1];
    auto [fa, fb] = inner_limits(f, a, b);
    auto [ga, gb] = inner_limits(g, a, b);
    total += abs_linear_integral(fa - ga, fb - gb, a, b);
  }
  return total;
}

double value_side(const PiecewiseLinearFn& f, double x, Side) { return f(x); }
double value_side(const PiecewiseConstantFn& f, double x, Side s) { return f(x, s); }

template <class A, class B>
double linf_impl(const A& f, const B& g, const Interval& dom, int sample_n) {
  const auto ks = merged_knots(f, g, dom);
  double m = 0.0;
  for (double k : ks) {
    for (Side s : {Side::Left, Side::Right}) {
      m = std::max(m, std::abs(value_side(f, k, s) - value_side(g, k, s)));
    }
  }
  for (int i = 0; i < sample_n; ++i) {
    const double x = dom.lo + (i + 0.5) * dom.length() / sample_n;
    m = std::max(m, std::abs(value_side(f, x, Side::Point) - value_side(g, x, Side::Point)));
  }
  return m;
}

}  // namespace

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo <= hi))
    throw OutOfRange("interval requires finite lo <= hi");
}

PiecewiseConstantFn::PiecewiseConstantFn() : v_{0.0} {}

PiecewiseConstantFn::PiecewiseConstantFn(std::vector<double> breakpoints, std::vector<double> values)
    : bp_(std::move(breakpoints)), v_(std::move(values)) {
  require_strictly_increasing(bp_, "breakpoints");
  if (v_.size() != bp_.size() + 1) throw OutOfRange("P0 needs values.size() == breakpoints.size() + 1");
  for (double v : v_)
    if (!std::isfinite(v)) throw OutOfRange("P0 values must be finite");
}

std::size_t PiecewiseConstantFn::piece_index(double x, Side side) const {
  if (side == Side::Left) {
    return static_cast<std::size_t>(std::lower_bound(bp_.begin(), bp_.end(), x) - bp_.begin());
  }
  return static_cast<std::size_t>(std::upper_bound(bp_.begin(), bp_.end(), x) - bp_.begin());
}

double PiecewiseConstantFn::operator()(double x, Side side) const { return v_[piece_index(x, side)]; }

PiecewiseLinearFn::PiecewiseLinearFn() : x_{0.0, 1.0}, y_{0.0, 0.0} {}

PiecewiseLinearFn::PiecewiseLinearFn(std::vector<double> knots, std::vector<double> values)
    : x_(std::move(knots)), y_(std::move(values)) {
  if (x_.empty()) throw OutOfRange("P1 needs at least one knot");
  require_strictly_increasing(x_, "knots");
  if (y_.size() != x_.size()) throw OutOfRange("P1 needs one value per knot");
  for (double v : y_)
    if (!std::isfinite(v)) throw OutOfRange("P1 values must be finite");
}

PiecewiseLinearFn PiecewiseLinearFn::identity(const Interval& dom) {
  return PiecewiseLinearFn({dom.lo, dom.hi}, {dom.lo, dom.hi});
}

PiecewiseLinearFn PiecewiseLinearFn::constant(const Interval& dom, double c) {
  return PiecewiseLinearFn({dom.lo, dom.hi}, {c, c});
}

std::size_t PiecewiseLinearFn::segment(double x) const {
  if (x_.size() < 2) return 0;
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  if (i == 0) return 0;
  return std::min(i - 1, x_.size() - 2);
}

double PiecewiseLinearFn::slope(std::size_t seg) const {
  return (y_[seg + 1] - y_[seg]) / (x_[seg + 1] - x_[seg]);
}

double PiecewiseLinearFn::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const std::size_t i = segment(x);
  const double w = (x - x_[i]) / (x_[i + 1] - x_[i]);
  return y_[i] + w * (y_[i + 1] - y_[i]);
}

double total_variation(const PiecewiseConstantFn& f) {
  return sum_abs_diffs(f.values(), [](double d) { return std::abs(d); });
}
double total_variation(const PiecewiseLinearFn& f) {
  return sum_abs_diffs(f.values(), [](double d) { return std::abs(d); });
}
double positive_variation(const PiecewiseConstantFn& f) {
  return sum_abs_diffs(f.values(), [](double d) { return std::max(d, 0.0); });
}
double positive_variation(const PiecewiseLinearFn& f) {
  return sum_abs_diffs(f.values(), [](double d) { return std::max(d, 0.0); });
}

MonotoneInverse::MonotoneInverse(const PiecewiseLinearFn& g) : g_(g) {
  const auto& y = g_.values();
  tol_ = 1e-12 * scale_of(y);
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (y[i] < y[i - 1] - tol_) throw NotMonotone("function decreases at knot " + std::to_string(i));
  }
}

double MonotoneInverse::operator()(double yq) const {
  const auto& x = g_.knots();
  const auto& y = g_.values();
  if (yq < y.front() - tol_ || yq > y.back() + tol_) throw OutOfRange("value outside the range of g");
  yq = std::clamp(yq, y.front(), y.back());
  if (yq <= y.front()) return x.front();
  // first j with y[j] >= yq; step back over tolerated tiny decreases
  auto it = std::lower_bound(y.begin(), y.end(), yq);
  std::size_t j = std::min(static_cast<std::size_t>(it - y.begin()), y.size() - 1);
  while (j > 1 && y[j - 1] >= yq) --j;
  if (j == 0) return x.front();
  const double dy = y[j] - y[j - 1];
  if (dy <= 0) return x[j];
  const double w = std::clamp((yq - y[j - 1]) / dy, 0.0, 1.0);
  return x[j - 1] + w * (x[j] - x[j - 1]);
}

double left_inverse(const PiecewiseLinearFn& g, double y) { return MonotoneInverse(g)(y); }

double rho_eps(double eps, double x) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidEps("eps must be positive");
  const double h = 0.5 * eps;
  return (std::max(x + h, 0.0) - std::max(x - h, 0.0)) / eps;
}

double StepSum::operator()(double xq) const {
  double s = base;
  if (eps > 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) s += c[i] * rho_eps(eps, xq - x[i]);
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) s += c[i] * rho(xq - x[i]);
  }
  return s;
}

double StepSum::total_variation() const {
  double s = 0.0;
  for (double ci : c) s += std::abs(ci);
  return s;
}

PiecewiseLinearFn StepSum::to_p1(const Interval& dom) const {
  if (!(eps > 0.0)) throw InvalidEps("to_p1 needs eps > 0");
  struct Event {
    double x;
    double dslope;
  };
  std::vector<Event> ev;
  ev.reserve(2 * x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (c[i] == 0.0) continue;
    ev.push_back({x[i] - 0.5 * eps, c[i] / eps});
    ev.push_back({x[i] + 0.5 * eps, -c[i] / eps});
  }
  std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.x < b.x; });
  std::vector<double> kx, ky;
  double lo = dom.lo, hi = dom.hi;
  if (!ev.empty()) {
    lo = std::min(lo, ev.front().x);
    hi = std::max(hi, ev.back().x);
  }
  kx.push_back(lo);
  ky.push_back(base);
  double slope = 0.0;
  for (const auto& e : ev) {
    if (e.x > kx.back()) {
      ky.push_back(ky.back() + slope * (e.x - kx.back()));
      kx.push_back(e.x);
    }
    slope += e.dslope;
  }
  if (hi > kx.back()) {
    ky.push_back(ky.back() + slope * (hi - kx.back()));
    kx.push_back(hi);
  }
  // the right tail is exactly base + sum(c); pin it to remove accumulated rounding
  if (!ev.empty()) {
    double total = base;
    for (double ci : c) total += ci;
    ky.back() = total;
  }
  if (kx.size() == 1) {
    kx.push_back(kx.front() + 1.0);
    ky.push_back(ky.front());
  }
  return PiecewiseLinearFn(std::move(kx), std::move(ky));
}

PiecewiseConstantFn StepSum::to_p0() const {
  std::vector<std::pair<double, double>> steps;
  for (std::size_t i = 0; i < x.size(); ++i) steps.emplace_back(x[i], c[i]);
  std::sort(steps.begin(), steps.end());
  std::vector<double> bp, v{base};
  for (const auto& [xi, ci] : steps) {
    if (!bp.empty() && xi == bp.back()) {
      v.back() += ci;
    } else {
      bp.push_back(xi);
      v.push_back(v.back() + ci);
    }
  }
  return PiecewiseConstantFn(std::move(bp), std::move(v));
}

double abs_linear_integral(double da, double db, double a, double b) {
  const double h = b - a;
  if (h <= 0.0) return 0.0;
  if ((da >= 0.0 && db >= 0.0) || (da <= 0.0 && db <= 0.0)) return 0.5 * (std::abs(da) + std::abs(db)) * h;
  return 0.5 * (da * da + db * db) / std::abs(da - db) * h;
}

double l1_distance(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g, const Interval& dom) {
  return l1_impl(f, g, dom);
}
double l1_distance(const PiecewiseConstantFn& f, const PiecewiseConstantFn& g, const Interval& dom) {
  return l1_impl(f, g, dom);
}
double l1_distance(const PiecewiseConstantFn& f, const PiecewiseLinearFn& g, const Interval& dom) {
  return l1_impl(f, g, dom);
}
double l1_distance(const PiecewiseLinearFn& f, const PiecewiseConstantFn& g, const Interval& dom) {
  return l1_impl(f, g, dom);
}

double linf_distance(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g, const Interval& dom,
                     int sample_n) {
  return linf_impl(f, g, dom, sample_n);
}
double linf_distance(const PiecewiseConstantFn& f, const PiecewiseLinearFn& g, const Interval& dom,
                     int sample_n) {
  return linf_impl(f, g, dom, sample_n);
}

}  // namespace lrnr
