#include "lrnr/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "lrnr/errors.hpp"

namespace lrnr {

namespace {

constexpr std::array<double, 8> kGLNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                            0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGLWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

double gauss_abs(const std::function<double(double)>& f, double a, double b) {
  const double m = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < kGLNodes.size(); ++i) s += kGLWeights[i] * std::abs(f(m + h * kGLNodes[i]));
  return s * h;
}

double find_root(const std::function<double(double)>& f, double a, double b, double fa) {
  for (int it = 0; it < 100 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double integrate_abs(const std::function<double(double)>& f, double a, double b, int panels) {
  if (!(b > a)) return 0.0;
  double total = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double pa = a + p * h, pb = (p + 1 == panels) ? b : a + (p + 1) * h;
    const double fa = f(pa), fb = f(pb);
    if (fa != 0.0 && fb != 0.0 && ((fa > 0) != (fb > 0))) {
      const double r = find_root(f, pa, pb, fa);
      total += gauss_abs(f, pa, r) + gauss_abs(f, r, pb);
    } else {
      total += gauss_abs(f, pa, pb);
    }
  }
  return total;
}

SolutionProfile::SolutionProfile(double t, std::vector<ProfileSegment> segs, FluxPtr flux)
    : t_(t), segs_(std::move(segs)), flux_(std::move(flux)) {}

double SolutionProfile::operator()(double x) const {
  auto it = std::lower_bound(segs_.begin(), segs_.end(), x,
                             [](const ProfileSegment& s, double v) { return s.b < v; });
  if (it == segs_.end()) it = std::prev(segs_.end());
  const auto& s = *it;
  if (!s.fan) return s.value;
  return flux_->fprime_inverse((x - s.origin) / t_);
}

std::vector<double> SolutionProfile::discontinuities(double tol) const {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < segs_.size(); ++i) {
    const double x = segs_[i].b;
    const auto val = [&](const ProfileSegment& s) {
      return s.fan ? flux_->fprime_inverse((x - s.origin) / t_) : s.value;
    };
    if (std::abs(val(segs_[i]) - val(segs_[i + 1])) > tol) out.push_back(x);
  }
  return out;
}

double SolutionProfile::l1_distance(const PiecewiseLinearFn& h, const Interval& dom) const {
  const bool linear_fans = flux_->name() == "burgers";
  double total = 0.0;
  for (const auto& s : segs_) {
    const double a = std::max(s.a, dom.lo), b = std::min(s.b, dom.hi);
    if (!(b > a)) continue;
    std::vector<double> ks{a, b};
    for (double k : h.knots())
      if (k > a && k < b) ks.push_back(k);
    std::sort(ks.begin(), ks.end());
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
      const double xa = ks[i], xb = ks[i + 1];
      if (!s.fan) {
        total += abs_linear_integral(s.value - h(xa), s.value - h(xb), xa, xb);
      } else if (linear_fans) {
        total += abs_linear_integral((xa - s.origin) / t_ - h(xa), (xb - s.origin) / t_ - h(xb), xa, xb);
      } else {
        total += integrate_abs(
            [&](double x) { return flux_->fprime_inverse((x - s.origin) / t_) - h(x); }, xa, xb);
      }
    }
  }
  return total;
}

LaxOleinikOracle::LaxOleinikOracle(PiecewiseConstantFn u0, FluxPtr flux, double T)
    : u0_(std::move(u0)), flux_(std::move(flux)), T_(T) {
  if (!(T > 0.0)) throw OutOfRange("horizon T must be positive");
  const auto& bp = u0_.breakpoints();
  const auto& v = u0_.values();
  U_at_bp_.resize(bp.size());
  // U0(0) = 0; integrate piecewise from 0
  for (std::size_t j = 0; j < bp.size(); ++j) {
    double acc = 0.0;
    double lo = std::min(0.0, bp[j]), hi = std::max(0.0, bp[j]);
    const double sgn = bp[j] >= 0.0 ? 1.0 : -1.0;
    double cur = lo;
    for (std::size_t k = 0; k <= bp.size(); ++k) {
      const double pa = k == 0 ? -std::numeric_limits<double>::infinity() : bp[k - 1];
      const double pb = k == bp.size() ? std::numeric_limits<double>::infinity() : bp[k];
      const double a = std::max(pa, cur), b = std::min(pb, hi);
      if (b > a) acc += v[k] * (b - a);
    }
    U_at_bp_[j] = sgn * acc;
  }
  umin_ = *std::min_element(v.begin(), v.end());
  umax_ = *std::max_element(v.begin(), v.end());
  const auto& wr = flux_->working_range();
  if (!wr.contains(umin_) || !wr.contains(umax_)) throw OutOfRange("initial data leaves the flux working range");
  tol_y_ = 1e-9 * (1.0 + positive_variation(u0_));
}

void LaxOleinikOracle::check_time(double t) const {
  if (t > T_ * (1.0 + 1e-12)) throw HorizonExceeded("t exceeds the horizon");
}

double LaxOleinikOracle::primitive(double y) const {
  const auto& bp = u0_.breakpoints();
  const auto& v = u0_.values();
  if (bp.empty()) return v[0] * y;
  auto it = std::upper_bound(bp.begin(), bp.end(), y);
  const std::size_t j = static_cast<std::size_t>(it - bp.begin());  // piece index
  if (j == 0) return U_at_bp_[0] + v[0] * (y - bp[0]);
  return U_at_bp_[j - 1] + v[j] * (y - bp[j - 1]);
}

double LaxOleinikOracle::objective(double y, double x, double t) const {
  const auto sr = flux_->speed_range();
  const double p = std::clamp((x - y) / t, sr.lo, sr.hi);
  return primitive(y) + t * flux_->legendre(p);
}

MinimizerSet LaxOleinikOracle::minimize(double x, double t) const {
  check_time(t);
  if (!(t > 0.0)) throw OutOfRange("minimize needs t > 0");
  const double smin = flux_->fp(umin_), smax = flux_->fp(umax_);
  const double ylo = x - t * smax, yhi = x - t * smin;
  const auto& bp = u0_.breakpoints();
  const auto& v = u0_.values();

  std::vector<double> cand{ylo, yhi};
  for (double b : bp)
    if (b > ylo && b < yhi) cand.push_back(b);
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double y = x - t * flux_->fp(v[j]);
    const double pa = j == 0 ? -std::numeric_limits<double>::infinity() : bp[j - 1];
    const double pb = j == bp.size() ? std::numeric_limits<double>::infinity() : bp[j];
    if (y >= pa && y <= pb && y >= ylo && y <= yhi) cand.push_back(y);
  }

  std::vector<double> J(cand.size());
  double jmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cand.size(); ++i) {
    J[i] = objective(cand[i], x, t);
    jmin = std::min(jmin, J[i]);
  }
  const double tau = 1e-12 * (1.0 + std::abs(jmin));
  MinimizerSet ms{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), jmin};
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (J[i] <= jmin + tau) {
      ms.y_minus = std::min(ms.y_minus, cand[i]);
      ms.y_plus = std::max(ms.y_plus, cand[i]);
    }
  }
  return ms;
}

double LaxOleinikOracle::solution(double x, double t, Side side) const {
  check_time(t);
  if (t <= 0.0) return u0_(x, side == Side::Point ? Side::Right : side);
  const MinimizerSet ms = minimize(x, t);
  const double y = side == Side::Right ? ms.y_plus : ms.y_minus;
  const auto sr = flux_->speed_range();
  return flux_->fprime_inverse(std::clamp((x - y) / t, sr.lo, sr.hi));
}

bool LaxOleinikOracle::alive(double foot, double speed, double t) const {
  check_time(t);
  if (t <= 0.0) return true;
  const double z = foot + t * speed;
  const MinimizerSet ms = minimize(z, t);
  if (std::abs(foot - ms.y_minus) <= tol_y_ || std::abs(foot - ms.y_plus) <= tol_y_) return true;
  const double jf = primitive(foot) + t * flux_->legendre(speed);
  return jf <= ms.value + 1e-12 * (1.0 + std::abs(ms.value));
}

int LaxOleinikOracle::foot_class(double x, double t) const {
  const MinimizerSet ms = minimize(x, t);
  const double y = ms.y_minus;
  const auto& bp = u0_.breakpoints();
  for (std::size_t j = 0; j < bp.size(); ++j) {
    if (std::abs(y - bp[j]) <= 1e-13 * (1.0 + std::abs(bp[j]))) return static_cast<int>(2 * j + 1);
  }
  return static_cast<int>(2 * u0_.piece_index(y));
}

SolutionProfile LaxOleinikOracle::profile(double t, int n_scan) const {
  check_time(t);
  const Interval dom = dom_x();
  const auto& bp = u0_.breakpoints();
  const auto& v = u0_.values();
  std::vector<ProfileSegment> segs;
  auto make_seg = [&](double a, double b, int cls) {
    ProfileSegment s;
    s.a = a;
    s.b = b;
    if (cls % 2 == 0) {
      s.value = v[static_cast<std::size_t>(cls / 2)];
    } else {
      s.fan = true;
      s.origin = bp[static_cast<std::size_t>(cls / 2)];
    }
    return s;
  };
  if (t <= 0.0) {
    double a = dom.lo;
    for (std::size_t j = 0; j <= bp.size(); ++j) {
      const double b = j < bp.size() ? std::min(bp[j], dom.hi) : dom.hi;
      if (b > a) segs.push_back(make_seg(a, b, static_cast<int>(2 * j)));
      a = std::max(a, b);
    }
    return SolutionProfile(t, std::move(segs), flux_);
  }
  std::vector<double> xs(n_scan + 1);
  std::vector<int> cs(n_scan + 1);
  for (int i = 0; i <= n_scan; ++i) {
    xs[i] = dom.lo + dom.length() * i / n_scan;
    cs[i] = foot_class(xs[i], t);
  }
  const double xtol = 1e-14 * (1.0 + dom.length());
  double seg_start = dom.lo;
  int cur = cs[0];
  for (int i = 0; i < n_scan; ++i) {
    double lo = xs[i];
    while (cur != cs[i + 1]) {
      double hi = xs[i + 1];
      while (hi - lo > xtol) {
        const double m = 0.5 * (lo + hi);
        if (foot_class(m, t) == cur)
          lo = m;
        else
          hi = m;
      }
      segs.push_back(make_seg(seg_start, hi, cur));
      seg_start = hi;
      const int next = foot_class(hi, t);
      cur = next == cur ? cs[i + 1] : next;
      lo = hi;
    }
  }
  segs.push_back(make_seg(seg_start, dom.hi, cur));
  // drop degenerate pieces created at exact boundaries
  std::vector<ProfileSegment> clean;
  for (const auto& s : segs)
    if (s.b > s.a) clean.push_back(s);
  return SolutionProfile(t, std::move(clean), flux_);
}

CharacteristicOracle::CharacteristicOracle(std::function<double(double)> u0, FluxPtr flux, Interval dom)
    : u0_(std::move(u0)), flux_(std::move(flux)), dom_(dom) {
  double umin = 0.0, umax = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double u = u0_(dom_.lo + dom_.length() * i / 4000);
    umin = std::min(umin, u);
    umax = std::max(umax, u);
  }
  smin_ = flux_->fp(umin) - 1e-12;
  smax_ = flux_->fp(umax) + 1e-12;
}

double CharacteristicOracle::foot(double x, double t) const {
  if (t <= 0.0) return x;
  double lo = x - t * smax_, hi = x - t * smin_;
  auto g = [&](double y) { return y + t * flux_->fp(u0_(y)) - x; };
  for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::abs(x)); ++it) {
    const double m = 0.5 * (lo + hi);
    if (g(m) < 0.0)
      lo = m;
    else
      hi = m;
  }
  return 0.5 * (lo + hi);
}

double CharacteristicOracle::solution(double x, double t) const { return u0_(foot(x, t)); }

double CharacteristicOracle::l1_distance(const PiecewiseLinearFn& h, double t, int panels_per_knot) const {
  std::vector<double> ks{dom_.lo, dom_.hi};
  for (double k : h.knots())
    if (k > dom_.lo && k < dom_.hi) ks.push_back(k);
  std::sort(ks.begin(), ks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
    total += integrate_abs([&](double x) { return solution(x, t) - h(x); }, ks[i], ks[i + 1], panels_per_knot);
  }
  return total;
}

}  // namespace lrnr
