#include "lrnr/flux.hpp"

#include <algorithm>
#include <cmath>

#include "lrnr/errors.hpp"

namespace lrnr {

ConvexFlux::ConvexFlux(std::string name, Interval working_range)
    : name_(std::move(name)), range_(working_range) {}

void ConvexFlux::finalize() {
  constexpr int n = 2000;
  double m = fpp(range_.lo);
  for (int i = 1; i <= n; ++i) m = std::min(m, fpp(range_.lo + range_.length() * i / n));
  if (!(m > 0.0)) throw NotAdmissible("flux '" + name_ + "' is not strictly convex on its working range");
  floor_ = m;
}

Interval ConvexFlux::speed_range() const { return Interval(fp(range_.lo), fp(range_.hi)); }

double ConvexFlux::fprime_inverse(double s) const {
  const double tol = 1e-12 * (1.0 + std::abs(s));
  double lo = range_.lo, hi = range_.hi;
  const double slo = fp(lo), shi = fp(hi);
  if (s < slo - tol || s > shi + tol) throw OutOfRange("speed outside F'(working range)");
  if (s <= slo) return lo;
  if (s >= shi) return hi;
  double u = lo + (s - slo) / (shi - slo) * (hi - lo);
  for (int it = 0; it < 200; ++it) {
    const double r = fp(u) - s;
    if (std::abs(r) <= tol) return u;
    if (r > 0.0)
      hi = u;
    else
      lo = u;
    double un = u - r / fpp(u);
    if (!(un > lo && un < hi)) un = 0.5 * (lo + hi);
    if (hi - lo <= 1e-15 * (1.0 + std::abs(u))) return un;
    u = un;
  }
  return u;
}

double ConvexFlux::legendre(double p) const {
  const double u = fprime_inverse(p);
  return p * u - f(u);
}

double ConvexFlux::rh_speed(double ul, double ur) const {
  if (std::abs(ul - ur) < 1e-14) throw DegenerateJump("states coincide");
  return (f(ul) - f(ur)) / (ul - ur);
}

double ConvexFlux::max_fpp(double lo, double hi) const {
  if (hi < lo) std::swap(lo, hi);
  constexpr int n = 1000;
  double m = std::max(fpp(lo), fpp(hi));
  for (int i = 1; i < n; ++i) m = std::max(m, fpp(lo + (hi - lo) * i / n));
  return m;
}

BurgersFlux::BurgersFlux(Interval working_range) : ConvexFlux("burgers", working_range) { finalize(); }

double BurgersFlux::fprime_inverse(double s) const {
  if (!working_range().contains(s, 1e-12 * (1.0 + std::abs(s))))
    throw OutOfRange("speed outside F'(working range)");
  return s;
}

double BurgersFlux::legendre(double p) const {
  (void)fprime_inverse(p);
  return 0.5 * p * p;
}

PolynomialFlux::PolynomialFlux(std::string name, std::vector<double> coeffs, Interval working_range)
    : ConvexFlux(std::move(name), working_range), c_(std::move(coeffs)) {
  if (c_.size() < 3) throw NotAdmissible("polynomial flux needs degree >= 2");
  finalize();
}

double PolynomialFlux::f(double u) const {
  double s = 0.0;
  for (std::size_t i = c_.size(); i-- > 0;) s = s * u + c_[i];
  return s;
}

double PolynomialFlux::fp(double u) const {
  double s = 0.0;
  for (std::size_t i = c_.size(); i-- > 1;) s = s * u + static_cast<double>(i) * c_[i];
  return s;
}

double PolynomialFlux::fpp(double u) const {
  double s = 0.0;
  for (std::size_t i = c_.size(); i-- > 2;) s = s * u + static_cast<double>(i * (i - 1)) * c_[i];
  return s;
}

CoshFlux::CoshFlux(Interval working_range) : ConvexFlux("cosh", working_range) { finalize(); }

double CoshFlux::f(double u) const { return std::cosh(u) - 1.0; }
double CoshFlux::fp(double u) const { return std::sinh(u); }
double CoshFlux::fpp(double u) const { return std::cosh(u); }

FluxPtr make_flux(const std::string& name, const std::vector<double>& coeffs, const Interval* working_range) {
  if (name == "burgers") {
    return working_range ? std::make_shared<BurgersFlux>(*working_range) : std::make_shared<BurgersFlux>();
  }
  if (name == "quartic") {
    return std::make_shared<PolynomialFlux>("quartic", std::vector<double>{0, 0, 0, 0, 0.25},
                                            working_range ? *working_range : Interval(0.25, 4.0));
  }
  if (name == "cosh") {
    return working_range ? std::make_shared<CoshFlux>(*working_range) : std::make_shared<CoshFlux>();
  }
  if (name == "polynomial") {
    return std::make_shared<PolynomialFlux>("polynomial", coeffs,
                                            working_range ? *working_range : Interval(-4.0, 4.0));
  }
  throw ConfigError("unknown flux '" + name + "'");
}

}  // namespace lrnr
