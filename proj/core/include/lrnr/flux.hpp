#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lrnr/pwlin.hpp"

namespace lrnr {

// Smooth, strictly convex flux on a finite working range of states.
// Subclasses supply F, F' and F''; the inverse derivative and the convex
// conjugate default to safeguarded Newton iterations.
class ConvexFlux {
 public:
  ConvexFlux(std::string name, Interval working_range);
  virtual ~ConvexFlux() = default;

  virtual double f(double u) const = 0;
  virtual double fp(double u) const = 0;
  virtual double fpp(double u) const = 0;

  virtual double fprime_inverse(double s) const;
  virtual double legendre(double p) const;

  double rh_speed(double ul, double ur) const;
  // sup of F'' over [lo, hi] (scan plus end points)
  virtual double max_fpp(double lo, double hi) const;

  const std::string& name() const { return name_; }
  const Interval& working_range() const { return range_; }
  double convexity_floor() const { return floor_; }
  Interval speed_range() const;

 protected:
  // call at the end of a subclass constructor, once f/fp/fpp are usable
  void finalize();

 private:
  std::string name_;
  Interval range_;
  double floor_ = 0.0;
};

using FluxPtr = std::shared_ptr<const ConvexFlux>;

class BurgersFlux final : public ConvexFlux {
 public:
  explicit BurgersFlux(Interval working_range = Interval(-1e3, 1e3));
  double f(double u) const override { return 0.5 * u * u; }
  double fp(double u) const override { return u; }
  double fpp(double) const override { return 1.0; }
  double fprime_inverse(double s) const override;
  double legendre(double p) const override;
  double max_fpp(double, double) const override { return 1.0; }
};

// F(u) = sum_i c_i u^i
class PolynomialFlux final : public ConvexFlux {
 public:
  PolynomialFlux(std::string name, std::vector<double> coeffs, Interval working_range);
  double f(double u) const override;
  double fp(double u) const override;
  double fpp(double u) const override;
  const std::vector<double>& coeffs() const { return c_; }

 private:
  std::vector<double> c_;
};

// F(u) = cosh(u) - 1
class CoshFlux final : public ConvexFlux {
 public:
  explicit CoshFlux(Interval working_range = Interval(-2.0, 2.0));
  double f(double u) const override;
  double fp(double u) const override;
  double fpp(double u) const override;
};

// Registry: "burgers", "quartic" (u^4/4), "cosh", "polynomial" (needs coeffs).
FluxPtr make_flux(const std::string& name, const std::vector<double>& coeffs = {},
                  const Interval* working_range = nullptr);

}  // namespace lrnr
