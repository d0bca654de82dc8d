#pragma once

// Separable scalar convex functions f whose subdifferentials play the role of
// the monotone operator A in resolvent iterations. Applied componentwise.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <variant>

#include "fixedpoint/sets.hpp"

namespace fixedpoint {

/// f(z) = |z|.
struct AbsValue {};

/// f(z) = curvature/2 * (z - center)^2.
struct Quadratic {
  double curvature = 1.0;
  double center = 0.0;
};

/// f(z) = 0 on [lo, hi], +inf elsewhere.
struct Indicator {
  double lo = 0.0;
  double hi = 1.0;
};

using ScalarFunction = std::variant<AbsValue, Quadratic, Indicator>;

inline ScalarFunction make_quadratic(double curvature, double center) {
  if (!(curvature > 0.0) || !std::isfinite(curvature))
    throw std::invalid_argument("quadratic curvature must be > 0");
  if (!std::isfinite(center)) throw std::invalid_argument("quadratic center must be finite");
  return Quadratic{curvature, center};
}

inline ScalarFunction make_indicator(double lo, double hi) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("indicator interval must be nonempty and finite");
  return Indicator{lo, hi};
}

inline void require_positive_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("resolvent parameter lambda must be > 0");
}

/// Closed-form resolvent (1 + lambda * df)^{-1} of a scalar function.
inline double prox_scalar(const ScalarFunction& f, double lambda, double x) {
  require_positive_lambda(lambda);
  struct R {
    double lambda, x;
    double operator()(const AbsValue&) const {
      if (x > lambda) return x - lambda;
      if (x < -lambda) return x + lambda;
      return 0.0;
    }
    double operator()(const Quadratic& q) const {
      return (x + lambda * q.curvature * q.center) / (1.0 + lambda * q.curvature);
    }
    double operator()(const Indicator& s) const { return std::clamp(x, s.lo, s.hi); }
  };
  return std::visit(R{lambda, x}, f);
}

/// Minimizer interval of the scalar function.
inline std::pair<double, double> scalar_argmin(const ScalarFunction& f) {
  struct A {
    std::pair<double, double> operator()(const AbsValue&) const { return {0.0, 0.0}; }
    std::pair<double, double> operator()(const Quadratic& q) const {
      return {q.center, q.center};
    }
    std::pair<double, double> operator()(const Indicator& s) const { return {s.lo, s.hi}; }
  };
  return std::visit(A{}, f);
}

/// Zero set of the separable subdifferential in R^dim, i.e. F(J_lambda).
inline ConvexSet argmin_set(const ScalarFunction& f, std::size_t dim) {
  const auto [lo, hi] = scalar_argmin(f);
  return make_box(Vector(dim, lo), Vector(dim, hi));
}

}  // namespace fixedpoint
