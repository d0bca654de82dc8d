#pragma once

// Euclidean vectors and the handful of primitives every other module is
// written against. The duality mapping of a Hilbert space is the identity,
// so pairings against J(x) are plain inner products here.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fixedpoint {

/// Largest ambient dimension the toolkit accepts.
inline constexpr std::size_t max_dimension = 64;

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(std::size_t lhs, std::size_t rhs)
      : std::invalid_argument("dimension mismatch: " + std::to_string(lhs) +
                              " vs " + std::to_string(rhs)) {}
};

inline void require_same_dim(std::size_t lhs, std::size_t rhs) {
  if (lhs != rhs) throw DimensionMismatch(lhs, rhs);
}

/// A point of R^d with finite coordinates, 1 <= d <= max_dimension.
class Vector {
 public:
  Vector() = default;

  explicit Vector(std::size_t dim, double fill = 0.0) : coords_(dim, fill) {
    check();
  }

  Vector(std::initializer_list<double> values) : coords_(values) { check(); }

  explicit Vector(std::vector<double> values) : coords_(std::move(values)) {
    check();
  }

  static Vector unit(std::size_t dim, std::size_t axis) {
    Vector e(dim);
    e.coords_.at(axis) = 1.0;
    return e;
  }

  std::size_t dim() const noexcept { return coords_.size(); }
  bool empty() const noexcept { return coords_.empty(); }

  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }

  std::span<const double> coords() const noexcept { return coords_; }
  const std::vector<double>& values() const noexcept { return coords_; }

  auto begin() const noexcept { return coords_.begin(); }
  auto end() const noexcept { return coords_.end(); }

  bool all_finite() const noexcept {
    for (double c : coords_)
      if (!std::isfinite(c)) return false;
    return true;
  }

  Vector& operator+=(const Vector& other) {
    require_same_dim(dim(), other.dim());
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += other.coords_[i];
    return *this;
  }

  Vector& operator-=(const Vector& other) {
    require_same_dim(dim(), other.dim());
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= other.coords_[i];
    return *this;
  }

  Vector& operator*=(double s) noexcept {
    for (double& c : coords_) c *= s;
    return *this;
  }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  void check() const {
    if (coords_.empty() || coords_.size() > max_dimension)
      throw std::invalid_argument("vector dimension must be in [1, " +
                                  std::to_string(max_dimension) + "], got " +
                                  std::to_string(coords_.size()));
    if (!all_finite())
      throw std::invalid_argument("vector coordinates must be finite");
  }

  std::vector<double> coords_;
};

inline Vector operator+(Vector lhs, const Vector& rhs) { return lhs += rhs; }
inline Vector operator-(Vector lhs, const Vector& rhs) { return lhs -= rhs; }
inline Vector operator*(double s, Vector v) { return v *= s; }
inline Vector operator*(Vector v, double s) { return v *= s; }
inline Vector operator-(Vector v) { return v *= -1.0; }

inline double inner(const Vector& x, const Vector& y) {
  require_same_dim(x.dim(), y.dim());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) sum += x[i] * y[i];
  return sum;
}

inline double squared_norm(const Vector& x) { return inner(x, x); }

inline double norm(const Vector& x) { return std::sqrt(squared_norm(x)); }

inline double distance(const Vector& x, const Vector& y) {
  require_same_dim(x.dim(), y.dim());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

/// Returns `weight * a + (1 - weight) * b`, evaluated coordinatewise in that
/// exact order so that callers sharing this helper produce identical bits.
inline Vector convex_mix(double weight, const Vector& a, const Vector& b) {
  require_same_dim(a.dim(), b.dim());
  Vector out(a.dim());
  const double rest = 1.0 - weight;
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = weight * a[i] + rest * b[i];
  return out;
}

/// Slack in the subdifferential inequality
///   ||x + y||^2 <= ||x||^2 + 2 <y, J(x + y)>
/// with J the identity. In a Hilbert space the slack equals ||y||^2.
inline double norm_square_inequality_gap(const Vector& x, const Vector& y) {
  require_same_dim(x.dim(), y.dim());
  const Vector sum = x + y;
  return squared_norm(x) + 2.0 * inner(y, sum) - squared_norm(sum);
}

}  // namespace fixedpoint
