#pragma once

// Closed convex set descriptors and their metric projections.

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fixedpoint/space.hpp"

namespace fixedpoint {

/// { x : <a, x> <= b }, a != 0.
struct Halfspace {
  Vector a;
  double b = 0.0;
};

/// { x : ||x - center|| <= radius }.
struct Ball {
  Vector center;
  double radius = 0.0;
};

/// { x : lo <= x <= hi } componentwise. lo == hi pins a coordinate.
struct Box {
  Vector lo;
  Vector hi;
};

/// { x : <n_i, x - point> = 0 for every normal n_i }, normals orthonormal.
struct Affine {
  Vector point;
  std::vector<Vector> normals;
};

struct Intersection;

using ConvexSet = std::variant<Halfspace, Ball, Box, Affine, Intersection>;

/// Nonemptiness of the intersection is asserted by whoever builds it.
struct Intersection {
  std::vector<ConvexSet> parts;
};

namespace detail {

inline constexpr double orthonormal_tol = 1e-10;

inline std::size_t dim_of(const ConvexSet& set);

struct DimVisitor {
  std::size_t operator()(const Halfspace& h) const { return h.a.dim(); }
  std::size_t operator()(const Ball& b) const { return b.center.dim(); }
  std::size_t operator()(const Box& b) const { return b.lo.dim(); }
  std::size_t operator()(const Affine& s) const { return s.point.dim(); }
  std::size_t operator()(const Intersection& s) const {
    return s.parts.empty() ? 0 : dim_of(s.parts.front());
  }
};

inline std::size_t dim_of(const ConvexSet& set) {
  return std::visit(DimVisitor{}, set);
}

}  // namespace detail

inline std::size_t dimension(const ConvexSet& set) { return detail::dim_of(set); }

inline bool is_primitive(const ConvexSet& set) {
  return !std::holds_alternative<Intersection>(set);
}

/// Halfspaces, boxes and affine sets; balls are the only curved primitive.
inline bool is_polyhedral(const ConvexSet& set) {
  if (std::holds_alternative<Ball>(set)) return false;
  if (const auto* s = std::get_if<Intersection>(&set))
    return std::all_of(s->parts.begin(), s->parts.end(),
                       [](const ConvexSet& p) { return is_polyhedral(p); });
  return true;
}

// Constructors validate the primitive invariants and throw
// std::invalid_argument on violation.

inline ConvexSet make_halfspace(Vector a, double b) {
  if (norm(a) == 0.0) throw std::invalid_argument("halfspace normal must be nonzero");
  if (!std::isfinite(b)) throw std::invalid_argument("halfspace offset must be finite");
  return Halfspace{std::move(a), b};
}

inline ConvexSet make_ball(Vector center, double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("ball radius must be finite and >= 0");
  return Ball{std::move(center), radius};
}

inline ConvexSet make_box(Vector lo, Vector hi) {
  require_same_dim(lo.dim(), hi.dim());
  for (std::size_t i = 0; i < lo.dim(); ++i)
    if (lo[i] > hi[i]) throw std::invalid_argument("box requires lo <= hi componentwise");
  return Box{std::move(lo), std::move(hi)};
}

inline ConvexSet make_affine(Vector point, std::vector<Vector> normals) {
  for (const auto& n : normals) require_same_dim(point.dim(), n.dim());
  for (std::size_t i = 0; i < normals.size(); ++i)
    for (std::size_t j = i; j < normals.size(); ++j) {
      const double expected = (i == j) ? 1.0 : 0.0;
      if (std::abs(inner(normals[i], normals[j]) - expected) > detail::orthonormal_tol)
        throw std::invalid_argument("affine normals must be orthonormal");
    }
  return Affine{std::move(point), std::move(normals)};
}

inline ConvexSet make_point(const Vector& p) { return Box{p, p}; }

inline ConvexSet make_whole_space(std::size_t dim) { return Affine{Vector(dim), {}}; }

inline ConvexSet make_intersection(std::vector<ConvexSet> parts) {
  if (parts.empty()) throw std::invalid_argument("intersection needs at least one set");
  const std::size_t d = dimension(parts.front());
  for (const auto& p : parts) require_same_dim(d, dimension(p));
  return Intersection{std::move(parts)};
}

/// Flattens nested intersections into a list of primitives.
inline void collect_primitives(const ConvexSet& set, std::vector<ConvexSet>& out) {
  if (const auto* s = std::get_if<Intersection>(&set)) {
    for (const auto& p : s->parts) collect_primitives(p, out);
  } else {
    out.push_back(set);
  }
}

inline std::vector<ConvexSet> primitives_of(const ConvexSet& set) {
  std::vector<ConvexSet> out;
  collect_primitives(set, out);
  return out;
}

/// Largest constraint violation of x; zero iff x lies in the set.
inline double violation(const ConvexSet& set, const Vector& x) {
  require_same_dim(dimension(set), x.dim());
  struct V {
    const Vector& x;
    double operator()(const Halfspace& h) const {
      return std::max(0.0, (inner(h.a, x) - h.b) / norm(h.a));
    }
    double operator()(const Ball& b) const {
      return std::max(0.0, distance(x, b.center) - b.radius);
    }
    double operator()(const Box& b) const {
      double worst = 0.0;
      for (std::size_t i = 0; i < x.dim(); ++i)
        worst = std::max({worst, b.lo[i] - x[i], x[i] - b.hi[i]});
      return worst;
    }
    double operator()(const Affine& s) const {
      double worst = 0.0;
      const Vector shifted = x - s.point;
      for (const auto& n : s.normals) worst = std::max(worst, std::abs(inner(n, shifted)));
      return worst;
    }
    double operator()(const Intersection& s) const {
      double worst = 0.0;
      for (const auto& p : s.parts) worst = std::max(worst, violation(p, x));
      return worst;
    }
  };
  return std::visit(V{x}, set);
}

inline bool contains(const ConvexSet& set, const Vector& x, double tol) {
  return violation(set, x) <= tol;
}

/// Metric projection onto a primitive set. Intersections are rejected: their
/// projections are computed by the oracle module.
inline Vector project(const ConvexSet& set, const Vector& x) {
  require_same_dim(dimension(set), x.dim());
  struct P {
    const Vector& x;
    Vector operator()(const Halfspace& h) const {
      const double excess = inner(h.a, x) - h.b;
      if (excess <= 0.0) return x;
      return x - (excess / squared_norm(h.a)) * h.a;
    }
    Vector operator()(const Ball& b) const {
      const Vector offset = x - b.center;
      const double r = norm(offset);
      if (r <= b.radius) return x;
      return b.center + (b.radius / r) * offset;
    }
    Vector operator()(const Box& b) const {
      Vector out = x;
      for (std::size_t i = 0; i < x.dim(); ++i) out[i] = std::clamp(x[i], b.lo[i], b.hi[i]);
      return out;
    }
    Vector operator()(const Affine& s) const {
      Vector out = x;
      const Vector shifted = x - s.point;
      for (const auto& n : s.normals) out -= inner(n, shifted) * n;
      return out;
    }
    Vector operator()(const Intersection&) const {
      throw std::invalid_argument(
          "project: intersection sets need the oracle projection");
    }
  };
  return std::visit(P{x}, set);
}

}  // namespace fixedpoint
