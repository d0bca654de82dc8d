#pragma once

// Nonexpansive operators on R^d: projections, resolvents, relaxations and
// convex combinations. Each operator carries a declared certificate and,
// when it is known analytically, a descriptor of its fixed-point set.

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fixedpoint/functions.hpp"
#include "fixedpoint/sets.hpp"
#include "fixedpoint/space.hpp"

namespace fixedpoint {

/// Declared regularity of an operator. `averaged` with parameter a means
/// T = (1 - a) I + a N for some nonexpansive N; firmly nonexpansive is a = 1/2.
struct Certificate {
  enum class Kind { firmly_nonexpansive, averaged, nonexpansive_only };

  Kind kind = Kind::nonexpansive_only;
  double alpha = 1.0;

  static Certificate firm() { return {Kind::firmly_nonexpansive, 0.5}; }
  static Certificate averaged(double a) { return {Kind::averaged, a}; }
  static Certificate nonexpansive() { return {Kind::nonexpansive_only, 1.0}; }

  /// Firmly nonexpansive and averaged operators are strongly nonexpansive.
  bool strongly_nonexpansive() const noexcept { return kind != Kind::nonexpansive_only; }

  /// Averaging constant; 1 for operators that are only nonexpansive.
  double averaging() const noexcept { return kind == Kind::nonexpansive_only ? 1.0 : alpha; }
};

inline const char* to_string(Certificate::Kind kind) {
  switch (kind) {
    case Certificate::Kind::firmly_nonexpansive: return "firmly_nonexpansive";
    case Certificate::Kind::averaged: return "averaged";
    case Certificate::Kind::nonexpansive_only: return "nonexpansive_only";
  }
  return "unknown";
}

class Operator {
 public:
  using Map = std::function<Vector(const Vector&)>;

  Operator(std::string name, std::size_t dim, Map map, std::optional<ConvexSet> fixed_set,
           Certificate certificate)
      : name_(std::move(name)),
        dim_(dim),
        map_(std::make_shared<const Map>(std::move(map))),
        fixed_set_(std::move(fixed_set)),
        certificate_(certificate) {
    if (dim_ == 0 || dim_ > max_dimension)
      throw std::invalid_argument("operator dimension out of range");
    if (fixed_set_) require_same_dim(dim_, dimension(*fixed_set_));
  }

  Vector operator()(const Vector& x) const {
    require_same_dim(dim_, x.dim());
    return (*map_)(x);
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::optional<ConvexSet>& fixed_set() const noexcept { return fixed_set_; }
  const Certificate& certificate() const noexcept { return certificate_; }

 private:
  std::string name_;
  std::size_t dim_;
  std::shared_ptr<const Map> map_;
  std::optional<ConvexSet> fixed_set_;
  Certificate certificate_;
};

inline Operator identity_operator(std::size_t dim) {
  return Operator("identity", dim, [](const Vector& x) { return x; }, make_whole_space(dim),
                  Certificate::firm());
}

inline Operator projection_operator(ConvexSet set) {
  if (!is_primitive(set))
    throw std::invalid_argument("projection_operator: intersection sets are not supported");
  const std::size_t d = dimension(set);
  return Operator("projection", d, [set](const Vector& x) { return project(set, x); }, set,
                  Certificate::firm());
}

/// Componentwise resolvent J_lambda = (I + lambda df)^{-1}.
inline Vector prox(const ScalarFunction& f, double lambda, const Vector& x) {
  require_positive_lambda(lambda);
  Vector out = x;
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = prox_scalar(f, lambda, x[i]);
  return out;
}

inline Operator prox_operator(ScalarFunction f, double lambda, std::size_t dim) {
  require_positive_lambda(lambda);
  ConvexSet fixed = argmin_set(f, dim);
  return Operator("prox", dim, [f, lambda](const Vector& x) { return prox(f, lambda, x); },
                  std::move(fixed), Certificate::firm());
}

/// Constant map x -> p; its only fixed point is p.
inline Operator constant_operator(const Vector& p) {
  return Operator("constant", p.dim(), [p](const Vector&) { return p; }, make_point(p),
                  Certificate::firm());
}

/// Planar rotation about the origin. An isometry, so never strongly nonexpansive.
inline Operator rotation_operator(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  std::optional<ConvexSet> fixed;
  if (std::abs(std::remainder(angle, 2.0 * M_PI)) > 0.0)
    fixed = make_point(Vector{0.0, 0.0});
  else
    fixed = make_whole_space(2);
  return Operator("rotation", 2,
                  [c, s](const Vector& x) { return Vector{c * x[0] - s * x[1], s * x[0] + c * x[1]}; },
                  std::move(fixed), Certificate::nonexpansive());
}

/// x -> gamma x + (1 - gamma) V x. Shares V's fixed-point set.
inline Operator relax(double gamma, const Operator& v) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("relax: gamma must lie in the open interval (0, 1)");
  // gamma I + (1 - gamma) V is averaged with constant (1 - gamma) * a(V).
  const double a = (1.0 - gamma) * v.certificate().averaging();
  return Operator("relax(" + v.name() + ")", v.dim(),
                  [gamma, v](const Vector& x) { return convex_mix(gamma, x, v(x)); },
                  v.fixed_set(), Certificate::averaged(a));
}

inline constexpr double weight_sum_tol = 1e-12;

/// x -> sum_k w_k T_k x. Strict convexity of the Euclidean norm makes the
/// fixed-point set the intersection of the summands' fixed-point sets.
inline Operator convex_combo(std::vector<double> weights, std::vector<Operator> ops) {
  if (ops.empty()) throw std::invalid_argument("convex_combo: empty operator list");
  if (weights.size() != ops.size())
    throw std::invalid_argument("convex_combo: weight and operator counts differ");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("convex_combo: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > weight_sum_tol)
    throw std::invalid_argument("convex_combo: weights must sum to 1");
  const std::size_t d = ops.front().dim();
  for (const auto& op : ops) require_same_dim(d, op.dim());

  if (ops.size() == 1) {
    const Operator only = ops.front();
    const double w = weights.front();
    return Operator("combo(" + only.name() + ")", d,
                    [only, w](const Vector& x) { return w * only(x); }, only.fixed_set(),
                    only.certificate());
  }

  std::optional<ConvexSet> fixed;
  std::vector<ConvexSet> parts;
  bool all_known = true;
  bool all_firm = true;
  bool all_averaged = true;
  double worst_alpha = 0.0;
  for (const auto& op : ops) {
    if (op.fixed_set())
      parts.push_back(*op.fixed_set());
    else
      all_known = false;
    const auto kind = op.certificate().kind;
    all_firm = all_firm && kind == Certificate::Kind::firmly_nonexpansive;
    all_averaged = all_averaged && op.certificate().strongly_nonexpansive();
    worst_alpha = std::max(worst_alpha, op.certificate().averaging());
  }
  if (all_known) fixed = make_intersection(std::move(parts));

  Certificate cert = Certificate::nonexpansive();
  if (all_firm)
    cert = Certificate::firm();
  else if (all_averaged)
    cert = Certificate::averaged(worst_alpha);

  std::string name = "combo(";
  for (std::size_t k = 0; k < ops.size(); ++k) name += (k ? "," : "") + ops[k].name();
  name += ")";

  return Operator(std::move(name), d,
                  [weights = std::move(weights), ops = std::move(ops)](const Vector& x) {
                    Vector acc = weights[0] * ops[0](x);
                    for (std::size_t k = 1; k < ops.size(); ++k) acc += weights[k] * ops[k](x);
                    return acc;
                  },
                  std::move(fixed), cert);
}

/// Weights (2^-1, ..., 2^-(n-1), 2^-(n-1)): the geometric series with its tail
/// mass folded into the last entry.
inline std::vector<double> geometric_weights(std::size_t n) {
  if (n == 0) throw std::invalid_argument("geometric_weights: n must be >= 1");
  std::vector<double> w(n);
  double p = 1.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    p *= 0.5;
    w[k] = p;
  }
  w[n - 1] = p;
  return w;
}

inline Operator truncated_geometric_combo(std::vector<Operator> ops) {
  if (ops.empty()) throw std::invalid_argument("truncated_geometric_combo: empty operator list");
  auto w = geometric_weights(ops.size());
  return convex_combo(std::move(w), std::move(ops));
}

}  // namespace fixedpoint
