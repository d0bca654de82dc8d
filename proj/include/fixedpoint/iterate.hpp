#pragma once

// Anchored fixed-point iterations:
//
//   halpern           x_{n+1} = a_n u        + (1 - a_n) S_n x_n
//   viscosity         y_{n+1} = a_n f_n(y_n) + (1 - a_n) S_n y_n
//   proximal_halpern  halpern over S_n = J_{lambda_n}
//   cfp_halpern       halpern over S_n = g_n I + (1 - g_n) sum_k b_n^k T_k
//
// and the implicit anchor path z_t = t u + (1 - t) T z_t. Every driver is
// deterministic and returns a full diagnostic trace.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fixedpoint/sequences.hpp"

namespace fixedpoint {

struct StopRule {
  std::size_t max_iters = 1'000'000;
  /// Applied to ||x_n - T x_n||, T the sequence's NST target.
  double residual_tol = 1e-10;
  /// Applied to ||x_n - ref|| when a reference limit is supplied; it then
  /// replaces the residual test.
  std::optional<double> target_tol;
  /// Iterates are stored every `stride` steps (plus the first and last).
  std::size_t stride = 100;

  void validate() const {
    if (max_iters < 1) throw std::invalid_argument("StopRule: max_iters must be >= 1");
    if (!(residual_tol > 0.0)) throw std::invalid_argument("StopRule: residual_tol must be > 0");
    if (target_tol && !(*target_tol > 0.0))
      throw std::invalid_argument("StopRule: target_tol must be > 0");
    if (stride < 1) throw std::invalid_argument("StopRule: stride must be >= 1");
  }
};

enum class StopReason { residual_met, target_met, max_iters };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::residual_met: return "residual_met";
    case StopReason::target_met: return "target_met";
    case StopReason::max_iters: return "max_iters";
  }
  return "unknown";
}

/// Per-step diagnostics. Entry i of the scalar lists belongs to n = i + 1.
struct IterationTrace {
  std::vector<std::size_t> iterate_indices;
  std::vector<Vector> iterates;
  std::vector<double> residual_S;
  std::vector<double> residual_T;
  std::vector<double> dist_to_ref;  // empty when no reference was given
  Vector final_iterate;
  StopReason stop_reason = StopReason::max_iters;

  std::size_t iterations() const noexcept { return residual_S.size(); }
};

/// Called with (n, x_n) at every step before the update.
using StepObserver = std::function<void(std::size_t, const Vector&)>;

/// f_n with a contraction constant theta < 1, either globally or only
/// against points of the fixed-point set.
struct ContractionFamily {
  enum class Scope { global, with_respect_to_F };

  std::function<Vector(std::size_t, const Vector&)> at;
  double theta = 0.0;
  Scope scope = Scope::global;
  /// Pointwise limit of f_n as n -> infinity, used to locate the limit of
  /// the iteration (the fixed point of Q composed with it).
  std::function<Vector(const Vector&)> limit;

  /// f_n(x) = u for every n: reduces viscosity to halpern.
  static ContractionFamily constant(const Vector& u) {
    auto f = [u](const Vector&) { return u; };
    return {[u](std::size_t, const Vector&) { return u; }, 0.0, Scope::global, f};
  }

  /// f_n(x) = u_n, a sequence of anchors converging to u_limit.
  static ContractionFamily anchors(std::function<Vector(std::size_t)> u_n, const Vector& u_limit) {
    return {[u_n = std::move(u_n)](std::size_t n, const Vector&) { return u_n(n); }, 0.0,
            Scope::global, [u_limit](const Vector&) { return u_limit; }};
  }

  /// f_n(x) = theta x + offset.
  static ContractionFamily affine(double theta, const Vector& offset) {
    if (!(theta >= 0.0 && theta < 1.0))
      throw std::invalid_argument("affine contraction: theta must lie in [0, 1)");
    auto f = [theta, offset](const Vector& x) { return theta * x + offset; };
    return {[f](std::size_t, const Vector& x) { return f(x); }, theta, Scope::global, f};
  }
};

namespace detail {

template <class Anchor>
IterationTrace run_anchored(const OperatorSequence& seq, Anchor&& anchor, const Vector& x1,
                            const Schedule& alpha, const StopRule& stop,
                            const std::optional<Vector>& ref, const StepObserver& observer) {
  require_role(alpha, ScheduleRole::alpha);
  stop.validate();
  require_same_dim(seq.dim(), x1.dim());
  if (ref) require_same_dim(seq.dim(), ref->dim());

  IterationTrace trace;
  const std::size_t reserve = std::min<std::size_t>(stop.max_iters, 1u << 20);
  trace.residual_S.reserve(reserve);
  trace.residual_T.reserve(reserve);
  if (ref) trace.dist_to_ref.reserve(reserve);

  Vector x = x1;
  for (std::size_t n = 1;; ++n) {
    if (observer) observer(n, x);
    const Operator s_n = seq.at(n);
    const Vector sx = s_n(x);
    const double res_s = distance(x, sx);
    const double res_t = distance(x, seq.nst_target(x));
    trace.residual_S.push_back(res_s);
    trace.residual_T.push_back(res_t);
    std::optional<double> dist;
    if (ref) {
      dist = distance(x, *ref);
      trace.dist_to_ref.push_back(*dist);
    }

    std::optional<StopReason> reason;
    if (dist && stop.target_tol) {
      if (*dist <= *stop.target_tol) reason = StopReason::target_met;
    } else if (res_t <= stop.residual_tol) {
      reason = StopReason::residual_met;
    }
    if (!reason && n >= stop.max_iters) reason = StopReason::max_iters;

    if (n == 1 || n % stop.stride == 0 || reason) {
      trace.iterate_indices.push_back(n);
      trace.iterates.push_back(x);
    }
    if (reason) {
      trace.stop_reason = *reason;
      trace.final_iterate = x;
      return trace;
    }

    const double a = alpha(n);
    x = convex_mix(a, anchor(n, x), sx);
  }
}

}  // namespace detail

/// x_{n+1} = alpha_n u + (1 - alpha_n) S_n x_n.
inline IterationTrace halpern(const OperatorSequence& seq, const Vector& u, const Vector& x1,
                              const Schedule& alpha, const StopRule& stop,
                              const std::optional<Vector>& ref = std::nullopt,
                              const StepObserver& observer = {}) {
  require_same_dim(seq.dim(), u.dim());
  return detail::run_anchored(
      seq, [&u](std::size_t, const Vector&) -> const Vector& { return u; }, x1, alpha, stop, ref,
      observer);
}

/// y_{n+1} = alpha_n f_n(y_n) + (1 - alpha_n) S_n y_n.
inline IterationTrace viscosity(const OperatorSequence& seq, const ContractionFamily& f,
                                const Vector& y1, const Schedule& alpha, const StopRule& stop,
                                const std::optional<Vector>& ref = std::nullopt,
                                const StepObserver& observer = {}) {
  if (!(f.theta >= 0.0 && f.theta < 1.0))
    throw std::invalid_argument("viscosity: contraction constant theta must lie in [0, 1)");
  if (!f.at) throw std::invalid_argument("viscosity: empty contraction family");
  return detail::run_anchored(
      seq, [&f](std::size_t n, const Vector& y) { return f.at(n, y); }, y1, alpha, stop, ref,
      observer);
}

/// Halpern over the resolvents of df; the limit is the projection of u onto argmin f.
inline IterationTrace proximal_halpern(const ScalarFunction& f, const Schedule& lambdas,
                                       const Vector& u, const Vector& x1, const Schedule& alpha,
                                       const StopRule& stop,
                                       const std::optional<Vector>& ref = std::nullopt) {
  return halpern(resolvent_sequence(f, lambdas, u.dim()), u, x1, alpha, stop, ref);
}

/// Halpern over relaxed convex combinations of T_1..T_m; the limit is the
/// projection of u onto the common fixed-point set.
inline IterationTrace cfp_halpern(std::vector<Operator> ops, BetaTable beta,
                                  const Schedule& gamma, const Vector& u, const Vector& x1,
                                  const Schedule& alpha, const StopRule& stop,
                                  const std::optional<Vector>& ref = std::nullopt) {
  return halpern(cfp_sequence(std::move(ops), std::move(beta), gamma), u, x1, alpha, stop, ref);
}

/// Solves z = t u + (1 - t) T z by iterating that map, a (1 - t)-contraction,
/// until the equation residual is below tol.
inline Vector anchor_point(const Operator& t_op, const Vector& u, double t, double tol) {
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("anchor_point: t must lie in (0, 1)");
  if (!(tol > 0.0)) throw std::invalid_argument("anchor_point: tol must be > 0");
  require_same_dim(t_op.dim(), u.dim());

  auto step = [&](const Vector& z) { return convex_mix(t, u, t_op(z)); };
  Vector z = u;
  Vector next = step(z);
  const double r0 = distance(z, next);
  if (r0 <= tol) return z;
  // Residuals shrink at least by (1 - t) per step.
  const double needed = std::log(tol / r0) / std::log1p(-t);
  const auto cap = static_cast<std::size_t>(std::ceil(needed)) + 64;
  for (std::size_t k = 0; k < cap; ++k) {
    z = std::move(next);
    next = step(z);
    if (distance(z, next) <= tol) return z;
  }
  throw std::runtime_error("anchor_point: residual did not reach tol (t = " + std::to_string(t) +
                           ")");
}

/// anchor_point along a decreasing list of t values; entry i belongs to t_values[i].
inline std::vector<Vector> anchor_path(const Operator& t_op, const Vector& u,
                                       const std::vector<double>& t_values, double tol) {
  if (t_values.empty()) throw std::invalid_argument("anchor_path: empty t list");
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    if (!(t_values[i] > 0.0 && t_values[i] < 1.0))
      throw std::invalid_argument("anchor_path: t values must lie in (0, 1)");
    if (i > 0 && !(t_values[i] < t_values[i - 1]))
      throw std::invalid_argument("anchor_path: t values must be strictly decreasing");
  }
  std::vector<Vector> path;
  path.reserve(t_values.size());
  for (double t : t_values) path.push_back(anchor_point(t_op, u, t, tol));
  return path;
}

/// z_t at the smallest t, an approximation of the projection of u onto F(T).
inline Vector anchor_limit(const Operator& t_op, const Vector& u,
                           const std::vector<double>& t_values, double tol) {
  return anchor_path(t_op, u, t_values, tol).back();
}

}  // namespace fixedpoint
