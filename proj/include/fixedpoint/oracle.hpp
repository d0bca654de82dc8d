#pragma once

// Ground-truth computations used to certify iteration limits: metric
// projections onto intersections (active-set enumeration cross-checked by
// Dykstra's algorithm) and scalar resolvents by direct minimization. None of
// this code calls into the iteration drivers.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fixedpoint/functions.hpp"
#include "fixedpoint/report.hpp"
#include "fixedpoint/sets.hpp"
#include "fixedpoint/space.hpp"

namespace fixedpoint {

enum class OracleMethod { active_set_enumeration, dykstra, scalar_minimization, contraction_iteration };

inline const char* to_string(OracleMethod m) {
  switch (m) {
    case OracleMethod::active_set_enumeration: return "active_set_enumeration";
    case OracleMethod::dykstra: return "dykstra";
    case OracleMethod::scalar_minimization: return "scalar_minimization";
    case OracleMethod::contraction_iteration: return "contraction_iteration";
  }
  return "unknown";
}

struct OracleResult {
  Vector value;
  OracleMethod method = OracleMethod::dykstra;
  double certified_tol = 0.0;
  /// True when two independent methods produced the value and agreed.
  bool certified = false;
  double kkt_residual = 0.0;
  /// Distance between the enumeration and Dykstra answers (0 if single-method).
  double cross_check_gap = 0.0;
};

class EmptyIntersection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OracleDisagreement : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleOptions {
  std::size_t max_enumeration_dim = 8;
  std::size_t max_enumeration_sets = 6;
  std::size_t max_inequalities = 16;
  double feasibility_tol = 1e-10;
  double agreement_tol = 1e-8;
  std::size_t dykstra_max_cycles = 2'000'000;
  double dykstra_step_tol = 1e-15;
  double dykstra_feasibility_tol = 1e-8;
};

struct DykstraResult {
  Vector value;
  std::size_t cycles = 0;
  double max_violation = 0.0;
};

/// Dykstra's cyclic projections with correction terms. Converges to the
/// metric projection of u onto the intersection (plain cyclic projections
/// only reach some point of it).
inline DykstraResult dykstra(const std::vector<ConvexSet>& primitives, const Vector& u,
                             const OracleOptions& opt = {}) {
  if (primitives.empty()) throw std::invalid_argument("dykstra: no sets");
  for (const auto& s : primitives) require_same_dim(dimension(s), u.dim());
  if (primitives.size() == 1) {
    Vector x = project(primitives.front(), u);
    return {x, 1, violation(primitives.front(), x)};
  }

  const std::size_t m = primitives.size();
  std::vector<Vector> corrections(m, Vector(u.dim()));
  Vector x = u;
  const double scale = 1.0 + norm(u);
  DykstraResult out{x, 0, 0.0};
  for (std::size_t cycle = 1; cycle <= opt.dykstra_max_cycles; ++cycle) {
    double moved = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      Vector y = x + corrections[i];
      Vector next = project(primitives[i], y);
      Vector next_corr = y - next;
      moved = std::max(moved, distance(next_corr, corrections[i]));
      moved = std::max(moved, distance(next, x));
      corrections[i] = std::move(next_corr);
      x = std::move(next);
    }
    out.cycles = cycle;
    if (moved <= opt.dykstra_step_tol * scale) break;
  }
  double worst = 0.0;
  for (const auto& s : primitives) worst = std::max(worst, violation(s, x));
  out.value = x;
  out.max_violation = worst;
  return out;
}

namespace detail {

struct LinearConstraints {
  // Rows of A with right-hand sides; equalities first.
  std::vector<Vector> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<Vector> ineq_rows;
  std::vector<double> ineq_rhs;
};

inline LinearConstraints polyhedral_constraints(const std::vector<ConvexSet>& primitives,
                                                std::size_t d) {
  LinearConstraints lc;
  for (const auto& s : primitives) {
    if (const auto* h = std::get_if<Halfspace>(&s)) {
      const double n = norm(h->a);
      lc.ineq_rows.push_back((1.0 / n) * h->a);
      lc.ineq_rhs.push_back(h->b / n);
    } else if (const auto* b = std::get_if<Box>(&s)) {
      for (std::size_t i = 0; i < d; ++i) {
        const Vector e = Vector::unit(d, i);
        if (b->lo[i] == b->hi[i]) {
          lc.eq_rows.push_back(e);
          lc.eq_rhs.push_back(b->lo[i]);
        } else {
          lc.ineq_rows.push_back(e);
          lc.ineq_rhs.push_back(b->hi[i]);
          lc.ineq_rows.push_back(-e);
          lc.ineq_rhs.push_back(-b->lo[i]);
        }
      }
    } else if (const auto* a = std::get_if<Affine>(&s)) {
      for (const auto& n : a->normals) {
        lc.eq_rows.push_back(n);
        lc.eq_rhs.push_back(inner(n, a->point));
      }
    } else {
      throw std::invalid_argument("polyhedral_constraints: non-polyhedral set");
    }
  }
  return lc;
}

struct EnumerationResult {
  Vector value;
  double kkt_residual = 0.0;
};

/// Projection onto { A_eq x = b_eq, A_in x <= b_in } by trying every active
/// subset of inequalities and keeping the nearest feasible candidate.
inline std::optional<EnumerationResult> enumerate_active_sets(const LinearConstraints& lc,
                                                              const Vector& u,
                                                              double feas_tol) {
  const std::size_t d = u.dim();
  const std::size_t n_in = lc.ineq_rows.size();
  const std::size_t n_eq = lc.eq_rows.size();
  Eigen::VectorXd uu = Eigen::Map<const Eigen::VectorXd>(u.coords().data(), static_cast<Eigen::Index>(d));

  std::optional<EnumerationResult> best;
  double best_dist = INFINITY;
  const double scale = 1.0 + norm(u);

  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n_in); ++mask) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n_in; ++i)
      if (mask & (std::uint64_t{1} << i)) active.push_back(i);
    const std::size_t rows = n_eq + active.size();

    Eigen::VectorXd x = uu;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(rows));
    if (rows > 0) {
      for (std::size_t r = 0; r < n_eq; ++r) {
        for (std::size_t c = 0; c < d; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = lc.eq_rows[r][c];
        rhs(static_cast<Eigen::Index>(r)) = lc.eq_rhs[r];
      }
      for (std::size_t a = 0; a < active.size(); ++a) {
        const auto r = static_cast<Eigen::Index>(n_eq + a);
        for (std::size_t c = 0; c < d; ++c) m(r, static_cast<Eigen::Index>(c)) = lc.ineq_rows[active[a]][c];
        rhs(r) = lc.ineq_rhs[active[a]];
      }
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
      const Eigen::VectorXd step = cod.solve(m * uu - rhs);
      x = uu - step;
      if ((m * x - rhs).cwiseAbs().maxCoeff() > feas_tol * scale) continue;  // inconsistent
    }

    bool feasible = true;
    for (std::size_t i = 0; i < n_in && feasible; ++i) {
      double ax = 0.0;
      for (std::size_t c = 0; c < d; ++c) ax += lc.ineq_rows[i][c] * x(static_cast<Eigen::Index>(c));
      feasible = ax - lc.ineq_rhs[i] <= feas_tol * scale;
    }
    if (!feasible) continue;

    const double dist = (x - uu).norm();
    if (dist < best_dist) {
      best_dist = dist;
      // KKT: u - x = A_active^T mu with mu >= 0 on inequality rows.
      double kkt = 0.0;
      if (rows > 0) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_t(m.transpose());
        const Eigen::VectorXd mu = cod_t.solve(uu - x);
        kkt = (m.transpose() * mu - (uu - x)).norm();
        for (std::size_t a = 0; a < active.size(); ++a)
          kkt = std::max(kkt, -mu(static_cast<Eigen::Index>(n_eq + a)));
      }
      std::vector<double> coords(d);
      for (std::size_t c = 0; c < d; ++c) coords[c] = x(static_cast<Eigen::Index>(c));
      best = EnumerationResult{Vector(std::move(coords)), kkt};
    }
  }
  return best;
}

}  // namespace detail

/// Metric projection of u onto the intersection of `sets`.
///
/// Polyhedral inputs small enough for enumeration are solved twice, by
/// active-set enumeration and by Dykstra, and the two answers must agree to
/// `agreement_tol`; such results are tagged certified. Anything else falls
/// back to Dykstra alone and is tagged uncertified.
inline OracleResult project_intersection_oracle(const std::vector<ConvexSet>& sets,
                                                const Vector& u, const OracleOptions& opt = {}) {
  if (sets.empty()) throw std::invalid_argument("project_intersection_oracle: no sets");
  std::vector<ConvexSet> prims;
  for (const auto& s : sets) {
    require_same_dim(dimension(s), u.dim());
    collect_primitives(s, prims);
  }

  const DykstraResult dyk = dykstra(prims, u, opt);
  if (dyk.max_violation > opt.dykstra_feasibility_tol)
    throw EmptyIntersection("intersection appears empty: Dykstra residual " +
                            std::to_string(dyk.max_violation));

  const bool polyhedral =
      std::all_of(prims.begin(), prims.end(), [](const ConvexSet& s) { return is_polyhedral(s); });
  if (polyhedral && u.dim() <= opt.max_enumeration_dim && prims.size() <= opt.max_enumeration_sets) {
    const auto lc = detail::polyhedral_constraints(prims, u.dim());
    if (lc.ineq_rows.size() <= opt.max_inequalities) {
      const auto en = detail::enumerate_active_sets(lc, u, opt.feasibility_tol);
      if (!en) throw EmptyIntersection("active-set enumeration found no feasible candidate");
      const double gap = distance(en->value, dyk.value);
      if (gap > opt.agreement_tol)
        throw OracleDisagreement("enumeration and Dykstra disagree by " + std::to_string(gap));
      return OracleResult{en->value, OracleMethod::active_set_enumeration,
                          std::max(gap, opt.feasibility_tol), true, en->kkt_residual, gap};
    }
  }
  return OracleResult{dyk.value, OracleMethod::dykstra,
                      std::max(dyk.max_violation, opt.dykstra_step_tol * (1.0 + norm(u))), false,
                      dyk.max_violation, 0.0};
}

inline OracleResult project_intersection_oracle(const ConvexSet& set, const Vector& u,
                                                const OracleOptions& opt = {}) {
  return project_intersection_oracle(std::vector<ConvexSet>{set}, u, opt);
}

/// Projection onto any descriptor: closed form for primitives, Dykstra for
/// intersections. Used where a certified value is not needed (sampling).
inline Vector project_any(const ConvexSet& set, const Vector& x, const OracleOptions& opt = {}) {
  if (is_primitive(set)) return project(set, x);
  DykstraResult r = dykstra(primitives_of(set), x, opt);
  if (r.max_violation > opt.dykstra_feasibility_tol)
    throw EmptyIntersection("intersection appears empty: Dykstra residual " +
                            std::to_string(r.max_violation));
  return std::move(r.value);
}

/// argmin_z lambda f(z) + (z - x)^2 / 2 by grid search and golden-section
/// refinement. Candidates are compared through an analytically expanded
/// objective difference, so ties are resolved well below sqrt(eps).
inline double prox_scalar_oracle(const ScalarFunction& f, double lambda, double x) {
  require_positive_lambda(lambda);
  // phi(z1) - phi(z2) without forming phi itself.
  auto diff = [&](double z1, double z2) {
    double df = 0.0;
    if (std::holds_alternative<AbsValue>(f)) {
      df = std::abs(z1) - std::abs(z2);
    } else if (const auto* q = std::get_if<Quadratic>(&f)) {
      df = 0.5 * q->curvature * (z1 - z2) * (z1 + z2 - 2.0 * q->center);
    }
    return lambda * df + 0.5 * (z1 - z2) * (z1 + z2 - 2.0 * x);
  };

  double lo = 0.0;
  double hi = 0.0;
  if (const auto* s = std::get_if<Indicator>(&f)) {
    lo = s->lo;
    hi = s->hi;
  } else {
    const double c = std::holds_alternative<AbsValue>(f) ? 0.0 : std::get<Quadratic>(f).center;
    lo = std::min(x, c) - 1.0;
    hi = std::max(x, c) + 1.0;
  }
  if (lo == hi) return lo;

  constexpr int grid = 256;
  const double h = (hi - lo) / grid;
  int best = 0;
  for (int i = 1; i <= grid; ++i)
    if (diff(lo + i * h, lo + best * h) < 0.0) best = i;
  double a = lo + std::max(0, best - 1) * h;
  double b = lo + std::min(grid, best + 1) * h;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  const double width_tol = 1e-13 * std::max(1.0, std::abs(x));
  while (b - a > width_tol) {
    if (diff(c, d) < 0.0) {
      b = d;
      d = c;
      c = b - inv_phi * (b - a);
    } else {
      a = c;
      c = d;
      d = a + inv_phi * (b - a);
    }
  }
  return 0.5 * (a + b);
}

/// Fixed point of z -> Q(f(z)), Q the projection onto `set`, by plain
/// iteration of the composed contraction.
inline Vector contraction_fixed_point_oracle(const ConvexSet& set,
                                             const std::function<Vector(const Vector&)>& f,
                                             double theta, const Vector& start, double tol = 1e-14,
                                             std::size_t max_iters = 1'000'000) {
  if (!(theta >= 0.0 && theta < 1.0))
    throw std::invalid_argument("contraction_fixed_point_oracle: theta must lie in [0, 1)");
  Vector z = start;
  for (std::size_t k = 0; k < max_iters; ++k) {
    Vector next = project_any(set, f(z));
    const double step = distance(next, z);
    z = std::move(next);
    if (step <= tol * (1.0 + norm(z))) break;
  }
  return z;
}

/// Points of `set` obtained by projecting uniform draws from the cube
/// around `center` with half-width `radius`.
inline std::vector<Vector> sample_points(const ConvexSet& set, std::mt19937_64& rng,
                                         std::size_t count, const Vector& center, double radius) {
  require_same_dim(dimension(set), center.dim());
  std::uniform_real_distribution<double> unif(-radius, radius);
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vector x = center;
    for (std::size_t c = 0; c < x.dim(); ++c) x[c] += unif(rng);
    out.push_back(project_any(set, x));
  }
  return out;
}

/// Checks <u - q, z - q> <= tol for points z of `set`: the variational
/// inequality that characterizes q as the projection of u. `extra_points`
/// are tested in addition to the random samples.
inline ProbeReport variational_inequality_check(const Vector& u, const Vector& q,
                                                const ConvexSet& set, std::size_t samples,
                                                std::uint64_t seed, double tol = 1e-10,
                                                const std::vector<Vector>& extra_points = {}) {
  if (samples < 1) throw std::invalid_argument("variational_inequality_check: samples must be >= 1");
  require_same_dim(u.dim(), q.dim());
  ProbeReport report;
  report.property = "variational_inequality";
  report.tolerance = tol;
  report.seed = seed;

  std::mt19937_64 rng(seed);
  const double radius = 2.0 * (1.0 + distance(u, q) + norm(q));
  std::vector<Vector> points;
  try {
    points = sample_points(set, rng, samples, q, radius);
  } catch (const std::exception& e) {
    report.rejected = true;
    report.note = std::string("cannot sample the set: ") + e.what();
    report.finalize();
    return report;
  }
  points.insert(points.end(), extra_points.begin(), extra_points.end());

  const Vector dir = u - q;
  double worst = -INFINITY;
  for (const auto& z : points) {
    const double v = inner(dir, z - q);
    if (v > worst) {
      worst = v;
      report.witness = std::make_pair(q, z);
    }
  }
  report.trials = points.size();
  report.worst_violation = std::max(0.0, worst);
  report.finalize();
  return report;
}

}  // namespace fixedpoint
