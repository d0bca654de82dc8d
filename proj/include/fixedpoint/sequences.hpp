#pragma once

// Operator sequences n -> S_n together with the reference operator T of the
// NST condition and the common fixed-point set F({S_n}).

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fixedpoint/operators.hpp"
#include "fixedpoint/schedule.hpp"

namespace fixedpoint {

/// Convex weights beta_n^k, k = 1..n, for each row n >= 1.
class BetaTable {
 public:
  using Rule = std::function<double(std::size_t n, std::size_t k)>;

  /// beta_n^k = 2^-k for k < n and beta_n^n = 2^-(n-1), so inf_{n>=k} beta_n^k = 2^-k.
  static BetaTable geometric() {
    return BetaTable("geometric", [](std::size_t n, std::size_t k) {
      return std::ldexp(1.0, -static_cast<int>(k < n ? k : n - 1));
    });
  }

  /// Caller-supplied rule; rows are checked for positivity and unit sum up
  /// to `probe_rows`.
  static BetaTable custom(Rule rule, std::size_t probe_rows = 64) {
    BetaTable t("custom", std::move(rule));
    for (std::size_t n = 1; n <= probe_rows; ++n) t.row(n);
    return t;
  }

  std::vector<double> row(std::size_t n) const {
    if (n == 0) throw std::invalid_argument("BetaTable rows are 1-based");
    std::vector<double> r(n);
    double total = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      r[k - 1] = rule_(n, k);
      if (!(r[k - 1] > 0.0 && r[k - 1] <= 1.0))
        throw std::invalid_argument("BetaTable entries must lie in (0, 1]");
      total += r[k - 1];
    }
    if (std::abs(total - 1.0) > weight_sum_tol)
      throw std::invalid_argument("BetaTable row " + std::to_string(n) + " does not sum to 1");
    return r;
  }

  double operator()(std::size_t n, std::size_t k) const { return rule_(n, k); }
  const std::string& name() const noexcept { return name_; }

 private:
  BetaTable(std::string name, Rule rule) : name_(std::move(name)), rule_(std::move(rule)) {}

  std::string name_;
  Rule rule_;
};

struct OperatorSequence {
  /// n is 1-based.
  std::function<Operator(std::size_t)> at;
  Operator nst_target;
  ConvexSet common_fixed_set;
  /// True only for families built from relaxations, resolvents or projections.
  bool sns_certified = false;

  std::size_t dim() const { return nst_target.dim(); }
};

/// S_n = T for every n.
inline OperatorSequence constant_sequence(const Operator& t) {
  if (!t.fixed_set()) throw std::invalid_argument("constant_sequence: operator has no fixed-point set");
  if (!t.certificate().strongly_nonexpansive())
    throw std::invalid_argument(
        "constant_sequence: operator must be certified firmly nonexpansive or averaged");
  return OperatorSequence{[t](std::size_t) { return t; }, t, *t.fixed_set(), true};
}

/// Any user-supplied family. Nothing is certified; check_sns decides empirically.
inline OperatorSequence raw_sequence(std::function<Operator(std::size_t)> at, Operator target,
                                     ConvexSet common_fixed_set) {
  require_same_dim(target.dim(), dimension(common_fixed_set));
  return OperatorSequence{std::move(at), std::move(target), std::move(common_fixed_set), false};
}

/// S_n = J_{lambda_n}, the resolvent of df with step lambda_n; target J_1.
inline OperatorSequence resolvent_sequence(const ScalarFunction& f, const Schedule& lambdas,
                                           std::size_t dim) {
  require_role(lambdas, ScheduleRole::lambda);
  return OperatorSequence{
      [f, lambdas, dim](std::size_t n) { return prox_operator(f, lambdas(n), dim); },
      prox_operator(f, 1.0, dim), argmin_set(f, dim), true};
}

/// Row n of the beta table restricted to m operators: mass on indices above
/// m is added to the last operator. Only the first m entries of the row are
/// evaluated, so the cost does not grow with n.
inline std::vector<double> folded_beta_row(const BetaTable& beta, std::size_t n, std::size_t m) {
  if (m == 0) throw std::invalid_argument("folded_beta_row: m must be >= 1");
  if (n <= m) return beta.row(n);
  std::vector<double> folded(m);
  double head = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    folded[k - 1] = beta(n, k);
    if (!(folded[k - 1] > 0.0 && folded[k - 1] <= 1.0))
      throw std::invalid_argument("BetaTable entries must lie in (0, 1]");
    head += folded[k - 1];
  }
  folded[m - 1] = 1.0 - head;
  if (!(folded[m - 1] > 0.0)) throw std::invalid_argument("BetaTable row leaves no mass for the tail");
  return folded;
}

/// S_n = gamma_n I + (1 - gamma_n) sum_k beta_n^k T_k, target sum_k T_k / 2^k
/// (truncated at m with the tail folded).
inline OperatorSequence cfp_sequence(std::vector<Operator> ops, BetaTable beta,
                                     const Schedule& gamma) {
  if (ops.empty()) throw std::invalid_argument("cfp_sequence: empty operator list");
  require_role(gamma, ScheduleRole::gamma);
  const std::size_t d = ops.front().dim();
  std::vector<ConvexSet> parts;
  for (const auto& op : ops) {
    require_same_dim(d, op.dim());
    if (!op.fixed_set())
      throw std::invalid_argument("cfp_sequence: every operator needs a fixed-point set");
    parts.push_back(*op.fixed_set());
  }
  ConvexSet common = parts.size() == 1 ? parts.front() : make_intersection(std::move(parts));
  Operator target = truncated_geometric_combo(ops);

  auto at = [ops, beta = std::move(beta), gamma](std::size_t n) {
    const std::size_t m = ops.size();
    std::vector<double> w = folded_beta_row(beta, n, m);
    std::vector<Operator> used(ops.begin(), ops.begin() + static_cast<std::ptrdiff_t>(w.size()));
    return relax(gamma(n), convex_combo(std::move(w), std::move(used)));
  };
  return OperatorSequence{std::move(at), std::move(target), std::move(common), true};
}

}  // namespace fixedpoint
