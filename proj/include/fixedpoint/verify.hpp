#pragma once

// Empirical certification of operator properties (nonexpansiveness, strong
// nonexpansiveness of sequences, the NST condition) and finite-window
// versions of the scalar sequence lemmas the convergence proofs rest on.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fixedpoint/oracle.hpp"
#include "fixedpoint/report.hpp"
#include "fixedpoint/schedule.hpp"
#include "fixedpoint/sequences.hpp"

namespace fixedpoint {

class HypothesisViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline Vector random_point(std::mt19937_64& rng, std::size_t dim, double radius) {
  std::uniform_real_distribution<double> unif(-radius, radius);
  Vector x(dim);
  for (std::size_t i = 0; i < dim; ++i) x[i] = unif(rng);
  return x;
}

inline ProbeReport make_report(std::string property, double tol, std::uint64_t seed) {
  ProbeReport r;
  r.property = std::move(property);
  r.tolerance = tol;
  r.seed = seed;
  return r;
}

// Applies `measure(x, y)` to random pairs and keeps the worst value.
template <class Measure>
ProbeReport probe_pairs(std::string property, std::size_t dim, std::uint64_t seed,
                        std::size_t trials, double radius, double tol, Measure&& measure) {
  ProbeReport r = make_report(std::move(property), tol, seed);
  std::mt19937_64 rng(seed);
  r.worst_violation = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const Vector x = random_point(rng, dim, radius);
    const Vector y = random_point(rng, dim, radius);
    const double v = measure(x, y);
    if (v > r.worst_violation || !r.witness) {
      r.worst_violation = std::max(r.worst_violation, v);
      r.witness = std::make_pair(x, y);
    }
  }
  r.trials = trials;
  r.finalize();
  return r;
}

}  // namespace detail

/// ||Tx - Ty|| <= ||x - y||.
inline ProbeReport probe_nonexpansive(const Operator& op, std::uint64_t seed,
                                      std::size_t trials = 1000, double radius = 10.0,
                                      double tol = 1e-10) {
  return detail::probe_pairs("nonexpansive", op.dim(), seed, trials, radius, tol,
                             [&](const Vector& x, const Vector& y) {
                               return distance(op(x), op(y)) - distance(x, y);
                             });
}

/// ||Tx - Ty||^2 <= <Tx - Ty, x - y>.
inline ProbeReport probe_firmly_nonexpansive(const Operator& op, std::uint64_t seed,
                                             std::size_t trials = 1000, double radius = 10.0,
                                             double tol = 1e-10) {
  return detail::probe_pairs("firmly_nonexpansive", op.dim(), seed, trials, radius, tol,
                             [&](const Vector& x, const Vector& y) {
                               const Vector d = op(x) - op(y);
                               return squared_norm(d) - inner(d, x - y);
                             });
}

/// Slack in ||Sx - Sy||^2 <= ||x - y||^2 - ((1 - a) / a) ||(I - S)x - (I - S)y||^2,
/// the quantitative form of the averaged property with constant a.
inline double averaged_violation(const Operator& op, double a, const Vector& x, const Vector& y) {
  const Vector sx = op(x);
  const Vector sy = op(y);
  const Vector disp = (x - sx) - (y - sy);
  return squared_norm(sx - sy) - squared_norm(x - y) + ((1.0 - a) / a) * squared_norm(disp);
}

inline ProbeReport probe_averaged(const Operator& op, std::uint64_t seed,
                                  std::size_t trials = 1000, double radius = 10.0,
                                  double tol = 1e-10) {
  if (!op.certificate().strongly_nonexpansive())
    throw std::invalid_argument("probe_averaged: operator carries no averaged certificate");
  const double a = op.certificate().averaging();
  return detail::probe_pairs(
      "averaged", op.dim(), seed, trials, radius, tol,
      [&](const Vector& x, const Vector& y) { return averaged_violation(op, a, x, y); });
}

/// Sampled points of the declared fixed-point set are fixed by the operator.
inline ProbeReport probe_fixed_set(const Operator& op, std::uint64_t seed,
                                   std::size_t samples = 200, double radius = 10.0,
                                   double tol = 1e-12) {
  if (!op.fixed_set()) throw std::invalid_argument("probe_fixed_set: no declared fixed-point set");
  ProbeReport r = detail::make_report("fixed_set", tol, seed);
  std::mt19937_64 rng(seed);
  for (const auto& z : sample_points(*op.fixed_set(), rng, samples, Vector(op.dim()), radius)) {
    const double v = distance(op(z), z);
    if (v >= r.worst_violation) {
      r.worst_violation = v;
      r.witness = std::make_pair(z, op(z));
    }
  }
  r.trials = samples;
  r.finalize();
  return r;
}

/// Sampled points of the box are mapped back into the box.
inline ProbeReport probe_maps_into(const Operator& op, const ConvexSet& domain, std::uint64_t seed,
                                   std::size_t samples = 500, double tol = 1e-12) {
  const auto* box = std::get_if<Box>(&domain);
  if (!box) throw std::invalid_argument("probe_maps_into: domain must be a box");
  ProbeReport r = detail::make_report("maps_into_domain", tol, seed);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    Vector x(op.dim());
    for (std::size_t c = 0; c < x.dim(); ++c)
      x[c] = std::uniform_real_distribution<double>(box->lo[c], box->hi[c])(rng);
    const Vector tx = op(x);
    const double v = violation(domain, tx);
    if (v >= r.worst_violation) {
      r.worst_violation = v;
      r.witness = std::make_pair(x, tx);
    }
  }
  r.trials = samples;
  r.finalize();
  return r;
}

struct SnsOptions {
  std::size_t probe_length = 400;
  double radius = 5.0;
  double tol = 1e-8;
};

/// Empirical strong-nonexpansiveness test for a sequence.
///
/// Each trial starts from a random pair (x_1, y_1) near the fixed-point set
/// and follows the joint orbit x_{k+1} = S_k x_k, y_{k+1} = S_k y_k.
/// ||x_k - y_k|| is nonincreasing, so the norm gaps
/// ||x_k - y_k|| - ||S_k x_k - S_k y_k|| are summable and vanish along the
/// orbit: exactly the hypothesis of the definition. The measured quantity is
/// the terminal displacement difference ||(x_k - y_k) - (S_k x_k - S_k y_k)||,
/// which must vanish for a strongly nonexpansive sequence. For sequences
/// whose operators carry an averaged certificate the quantitative averaged
/// inequality is also checked at every orbit step.
inline ProbeReport check_sns(const OperatorSequence& seq, std::uint64_t seed,
                             std::size_t trials, const SnsOptions& opt = {}) {
  if (trials < 1) throw std::invalid_argument("check_sns: trials must be >= 1");
  ProbeReport r = detail::make_report("strongly_nonexpansive_sequence", opt.tol, seed);
  std::mt19937_64 rng(seed);
  const std::size_t d = seq.dim();
  const auto anchors = sample_points(seq.common_fixed_set, rng, trials, Vector(d), opt.radius);
  std::uniform_real_distribution<double> sep(0.5, 1.0);
  double worst_gap = 0.0;

  for (std::size_t t = 0; t < trials; ++t) {
    Vector x = anchors[t] + detail::random_point(rng, d, opt.radius);
    Vector dir = detail::random_point(rng, d, 1.0);
    if (norm(dir) == 0.0) dir = Vector::unit(d, 0);
    Vector y = x + (sep(rng) / norm(dir)) * dir;

    double terminal = 0.0;
    double terminal_gap = 0.0;
    for (std::size_t k = 1; k <= opt.probe_length; ++k) {
      const Operator s = seq.at(k);
      const Vector sx = s(x);
      const Vector sy = s(y);
      terminal = norm((x - y) - (sx - sy));
      terminal_gap = distance(x, y) - distance(sx, sy);
      if (s.certificate().strongly_nonexpansive()) {
        const double q = averaged_violation(s, s.certificate().averaging(), x, y);
        if (q > r.worst_violation) {
          r.worst_violation = q;
          r.witness = std::make_pair(x, y);
        }
      }
      if (k == opt.probe_length) break;
      x = sx;
      y = sy;
    }
    worst_gap = std::max(worst_gap, terminal_gap);
    if (terminal > r.worst_violation || !r.witness) {
      r.worst_violation = std::max(r.worst_violation, terminal);
      r.witness = std::make_pair(x, y);
    }
  }
  r.trials = trials;
  r.note = "max terminal norm gap " + std::to_string(worst_gap);
  r.finalize();
  return r;
}

struct NstOptions {
  double hypothesis_tol = 1e-3;
  double conclusion_tol = 1e-3;
  double bound = 1e6;
};

/// Checks that ||x_n - T x_n|| -> 0 along probes with ||x_n - S_n x_n|| -> 0.
/// probe[i] is x_{i+1}. A probe that is unbounded or whose terminal
/// S-residual exceeds hypothesis_tol violates the hypothesis; the report is
/// then marked rejected rather than failed.
inline ProbeReport check_nst(const OperatorSequence& seq,
                             const std::vector<std::vector<Vector>>& probes,
                             const NstOptions& opt = {}) {
  if (probes.empty()) throw std::invalid_argument("check_nst: no probes");
  ProbeReport r = detail::make_report("nst_condition", opt.conclusion_tol, 0);
  auto reject = [&](std::size_t p, const std::string& why) {
    r.rejected = true;
    if (r.note.empty()) r.note = "probe " + std::to_string(p) + " " + why;
  };
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const auto& probe = probes[p];
    if (probe.empty()) {
      reject(p, "is empty");
      continue;
    }
    bool bounded = true;
    for (const auto& x : probe) bounded = bounded && norm(x) <= opt.bound;
    if (!bounded) {
      reject(p, "is not bounded");
      continue;
    }
    const std::size_t n = probe.size();
    const Vector& last = probe.back();
    const double res_s = distance(last, seq.at(n)(last));
    if (res_s > opt.hypothesis_tol) {
      reject(p, "has terminal ||x_n - S_n x_n|| = " + std::to_string(res_s));
      continue;
    }
    const Vector t_last = seq.nst_target(last);
    const double res_t = distance(last, t_last);
    if (res_t >= r.worst_violation) {
      r.worst_violation = res_t;
      r.witness = std::make_pair(last, t_last);
    }
  }
  r.trials = probes.size();
  r.finalize();
  return r;
}

struct XuOptions {
  /// A surrogate for limsup gamma_n <= 0: the tail maximum must not exceed this.
  double gamma_tail_tol = 1e-3;
  double tail_fraction = 0.25;
};

/// xi_{n+1} = max(0, (1 - a_n) xi_n + a_n g_n) for n = 1..N-1; returns xi_1..xi_N.
inline std::vector<double> xu_recursion(double xi1, const Schedule& alpha,
                                        const std::function<double(std::size_t)>& gamma,
                                        std::size_t n_max, const XuOptions& opt = {}) {
  if (!(xi1 >= 0.0)) throw std::invalid_argument("xu_recursion: xi1 must be >= 0");
  if (n_max < 1) throw std::invalid_argument("xu_recursion: N must be >= 1");
  if (!alpha.flags().sum_diverges)
    throw HypothesisViolation("xu_recursion: alpha must have a divergent series");
  const auto tail_start =
      static_cast<std::size_t>(std::floor((1.0 - opt.tail_fraction) * static_cast<double>(n_max)));
  for (std::size_t n = std::max<std::size_t>(1, tail_start); n <= n_max; ++n)
    if (gamma(n) > opt.gamma_tail_tol)
      throw HypothesisViolation("xu_recursion: gamma tail exceeds the limsup tolerance at n = " +
                                std::to_string(n));

  std::vector<double> xi(n_max);
  xi[0] = xi1;
  for (std::size_t n = 1; n < n_max; ++n) {
    const double a = alpha(n);
    xi[n] = std::max(0.0, (1.0 - a) * xi[n - 1] + a * gamma(n));
  }
  return xi;
}

/// tau(n) = max{ k <= n : xi_k <= xi_{k+1} } for n = 1..len-1, with entries
/// before the first such k set to it. xi[i] holds xi_{first_index + i}; the
/// returned indices use the same numbering.
inline std::vector<std::size_t> mainge_tau(std::span<const double> xi,
                                           std::size_t first_index = 1) {
  if (xi.size() < 2) throw HypothesisViolation("mainge_tau: window needs at least two entries");
  const std::size_t len = xi.size();
  std::size_t first = len;
  for (std::size_t k = 0; k + 1 < len; ++k)
    if (xi[k] <= xi[k + 1]) {
      first = k;
      break;
    }
  if (first == len) throw HypothesisViolation("mainge_tau: window is strictly decreasing");

  std::vector<std::size_t> tau(len - 1);
  std::size_t current = first;
  for (std::size_t n = 0; n + 1 < len; ++n) {
    if (n >= first && xi[n] <= xi[n + 1]) current = n;
    tau[n] = current + first_index;
  }
  return tau;
}

/// sum_j lambda_j y_j^n over a finite table j = 1..lambdas.size().
inline Vector weighted_tail_sum(std::span<const double> lambdas,
                                const std::function<Vector(std::size_t, std::size_t)>& table,
                                std::size_t n) {
  if (lambdas.empty()) throw std::invalid_argument("weighted_tail_sum: no weights");
  double total = 0.0;
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw std::invalid_argument("weighted_tail_sum: weights must be >= 0");
    total += l;
  }
  if (std::abs(total - 1.0) > weight_sum_tol)
    throw std::invalid_argument("weighted_tail_sum: weights must sum to 1");
  Vector acc = lambdas[0] * table(1, n);
  for (std::size_t j = 2; j <= lambdas.size(); ++j) acc += lambdas[j - 1] * table(j, n);
  return acc;
}

struct RecursionProbeOptions {
  double cauchy_tol = 1e-6;
  double tail_fraction = 0.25;
  double gamma_tail_tol = 1e-2;
  double recursion_slack = 1e-12;
};

/// Finite-window check of the scalar convergence lemma: along the indices
/// selected by mainge_tau, xi must satisfy
///   xi_{k+1} <= (1 - a_k) xi_k + a_k g_k  with the tail of g_k near or below 0,
/// otherwise the report is rejected. Only tau values inside the window tail
/// enter the limsup screen. Given the hypotheses, the report passes
/// when each window's tail oscillation is below cauchy_tol. xi[i] and
/// gamma[i] are xi_{i+1} and g_{i+1}.
inline ProbeReport scalar_recursion_convergence_probe(std::span<const double> xi,
                                                      const Schedule& alpha,
                                                      std::span<const double> gamma,
                                                      const std::vector<std::size_t>& windows,
                                                      const RecursionProbeOptions& opt = {}) {
  ProbeReport r = detail::make_report("scalar_recursion_convergence", opt.cauchy_tol, 0);
  if (windows.empty()) throw std::invalid_argument("scalar_recursion_convergence_probe: no windows");
  if (gamma.size() < xi.size())
    throw std::invalid_argument("scalar_recursion_convergence_probe: gamma shorter than xi");

  for (std::size_t w : windows) {
    if (w < 2 || w > xi.size())
      throw std::invalid_argument("scalar_recursion_convergence_probe: window out of range");
    const auto window = xi.first(w);
    bool has_increase = false;
    for (std::size_t k = 0; k + 1 < w; ++k) has_increase = has_increase || window[k] <= window[k + 1];

    if (has_increase) {
      const auto tau = mainge_tau(window);
      const std::size_t first = tau.front();
      for (std::size_t n = first; n < w; ++n) {
        const std::size_t k = tau[n - 1];  // 1-based
        const double a = alpha(k);
        const double rhs = (1.0 - a) * window[k - 1] + a * gamma[k - 1];
        if (window[k] > rhs + opt.recursion_slack) {
          r.rejected = true;
          r.note = "recursion inequality fails at tau = " + std::to_string(k);
          r.finalize();
          return r;
        }
      }
      const auto tail_from = std::max<std::size_t>(
          first, static_cast<std::size_t>((1.0 - opt.tail_fraction) * static_cast<double>(w)));
      for (std::size_t n = tail_from; n < w; ++n)
        if (tau[n - 1] >= tail_from && gamma[tau[n - 1] - 1] > opt.gamma_tail_tol) {
          r.rejected = true;
          r.note = "gamma along tau stays above the limsup tolerance";
          r.finalize();
          return r;
        }
    }

    const auto tail_start =
        static_cast<std::size_t>((1.0 - opt.tail_fraction) * static_cast<double>(w));
    const auto [lo, hi] = std::minmax_element(window.begin() + static_cast<std::ptrdiff_t>(tail_start),
                                              window.end());
    r.worst_violation = std::max(r.worst_violation, *hi - *lo);
  }
  r.trials = windows.size();
  r.finalize();
  return r;
}

}  // namespace fixedpoint
