#pragma once

// Named batteries of property checks behind the `verify` subcommand.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fixedpoint/iterate.hpp"
#include "fixedpoint/oracle.hpp"
#include "fixedpoint/verify.hpp"

namespace fixedpoint {

struct SuiteEntry {
  ProbeReport report;
  /// Negative controls succeed by failing.
  bool expect_fail = false;

  bool ok() const { return expect_fail ? (!report.pass && !report.rejected) : report.pass; }
};

struct SuiteResult {
  std::string name;
  std::vector<SuiteEntry> entries;

  bool ok() const {
    for (const auto& e : entries)
      if (!e.ok()) return false;
    return !entries.empty();
  }
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"sns", "nst", "lemmas", "oracle-crosscheck"};
  return names;
}

/// Halfspaces x1 <= 0 and x2 <= 0 in the plane; their intersection is the
/// closed third quadrant.
inline std::vector<Operator> quadrant_projections() {
  return {projection_operator(make_halfspace(Vector{1.0, 0.0}, 0.0)),
          projection_operator(make_halfspace(Vector{0.0, 1.0}, 0.0))};
}

/// S = P1/2 + P2/2 over the two quadrant halfspaces.
inline Operator quadrant_average() { return convex_combo({0.5, 0.5}, quadrant_projections()); }

/// Random halfspaces through a common feasible point, so the intersection is
/// nonempty by construction.
inline std::vector<ConvexSet> random_polyhedron(std::mt19937_64& rng, std::size_t dim,
                                                std::size_t count) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> slack(0.0, 1.0);
  Vector inside(dim);
  for (std::size_t i = 0; i < dim; ++i) inside[i] = gauss(rng);
  std::vector<ConvexSet> sets;
  for (std::size_t k = 0; k < count; ++k) {
    Vector a(dim);
    do {
      for (std::size_t i = 0; i < dim; ++i) a[i] = gauss(rng);
    } while (norm(a) < 1e-3);
    sets.push_back(make_halfspace(a, inner(a, inside) + slack(rng)));
  }
  return sets;
}

namespace detail {

inline ProbeReport value_report(std::string property, double value, double tol) {
  ProbeReport r;
  r.property = std::move(property);
  r.trials = 1;
  r.worst_violation = value;
  r.tolerance = tol;
  r.finalize();
  return r;
}

/// x_1..x_n of the Halpern recursion, without any stopping test.
inline std::vector<Vector> halpern_iterates(const OperatorSequence& seq, const Vector& u,
                                            const Vector& x1, std::size_t n) {
  const Schedule alpha = default_alpha();
  std::vector<Vector> xs{x1};
  xs.reserve(n);
  for (std::size_t k = 1; k < n; ++k) xs.push_back(convex_mix(alpha(k), u, seq.at(k)(xs.back())));
  return xs;
}

}  // namespace detail

inline SuiteResult run_sns_suite(std::uint64_t seed) {
  SuiteResult s{"sns", {}};
  const std::size_t trials = 50;
  auto add = [&](std::string label, const OperatorSequence& seq, bool expect_fail) {
    ProbeReport r = check_sns(seq, seed, trials);
    r.property += ":" + label;
    s.entries.push_back({std::move(r), expect_fail});
  };
  add("identity", constant_sequence(identity_operator(2)), false);
  add("relaxed_halfspace",
      constant_sequence(relax(0.5, projection_operator(make_halfspace(Vector{1.0, 0.0}, 0.0)))),
      false);
  add("resolvent_abs", resolvent_sequence(AbsValue{}, make_schedule(ConstantFamily{2.0}), 2),
      false);
  add("cfp_quadrant",
      cfp_sequence(quadrant_projections(), BetaTable::geometric(), make_schedule(ConstantFamily{0.5})),
      false);
  const Operator rot = rotation_operator(0.5);
  add("rotation_negative_control",
      raw_sequence([rot](std::size_t) { return rot; }, rot, *rot.fixed_set()), true);
  return s;
}

inline SuiteResult run_nst_suite(std::uint64_t seed) {
  SuiteResult s{"nst", {}};
  const Vector u{1.0, 1.0};
  const Vector x1{0.0, 0.0};
  auto add = [&](std::string label, const OperatorSequence& seq,
                 std::vector<std::vector<Vector>> probes, NstOptions opt) {
    ProbeReport r = check_nst(seq, probes, opt);
    r.property += ":" + label;
    r.seed = seed;
    s.entries.push_back({std::move(r), false});
  };

  const auto constant = constant_sequence(quadrant_average());
  add("constant_sequence", constant, {detail::halpern_iterates(constant, u, x1, 20000)},
      {1e-3, 1e-3, 1e6});

  const auto resolvent = resolvent_sequence(AbsValue{}, make_schedule(ConstantFamily{2.0}), 1);
  add("resolvent_abs", resolvent,
      {detail::halpern_iterates(resolvent, Vector{5.0}, Vector{5.0}, 20000)}, {1e-3, 1e-3, 1e6});

  const auto cfp =
      cfp_sequence(quadrant_projections(), BetaTable::geometric(), make_schedule(ConstantFamily{0.5}));
  add("cfp_quadrant", cfp, {detail::halpern_iterates(cfp, u, x1, 20000)}, {1e-3, 1e-3, 1e6});

  // Constant probes at common fixed points: F({S_n}) lies inside F(T).
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Vector>> stationary;
  for (const auto& z : sample_points(cfp.common_fixed_set, rng, 20, Vector(2), 5.0))
    stationary.push_back(std::vector<Vector>(8, z));
  add("fixed_points_of_sequence_are_fixed_by_target", cfp, stationary, {1e-12, 1e-12, 1e6});
  return s;
}

inline SuiteResult run_lemma_suite(std::uint64_t seed) {
  SuiteResult s{"lemmas", {}};
  const Schedule alpha = default_alpha();
  const std::size_t n = 10000;

  const auto xi_a = xu_recursion(1.0, alpha, [](std::size_t) { return 0.0; }, n);
  s.entries.push_back({detail::value_report("xu_recursion:zero_drive", xi_a.back(), 2e-3), false});
  const auto xi_b = xu_recursion(0.0, alpha, [](std::size_t) { return -0.5; }, n);
  s.entries.push_back({detail::value_report("xu_recursion:zero_start", xi_b.back(), 2e-3), false});
  const auto xi_c = xu_recursion(
      5.0, alpha, [](std::size_t k) { return 1.0 / static_cast<double>(k); }, n);
  s.entries.push_back({detail::value_report("xu_recursion:harmonic_drive", xi_c.back(), 2e-3), false});

  // Maingé index map on random windows: count windows violating either inequality.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::size_t bad = 0;
  const std::size_t windows = 1000;
  for (std::size_t w = 0; w < windows; ++w) {
    std::vector<double> xi(200);
    for (double& v : xi) v = unif(rng);
    const auto tau = mainge_tau(xi);
    const std::size_t first = tau.front();
    bool ok = true;
    for (std::size_t m = 1; m <= tau.size(); ++m) {
      const std::size_t t = tau[m - 1];
      if (m > 1 && tau[m - 1] < tau[m - 2]) ok = false;
      if (t > xi.size()) ok = false;
      if (m >= first && !(xi[t - 1] <= xi[t] && xi[m - 1] <= xi[t])) ok = false;
    }
    bad += ok ? 0 : 1;
  }
  ProbeReport tau_report = detail::value_report("mainge_tau", static_cast<double>(bad), 0.0);
  tau_report.trials = windows;
  tau_report.seed = seed;
  s.entries.push_back({tau_report, false});

  const std::vector<double> lambdas{0.5, 0.25, 0.25};
  const std::size_t far = 2'000'000;
  const Vector tail = weighted_tail_sum(
      lambdas,
      [](std::size_t j, std::size_t m) {
        return (static_cast<double>(j) / static_cast<double>(m)) * Vector::unit(2, 0);
      },
      far);
  s.entries.push_back({detail::value_report("weighted_tail_sum", norm(tail), 1e-6), false});

  // Scalar convergence lemma fed by a Halpern run: xi_n = ||x_n - w||^2 and
  // g_n = 2 <u - w, x_{n+1} - w> with w = Qu = 0.
  const auto seq = constant_sequence(quadrant_average());
  const Vector u{1.0, 1.0};
  const auto iterates = detail::halpern_iterates(seq, u, Vector{0.0, 0.0}, n + 1);
  std::vector<double> xi(n), g(n);
  for (std::size_t k = 0; k < n; ++k) {
    xi[k] = squared_norm(iterates[k]);
    g[k] = 2.0 * inner(u, iterates[k + 1]);
  }
  ProbeReport conv = scalar_recursion_convergence_probe(xi, alpha, g, {n / 2, n});
  conv.seed = seed;
  s.entries.push_back({conv, false});
  return s;
}

inline SuiteResult run_oracle_suite(std::uint64_t seed) {
  SuiteResult s{"oracle-crosscheck", {}};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim_pick(1, 4);
  std::uniform_int_distribution<std::size_t> count_pick(1, 4);
  std::normal_distribution<double> gauss(0.0, 2.0);

  ProbeReport agree;
  agree.property = "enumeration_vs_dykstra";
  agree.tolerance = 1e-8;
  agree.seed = seed;
  ProbeReport vi;
  vi.property = "variational_inequality_of_oracle_outputs";
  vi.tolerance = 1e-9;
  vi.seed = seed;
  for (std::size_t i = 0; i < 100; ++i) {
    const std::size_t d = dim_pick(rng);
    const auto sets = random_polyhedron(rng, d, count_pick(rng));
    Vector u(d);
    for (std::size_t c = 0; c < d; ++c) u[c] = gauss(rng);
    OracleResult res;
    try {
      res = project_intersection_oracle(sets, u);
    } catch (const OracleDisagreement& e) {
      agree.worst_violation = INFINITY;
      agree.note = e.what();
      continue;
    }
    agree.worst_violation = std::max(agree.worst_violation, res.cross_check_gap);
    const auto check = variational_inequality_check(u, res.value, make_intersection(sets), 200,
                                                    seed + i, vi.tolerance);
    vi.worst_violation = std::max(vi.worst_violation, check.worst_violation);
    if (check.rejected) vi.rejected = true;
  }
  agree.trials = vi.trials = 100;
  agree.finalize();
  vi.finalize();
  s.entries.push_back({agree, false});
  s.entries.push_back({vi, false});

  ProbeReport prox_agree;
  prox_agree.property = "prox_oracle_vs_closed_form";
  prox_agree.tolerance = 1e-8;
  prox_agree.seed = seed;
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  std::uniform_real_distribution<double> pos(0.05, 5.0);
  std::uniform_int_distribution<int> kind(0, 2);
  for (std::size_t i = 0; i < 1000; ++i) {
    ScalarFunction f = AbsValue{};
    const int k = kind(rng);
    if (k == 1) f = make_quadratic(pos(rng), unif(rng));
    if (k == 2) {
      const double a = unif(rng);
      f = make_indicator(a, a + pos(rng));
    }
    const double lambda = pos(rng);
    const double x = unif(rng);
    prox_agree.worst_violation = std::max(
        prox_agree.worst_violation, std::abs(prox_scalar_oracle(f, lambda, x) - prox_scalar(f, lambda, x)));
  }
  prox_agree.trials = 1000;
  prox_agree.finalize();
  s.entries.push_back({prox_agree, false});
  return s;
}

inline SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "sns") return run_sns_suite(seed);
  if (name == "nst") return run_nst_suite(seed);
  if (name == "lemmas") return run_lemma_suite(seed);
  if (name == "oracle-crosscheck") return run_oracle_suite(seed);
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace fixedpoint
