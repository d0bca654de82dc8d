#include <random>

#include <gtest/gtest.h>

#include "fixedpoint/operators.hpp"
#include "fixedpoint/oracle.hpp"
#include "fixedpoint/verify.hpp"

using namespace fixedpoint;

namespace {

const ConvexSet h1 = make_halfspace(Vector{1.0, 0.0}, 0.0);
const ConvexSet h2 = make_halfspace(Vector{0.0, 1.0}, 0.0);

std::vector<Operator> sample_operators() {
  return {identity_operator(2),
          projection_operator(h1),
          projection_operator(make_ball(Vector{1.0, -1.0}, 2.0)),
          projection_operator(make_box(Vector{0.0, 0.0}, Vector{1.0, 3.0})),
          prox_operator(AbsValue{}, 0.7, 2),
          prox_operator(make_quadratic(2.0, 1.0), 1.3, 2),
          prox_operator(make_indicator(-1.0, 1.0), 4.0, 2),
          relax(0.3, projection_operator(h2)),
          convex_combo({0.5, 0.5}, {projection_operator(h1), projection_operator(h2)}),
          truncated_geometric_combo({projection_operator(h1), projection_operator(h2),
                                     prox_operator(AbsValue{}, 1.0, 2)}),
          constant_operator(Vector{3.0, -2.0}),
          rotation_operator(0.5)};
}

}  // namespace

TEST(Operators, ProxExamplesAgreeWithScalarOracle) {
  const double abs_expected = prox_scalar_oracle(AbsValue{}, 1.0, 2.5);
  EXPECT_NEAR(abs_expected, 1.5, 1e-10);
  EXPECT_NEAR(prox(AbsValue{}, 1.0, Vector{2.5})[0], abs_expected, 1e-10);
  EXPECT_EQ(prox(AbsValue{}, 1.0, Vector{0.0}), Vector{0.0});

  const auto quad = make_quadratic(1.0, 0.0);
  const double quad_expected = prox_scalar_oracle(quad, 1.0, 3.0);
  EXPECT_NEAR(quad_expected, 1.5, 1e-10);
  EXPECT_NEAR(prox(quad, 1.0, Vector{3.0})[0], quad_expected, 1e-10);
}

TEST(Operators, ProxIsComponentwise) {
  EXPECT_EQ(prox(AbsValue{}, 1.0, Vector{2.5, -0.5, -4.0}), (Vector{1.5, 0.0, -3.0}));
  EXPECT_THROW(prox(AbsValue{}, 0.0, Vector{1.0}), std::invalid_argument);
  EXPECT_THROW(prox_operator(AbsValue{}, -2.0, 1), std::invalid_argument);
}

TEST(Operators, RelaxExamples) {
  const Operator p = projection_operator(h1);
  EXPECT_EQ(relax(0.5, p)(Vector{2.0, 0.0}), (Vector{1.0, 0.0}));
  EXPECT_EQ(relax(0.9, p)(Vector{-3.0, 7.0}), (Vector{-3.0, 7.0}));
  // 0.25 * (4, 0) + 0.75 * (0, 0)
  const Vector expected = 0.25 * Vector{4.0, 0.0} + 0.75 * Vector{0.0, 0.0};
  EXPECT_EQ(relax(0.25, constant_operator(Vector{0.0, 0.0}))(Vector{4.0, 0.0}), expected);
  EXPECT_EQ(expected, (Vector{1.0, 0.0}));
  EXPECT_THROW(relax(0.0, p), std::invalid_argument);
  EXPECT_THROW(relax(1.0, p), std::invalid_argument);
  EXPECT_EQ(relax(0.5, p).certificate().kind, Certificate::Kind::averaged);
  EXPECT_TRUE(relax(0.5, p).fixed_set().has_value());
}

TEST(Operators, ConvexComboExamples) {
  const Operator p1 = projection_operator(h1);
  const Operator p2 = projection_operator(h2);
  const Operator s = convex_combo({0.5, 0.5}, {p1, p2});
  // Average of (0, 2) and (2, 0).
  const Vector expected = 0.5 * p1(Vector{2.0, 2.0}) + 0.5 * p2(Vector{2.0, 2.0});
  EXPECT_EQ(s(Vector{2.0, 2.0}), expected);
  EXPECT_EQ(expected, (Vector{1.0, 1.0}));
  EXPECT_EQ(s(Vector{-1.0, -2.0}), (Vector{-1.0, -2.0}));

  const Operator single = convex_combo({1.0}, {p1});
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const Vector x = detail::random_point(rng, 2, 5.0);
    EXPECT_EQ(single(x), p1(x));
  }
}

TEST(Operators, ConvexComboErrors) {
  const Operator p1 = projection_operator(h1);
  EXPECT_THROW(convex_combo({}, {}), std::invalid_argument);
  EXPECT_THROW(convex_combo({0.6, 0.6}, {p1, p1}), std::invalid_argument);
  EXPECT_THROW(convex_combo({1.5, -0.5}, {p1, p1}), std::invalid_argument);
  EXPECT_THROW(convex_combo({0.5, 0.5}, {p1}), std::invalid_argument);
  EXPECT_THROW(convex_combo({0.5, 0.5}, {p1, identity_operator(3)}), DimensionMismatch);
  EXPECT_NO_THROW(convex_combo({0.5, 0.5 + 5e-13}, {p1, p1}));
}

TEST(Operators, GeometricWeights) {
  EXPECT_EQ(geometric_weights(1), std::vector<double>{1.0});
  EXPECT_EQ(geometric_weights(3), (std::vector<double>{0.5, 0.25, 0.25}));
  EXPECT_THROW(geometric_weights(0), std::invalid_argument);
  EXPECT_THROW(truncated_geometric_combo({}), std::invalid_argument);
  const Operator id = truncated_geometric_combo({identity_operator(2), identity_operator(2)});
  EXPECT_EQ(id(Vector{3.0, -4.5}), (Vector{3.0, -4.5}));
}

TEST(Operators, DimensionChecks) {
  EXPECT_THROW(projection_operator(h1)(Vector{1.0}), DimensionMismatch);
  EXPECT_THROW(projection_operator(make_intersection({h1, h2})), std::invalid_argument);
}

TEST(Operators, AllNonexpansive) {
  std::uint64_t seed = 100;
  for (const auto& op : sample_operators()) {
    const auto r = probe_nonexpansive(op, seed++);
    EXPECT_TRUE(r.pass) << op.name() << " worst " << r.worst_violation;
  }
}

TEST(Operators, ProjectionsAndProxAreFirmlyNonexpansive) {
  std::uint64_t seed = 200;
  for (const auto& op : sample_operators()) {
    if (op.certificate().kind != Certificate::Kind::firmly_nonexpansive) continue;
    const auto r = probe_firmly_nonexpansive(op, seed++);
    EXPECT_TRUE(r.pass) << op.name() << " worst " << r.worst_violation;
  }
}

TEST(Operators, RotationIsNotFirm) {
  EXPECT_FALSE(probe_firmly_nonexpansive(rotation_operator(0.5), 1).pass);
  EXPECT_THROW(probe_averaged(rotation_operator(0.5), 1), std::invalid_argument);
}

TEST(Operators, RelaxAveragedInequality) {
  std::uint64_t seed = 300;
  for (double gamma : {0.1, 0.5, 0.9}) {
    for (const Operator& v : {projection_operator(h1), rotation_operator(1.0),
                              prox_operator(AbsValue{}, 2.0, 2)}) {
      const Operator s = relax(gamma, v);
      EXPECT_TRUE(probe_averaged(s, seed++).pass) << s.name();
      // The coarser constant 1 - gamma holds for any nonexpansive V.
      std::mt19937_64 rng(seed++);
      for (int i = 0; i < 1000; ++i) {
        const Vector x = detail::random_point(rng, 2, 10.0);
        const Vector y = detail::random_point(rng, 2, 10.0);
        EXPECT_LE(averaged_violation(s, 1.0 - gamma, x, y), 1e-10);
      }
    }
  }
}

TEST(Operators, DeclaredFixedSetsAreFixed) {
  std::uint64_t seed = 400;
  for (const auto& op : sample_operators()) {
    ASSERT_TRUE(op.fixed_set().has_value()) << op.name();
    const auto r = probe_fixed_set(op, seed++);
    EXPECT_TRUE(r.pass) << op.name() << " worst " << r.worst_violation;
  }
}

TEST(Operators, ProjectionVariationalInequality) {
  const ConvexSet ball = make_ball(Vector{0.0, 1.0}, 1.5);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    const Vector x = detail::random_point(rng, 2, 6.0);
    const auto r = variational_inequality_check(x, project(ball, x), ball, 200, 500 + i);
    EXPECT_TRUE(r.pass) << r.worst_violation;
  }
}

TEST(Operators, CertificateCombination) {
  const Operator firm = projection_operator(h1);
  const Operator avg = relax(0.5, rotation_operator(1.0));
  EXPECT_EQ(convex_combo({0.5, 0.5}, {firm, firm}).certificate().kind,
            Certificate::Kind::firmly_nonexpansive);
  const Operator mixed = convex_combo({0.5, 0.5}, {firm, avg});
  EXPECT_EQ(mixed.certificate().kind, Certificate::Kind::averaged);
  EXPECT_DOUBLE_EQ(mixed.certificate().averaging(), 0.5);
  EXPECT_EQ(convex_combo({0.5, 0.5}, {firm, rotation_operator(1.0)}).certificate().kind,
            Certificate::Kind::nonexpansive_only);
  EXPECT_TRUE(probe_averaged(mixed, 7).pass);
}
