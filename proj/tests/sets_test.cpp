#include <random>

#include <gtest/gtest.h>

#include "fixedpoint/functions.hpp"
#include "fixedpoint/sets.hpp"

using namespace fixedpoint;

TEST(Sets, ConstructorsValidate) {
  EXPECT_THROW(make_halfspace(Vector{0.0, 0.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(make_ball(Vector{0.0}, -1.0), std::invalid_argument);
  EXPECT_THROW(make_box(Vector{1.0, 0.0}, Vector{0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(make_box(Vector{0.0}, Vector{0.0, 1.0}), DimensionMismatch);
  EXPECT_THROW(make_affine(Vector{0.0, 0.0}, {Vector{1.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(make_affine(Vector{0.0, 0.0}, {Vector{1.0, 0.0}, Vector{1.0, 0.0}}),
               std::invalid_argument);
  EXPECT_THROW(make_intersection({}), std::invalid_argument);
  EXPECT_THROW(make_intersection({make_ball(Vector{0.0}, 1.0), make_ball(Vector{0.0, 0.0}, 1.0)}),
               DimensionMismatch);
  EXPECT_NO_THROW(make_affine(Vector{0.0, 0.0}, {Vector{0.6, 0.8}}));
}

TEST(Project, Examples) {
  EXPECT_EQ(project(make_halfspace(Vector{1.0, 0.0}, 0.0), Vector{2.0, 3.0}), (Vector{0.0, 3.0}));
  const Vector b = project(make_ball(Vector{0.0, 0.0}, 1.0), Vector{3.0, 4.0});
  EXPECT_NEAR(b[0], 0.6, 1e-15);
  EXPECT_NEAR(b[1], 0.8, 1e-15);
  EXPECT_EQ(project(make_box(Vector{0.0, 0.0}, Vector{1.0, 1.0}), Vector{-1.0, 0.5}),
            (Vector{0.0, 0.5}));
  EXPECT_EQ(project(make_affine(Vector{0.0, 1.0}, {Vector{0.0, 1.0}}), Vector{3.0, 7.0}),
            (Vector{3.0, 1.0}));
}

TEST(Project, Errors) {
  const auto box = make_box(Vector{0.0, 0.0}, Vector{1.0, 1.0});
  EXPECT_THROW(project(make_intersection({box, box}), Vector{0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(project(box, Vector{0.0}), DimensionMismatch);
}

TEST(Project, IdempotentAndVariationalInequality) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 4.0);
  const std::vector<ConvexSet> sets{
      make_halfspace(Vector{1.0, -2.0, 0.5}, 0.3), make_ball(Vector{1.0, 0.0, -1.0}, 2.0),
      make_box(Vector{-1.0, 0.0, 2.0}, Vector{1.0, 0.5, 3.0}),
      make_affine(Vector{0.0, 0.0, 1.0}, {Vector{0.0, 0.0, 1.0}})};
  for (const auto& s : sets)
    for (int i = 0; i < 200; ++i) {
      const Vector x{g(rng), g(rng), g(rng)};
      const Vector q = project(s, x);
      EXPECT_TRUE(contains(s, q, 1e-12));
      EXPECT_LE(distance(project(s, q), q), 1e-12);
      // Compare against projections of other points, which lie in the set.
      const Vector z = project(s, Vector{g(rng), g(rng), g(rng)});
      EXPECT_LE(inner(x - q, z - q), 1e-10);
    }
}

TEST(Sets, ViolationAndContains) {
  const auto h = make_halfspace(Vector{3.0, 4.0}, 5.0);
  EXPECT_DOUBLE_EQ(violation(h, Vector{3.0, 4.0}), 4.0);
  EXPECT_TRUE(contains(h, Vector{0.0, 0.0}, 0.0));
  const auto inter = make_intersection({h, make_ball(Vector{0.0, 0.0}, 1.0)});
  EXPECT_DOUBLE_EQ(violation(inter, Vector{2.0, 0.0}), 1.0);
  EXPECT_EQ(primitives_of(make_intersection({inter, h})).size(), 3u);
  EXPECT_TRUE(is_polyhedral(make_intersection({h, make_point(Vector{0.0, 0.0})})));
  EXPECT_FALSE(is_polyhedral(inter));
  EXPECT_TRUE(contains(make_whole_space(2), Vector{1e6, -1e6}, 0.0));
}

TEST(Functions, ConstructorsValidate) {
  EXPECT_THROW(make_quadratic(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(make_quadratic(-1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(make_indicator(2.0, 1.0), std::invalid_argument);
  EXPECT_THROW(prox_scalar(AbsValue{}, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(prox_scalar(AbsValue{}, -1.0, 1.0), std::invalid_argument);
}

TEST(Functions, ProxClosedForms) {
  EXPECT_EQ(prox_scalar(AbsValue{}, 1.0, 2.5), 1.5);
  EXPECT_EQ(prox_scalar(AbsValue{}, 1.0, 0.0), 0.0);
  EXPECT_EQ(prox_scalar(AbsValue{}, 3.0, -1.0), 0.0);
  EXPECT_EQ(prox_scalar(make_quadratic(1.0, 0.0), 1.0, 3.0), 1.5);
  EXPECT_EQ(prox_scalar(make_quadratic(2.0, 0.0), 0.5, 4.0), 2.0);
  EXPECT_EQ(prox_scalar(make_indicator(0.0, 1.0), 2.0, 3.0), 1.0);
  EXPECT_EQ(prox_scalar(make_indicator(0.0, 1.0), 2.0, -3.0), 0.0);
}

TEST(Functions, AbsResolventInclusion) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x_dist(-10.0, 10.0), l_dist(0.01, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = x_dist(rng), lambda = l_dist(rng);
    const double j = prox_scalar(AbsValue{}, lambda, x);
    const double r = x - j;
    EXPECT_LE(std::abs(r), lambda + 1e-12);
    if (j > 0.0) {
      EXPECT_NEAR(r, lambda, 1e-12);
    }
    if (j < 0.0) {
      EXPECT_NEAR(r, -lambda, 1e-12);
    }
  }
}

TEST(Functions, ArgminSets) {
  const auto a = argmin_set(make_indicator(-1.0, 2.0), 2);
  EXPECT_TRUE(contains(a, Vector{2.0, -1.0}, 0.0));
  EXPECT_FALSE(contains(a, Vector{2.5, 0.0}, 0.0));
  EXPECT_TRUE(contains(argmin_set(make_quadratic(1.0, 0.0), 1), Vector{0.0}, 0.0));
  EXPECT_FALSE(contains(argmin_set(AbsValue{}, 1), Vector{1e-3}, 0.0));
}
