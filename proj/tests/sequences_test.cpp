#include <random>

#include <gtest/gtest.h>

#include "fixedpoint/sequences.hpp"
#include "fixedpoint/oracle.hpp"
#include "fixedpoint/verify.hpp"

using namespace fixedpoint;

namespace {

const ConvexSet h1 = make_halfspace(Vector{1.0, 0.0}, 0.0);
const ConvexSet h2 = make_halfspace(Vector{0.0, 1.0}, 0.0);

Schedule gamma_half() { return make_schedule(ConstantFamily{0.5}, ScheduleRole::gamma); }

void expect_same_on_samples(const Operator& a, const Operator& b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 100; ++i) {
    const Vector x = detail::random_point(rng, a.dim(), 10.0);
    EXPECT_EQ(a(x), b(x));
  }
}

void expect_common_fixed_points_fixed(const OperatorSequence& seq, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto points = sample_points(seq.common_fixed_set, rng, 50, Vector(seq.dim()), 5.0);
  for (std::size_t n = 1; n <= 50; ++n) {
    const Operator s = seq.at(n);
    for (const auto& z : points) EXPECT_LE(distance(s(z), z), 1e-12) << "n = " << n;
  }
}

}  // namespace

TEST(BetaTable, GeometricRows) {
  const BetaTable b = BetaTable::geometric();
  EXPECT_EQ(b.row(1), std::vector<double>{1.0});
  EXPECT_EQ(b.row(2), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(b.row(4), (std::vector<double>{0.5, 0.25, 0.125, 0.125}));
  for (std::size_t n = 1; n <= 200; ++n) {
    const auto r = b.row(n);
    double sum = 0.0;
    for (double v : r) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  // inf over n >= k of beta_n^k is 2^-k.
  for (std::size_t k = 1; k <= 20; ++k) {
    double inf = 1.0;
    for (std::size_t n = k; n <= 60; ++n) inf = std::min(inf, b(n, k));
    EXPECT_EQ(inf, std::ldexp(1.0, -static_cast<int>(k)));
  }
}

TEST(BetaTable, CustomRowsValidated) {
  EXPECT_NO_THROW(BetaTable::custom([](std::size_t n, std::size_t) { return 1.0 / static_cast<double>(n); }));
  EXPECT_THROW(BetaTable::custom([](std::size_t, std::size_t) { return 0.5; }), std::invalid_argument);
  EXPECT_THROW(BetaTable::geometric().row(0), std::invalid_argument);
}

TEST(BetaTable, FoldedRows) {
  const BetaTable b = BetaTable::geometric();
  EXPECT_EQ(folded_beta_row(b, 2, 2), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(folded_beta_row(b, 4, 2), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(folded_beta_row(b, 5, 3), (std::vector<double>{0.5, 0.25, 0.25}));
  EXPECT_EQ(folded_beta_row(b, 1, 3), std::vector<double>{1.0});
}

TEST(ConstantSequence, Examples) {
  const Operator p = projection_operator(h1);
  const OperatorSequence seq = constant_sequence(p);
  expect_same_on_samples(seq.at(7), seq.at(1), 1);
  EXPECT_TRUE(seq.sns_certified);

  const OperatorSequence id = constant_sequence(identity_operator(3));
  EXPECT_EQ(id.nst_target(Vector{1.0, 2.0, 3.0}), (Vector{1.0, 2.0, 3.0}));

  const OperatorSequence relaxed =
      constant_sequence(relax(0.5, projection_operator(make_ball(Vector{0.0, 0.0}, 1.0))));
  EXPECT_TRUE(relaxed.sns_certified);
  expect_common_fixed_points_fixed(relaxed, 2);
}

TEST(ConstantSequence, Errors) {
  EXPECT_THROW(constant_sequence(rotation_operator(0.5)), std::invalid_argument);
  const Operator no_fixed("opaque", 2, [](const Vector& x) { return x; }, std::nullopt,
                          Certificate::firm());
  EXPECT_THROW(constant_sequence(no_fixed), std::invalid_argument);
}

TEST(ResolventSequence, SoftThresholdAgainstScalarOracle) {
  const Schedule one = make_schedule(ConstantFamily{1.0}, ScheduleRole::lambda);
  const OperatorSequence seq = resolvent_sequence(AbsValue{}, one, 1);
  for (double x : {-3.0, -0.4, 0.0, 0.9, 2.5, 7.0})
    for (std::size_t n : {1u, 5u, 100u})
      EXPECT_NEAR(seq.at(n)(Vector{x})[0], prox_scalar_oracle(AbsValue{}, 1.0, x), 1e-10);
  EXPECT_TRUE(seq.sns_certified);
}

TEST(ResolventSequence, FixedSetsAndTargets) {
  const Schedule growing = make_schedule(PowerFamily{1.0, 1.0, 0.0}, ScheduleRole::unconstrained);
  EXPECT_THROW(resolvent_sequence(AbsValue{}, growing, 1), ScheduleError);

  const Schedule two = make_schedule(ConstantFamily{2.0}, ScheduleRole::lambda);
  const OperatorSequence quad = resolvent_sequence(make_quadratic(1.0, 0.0), two, 2);
  EXPECT_TRUE(contains(quad.common_fixed_set, Vector{0.0, 0.0}, 0.0));
  EXPECT_FALSE(contains(quad.common_fixed_set, Vector{1e-6, 0.0}, 0.0));

  const OperatorSequence box = resolvent_sequence(make_indicator(0.0, 1.0), two, 2);
  EXPECT_EQ(box.at(3)(Vector{-2.0, 0.25}), (Vector{0.0, 0.25}));
  EXPECT_EQ(box.at(3)(Vector{4.0, 1.5}), (Vector{1.0, 1.0}));
  expect_common_fixed_points_fixed(box, 3);

  // F(J_lambda) does not depend on lambda: argmin points are fixed by J_1 too.
  std::mt19937_64 rng(4);
  for (const auto& z : sample_points(box.common_fixed_set, rng, 50, Vector(2), 1.0))
    EXPECT_EQ(box.nst_target(z), z);
}

TEST(CfpSequence, Examples) {
  const Operator p1 = projection_operator(h1);
  const OperatorSequence single = cfp_sequence({p1}, BetaTable::geometric(), gamma_half());
  expect_same_on_samples(single.at(4), relax(0.5, p1), 5);
  expect_same_on_samples(single.nst_target, p1, 6);

  const Operator p2 = projection_operator(h2);
  const OperatorSequence two = cfp_sequence({p1, p2}, BetaTable::geometric(), gamma_half());
  expect_same_on_samples(two.at(2), relax(0.5, convex_combo({0.5, 0.5}, {p1, p2})), 7);
  expect_same_on_samples(two.at(1), relax(0.5, p1), 8);
  expect_same_on_samples(two.nst_target, convex_combo({0.5, 0.5}, {p1, p2}), 9);
  EXPECT_TRUE(two.sns_certified);
  expect_common_fixed_points_fixed(two, 10);
}

TEST(CfpSequence, Errors) {
  EXPECT_THROW(cfp_sequence({}, BetaTable::geometric(), gamma_half()), std::invalid_argument);
  const Schedule bad_gamma = make_schedule(PowerFamily{0.5, 1.0, 0.0});
  EXPECT_THROW(cfp_sequence({projection_operator(h1)}, BetaTable::geometric(), bad_gamma),
               ScheduleError);
  EXPECT_THROW(cfp_sequence({projection_operator(h1), identity_operator(3)},
                            BetaTable::geometric(), gamma_half()),
               DimensionMismatch);
}

TEST(Sequences, RawSequenceIsUncertified) {
  const Operator rot = rotation_operator(0.5);
  const OperatorSequence raw = raw_sequence([rot](std::size_t) { return rot; }, rot, *rot.fixed_set());
  EXPECT_FALSE(raw.sns_certified);
  EXPECT_THROW(raw_sequence([rot](std::size_t) { return rot; }, rot, make_whole_space(3)),
               DimensionMismatch);
}

TEST(BetaTable, FoldedRowsFarOut) {
  const BetaTable b = BetaTable::geometric();
  EXPECT_EQ(folded_beta_row(b, 5'000'000, 2), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(folded_beta_row(b, 2000, 3), (std::vector<double>{0.5, 0.25, 0.25}));
  EXPECT_THROW(folded_beta_row(b, 3, 0), std::invalid_argument);
}
