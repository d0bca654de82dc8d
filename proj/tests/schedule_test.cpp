#include <cmath>

#include <gtest/gtest.h>

#include "fixedpoint/schedule.hpp"

using namespace fixedpoint;

TEST(Schedule, HarmonicPowerValuesAndFlags) {
  const Schedule s = make_schedule(PowerFamily{1.0, 1.0, 0.0}, ScheduleRole::alpha);
  EXPECT_DOUBLE_EQ(s(1), 0.5);
  EXPECT_DOUBLE_EQ(s(9), 0.1);
  EXPECT_TRUE(s.flags().tends_to_zero);
  EXPECT_TRUE(s.flags().sum_diverges);
  EXPECT_TRUE(s.verified());
}

TEST(Schedule, ConstantFlags) {
  const Schedule s = make_schedule(ConstantFamily{0.5});
  EXPECT_EQ(s(1), 0.5);
  EXPECT_EQ(s(1000), 0.5);
  EXPECT_TRUE(s.flags().sum_diverges);
  EXPECT_FALSE(s.flags().tends_to_zero);
  EXPECT_TRUE(s.flags().inf_positive);
  EXPECT_TRUE(s.flags().sup_below_one);
}

TEST(Schedule, SummablePowerRejectedAsAlpha) {
  try {
    make_schedule(PowerFamily{1.0, 2.0, 0.0}, ScheduleRole::alpha);
    FAIL() << "expected ScheduleError";
  } catch (const ScheduleError& e) {
    EXPECT_NE(std::string(e.what()).find("diverge"), std::string::npos);
  }
  EXPECT_NO_THROW(make_schedule(PowerFamily{1.0, 2.0, 0.0}));
}

TEST(Schedule, AlphaRoleNeedsVanishingValuesInUnitInterval) {
  EXPECT_THROW(make_schedule(ConstantFamily{0.5}, ScheduleRole::alpha), ScheduleError);
  EXPECT_THROW(make_schedule(HarmonicShiftedFamily{-0.5}, ScheduleRole::alpha), ScheduleError);
  EXPECT_NO_THROW(make_schedule(HarmonicShiftedFamily{1.0}, ScheduleRole::alpha));
  // Clamped into (0, 1]: c = 5 gives 1 for the first few n.
  const Schedule clamped = make_schedule(PowerFamily{5.0, 1.0, 0.0}, ScheduleRole::alpha);
  EXPECT_EQ(clamped(1), 1.0);
  EXPECT_DOUBLE_EQ(clamped(9), 0.5);
}

TEST(Schedule, FamilyParameterErrors) {
  EXPECT_THROW(make_schedule(PowerFamily{0.0, 1.0, 0.0}), ScheduleError);
  EXPECT_THROW(make_schedule(PowerFamily{1.0, 0.0, 0.0}), ScheduleError);
  EXPECT_THROW(make_schedule(PowerFamily{1.0, 1.0, -1.0}), ScheduleError);
  EXPECT_THROW(make_schedule(CustomFamily{{}, {}}), ScheduleError);
  EXPECT_THROW(make_schedule(ConstantFamily{NAN}), ScheduleError);
}

TEST(Schedule, GammaAndLambdaRoles) {
  EXPECT_NO_THROW(make_schedule(ConstantFamily{0.5}, ScheduleRole::gamma));
  EXPECT_THROW(make_schedule(ConstantFamily{1.0}, ScheduleRole::gamma), ScheduleError);
  EXPECT_THROW(make_schedule(PowerFamily{0.5, 1.0, 0.0}, ScheduleRole::gamma), ScheduleError);
  EXPECT_NO_THROW(make_schedule(ConstantFamily{3.0}, ScheduleRole::lambda));
  EXPECT_THROW(make_schedule(ConstantFamily{0.0}, ScheduleRole::lambda), ScheduleError);
  EXPECT_THROW(make_schedule(PowerFamily{1.0, 1.0, 0.0}, ScheduleRole::lambda), ScheduleError);
}

TEST(Schedule, CustomCarriesAssertedFlagsUnverified) {
  ScheduleFlags flags{true, true, false, true};
  const Schedule s = make_schedule(CustomFamily{{0.5, 0.25, 0.125}, flags}, ScheduleRole::alpha);
  EXPECT_FALSE(s.verified());
  EXPECT_EQ(s.flags(), flags);
  EXPECT_EQ(s(2), 0.25);
  EXPECT_EQ(s(50), 0.125);
  EXPECT_THROW(make_schedule(CustomFamily{{0.5, 1.5}, flags}, ScheduleRole::alpha), ScheduleError);
  EXPECT_THROW(make_schedule(CustomFamily{{0.5}, {}}, ScheduleRole::alpha), ScheduleError);
}

TEST(Schedule, HarmonicPartialSumsOutgrowLog) {
  const Schedule s = default_alpha();
  double sum = 0.0;
  for (std::size_t n = 1; n <= 1'000'000; ++n) {
    sum += s(n);
    if (n == 10 || n == 1000 || n == 1'000'000) {
      // sum_{k=2}^{n+1} 1/k >= ln((n + 2) / 2), which is unbounded in n.
      EXPECT_GE(sum, std::log(static_cast<double>(n + 2) / 2.0)) << n;
    }
  }
  EXPECT_DOUBLE_EQ(s.partial_sum(3), 0.5 + 1.0 / 3.0 + 0.25);
}
