#include "idm_follow.hpp"

#include <argus/idm.hpp>

#include <gtest/gtest.h>

using namespace argus;

TEST(Idm, FreeRoadEquilibrium)
{
  const IdmParams p;
  EXPECT_DOUBLE_EQ(idm_accel(p.v0, LeadingActor{}, p), 0.0);
}

TEST(Idm, StandingStartFarBehindLeader)
{
  const IdmParams p;
  LeadingActor la;
  la.net_gap = 400;
  la.rel_speed = 0;
  EXPECT_NEAR(idm_accel(0.0, la, p), 11.0 * (1.0 - std::pow(4.0 / 400.0, 2)), 1e-12);
  EXPECT_NEAR(idm_accel(0.0, la, p), 10.9989, 1e-12);
}

TEST(Idm, DesiredSpeedAtDesiredGap)
{
  const IdmParams p;
  LeadingActor la;
  la.rel_speed = 1.5;
  la.net_gap = idm_desired_gap(p.v0, la.rel_speed, p);
  EXPECT_NEAR(idm_accel(p.v0, la, p), -11.0, 1e-12);
}

TEST(Idm, DesiredGapFormula)
{
  const IdmParams p;
  // s* = s0 + vT + v dv / (2 sqrt(ab))
  EXPECT_NEAR(idm_desired_gap(8, 2, p), 4 + 8 * 0.25 + 16 / (2 * std::sqrt(220.0)), 1e-12);
  EXPECT_DOUBLE_EQ(idm_desired_gap(10, -100, p), 0.0);
}

TEST(Idm, GapFloorAvoidsSingularity)
{
  const IdmParams p;
  LeadingActor la;
  la.net_gap = 0.0;
  EXPECT_TRUE(std::isfinite(idm_accel(5.0, la, p)));
  la.net_gap = -3.0;
  EXPECT_EQ(idm_accel(5.0, la, p), idm_accel(5.0, LeadingActor{"", kMinNetGap, 0.0, false}, p));
}

TEST(Idm, MonotoneInSpeedAndGap)
{
  // With dv held fixed, s* grows with v only while dv >= -2 T sqrt(a b) (about -7.4 m/s here).
  const IdmParams p;
  const double dv_min = -2.0 * p.T * std::sqrt(p.a_max * p.b_comf);
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> v(0, 20), dv(dv_min, 10), s(0.1, 200), d(0, 5);
  for (int i = 0; i < 5000; ++i) {
    LeadingActor la;
    la.net_gap = s(rng);
    la.rel_speed = dv(rng);
    const double v1 = v(rng);
    const double v2 = v1 + d(rng);
    ASSERT_GE(idm_accel(v1, la, p), idm_accel(v2, la, p) - 1e-9);
    LeadingActor far = la;
    far.net_gap += d(rng);
    ASSERT_LE(idm_accel(v1, la, p), idm_accel(v1, far, p) + 1e-9);
  }
}

TEST(Idm, NeverRearEndsARandomLeader)
{
  std::mt19937_64 rng(52);
  IdmParams p;
  p.v0 = 0.72 * 13.9;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto r = argus_test::follow_random_leader(rng, p);
    ASSERT_GT(r.min_gap, 0.0) << "trial " << trial;
  }
}

TEST(Idm, ParametersMustBePositive)
{
  IdmParams p;
  EXPECT_NO_THROW(p.validate());
  p.T = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}
