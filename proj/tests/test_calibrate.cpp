#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "fixtures.hpp"
#include "ghzcav/calibrate.hpp"
#include "ghzcav/error.hpp"
#include "ghzcav/protocol.hpp"

using namespace ghzcav;
using ghzcav::testing::reference_device;

TEST(Calibrate, CarriersEqualizeRamanDetuning) {
  auto m = reference_device(4);
  m.spectators[1].omega32 += 0.3;  // different Delta_c,j
  auto carriers = solve_carriers(m, 0.25);
  for (std::size_t k = 0; k < carriers.size(); ++k) {
    const double pulse_detuning = m.spectators[k].omega32 - carriers[k];
    EXPECT_NEAR(m.cavity_detuning(k) - pulse_detuning, 0.25, 1e-12);
  }
  try {
    solve_carriers(m, 5.0);
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_NE(e.binding().find("pulse_detuning"), std::string::npos);
  }
  EXPECT_THROW(solve_carriers(m, 0.0), ConfigError);
}

TEST(Calibrate, RabiHitsCommonLambda) {
  auto m = reference_device(4);
  m.spectators[0].g = 0.18;
  m.spectators[2].g = 0.22;
  m.spectators[2].omega32 += 0.5;
  auto calib = calibrate_at(m, 0.3, 0.03);
  auto basis = make_basis(m);
  // Recompute lambda_j from the emitted pulses, not from the stored numbers.
  auto params = raman_parameters(m, calib.raman_pulses(0.0, 1.0), *basis);
  for (const auto& r : params) {
    EXPECT_NEAR(r.lambda(), 0.03, 1e-12);
    EXPECT_NEAR(r.delta(), 0.3, 1e-12);
  }
  EXPECT_LT(calib.lambda_spread(), 1e-12);
  EXPECT_LT(calib.delta_spread(), 1e-12);

  try {
    solve_rabi(m, 0.3, 0.01);
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_NE(e.binding().find("stark_floor"), std::string::npos);
  }
}

TEST(Calibrate, ReferenceSearch) {
  // Identical spectators, g_j = 0.2, Delta_c = 2: cavity_stark_ratio pins
  // delta >= 0.2, and at delta = 0.2 the pulse detuning margin caps Omega at
  // Delta/10 = 0.18, so chi = 0.5*0.18*0.2*(1/1.8 + 1/2) = 0.019 and
  // lambda = 0.02 + 0.019^2/0.2 = 0.021805.
  auto m = reference_device(6);
  auto calib = feasibility_search(m, MarginTargets{});
  EXPECT_NEAR(calib.delta, 0.2, 1e-9);
  EXPECT_NEAR(calib.lambda, 0.021805, 1e-9);
  for (const auto& s : calib.spectators) {
    EXPECT_NEAR(s.rabi, 0.18, 1e-9);
    EXPECT_GE(s.margins.pulse_detuning_ratio, 10.0 - 1e-6);
    EXPECT_GE(s.margins.cavity_detuning_ratio, 10.0 - 1e-9);
    EXPECT_GE(s.margins.raman_ratio, 10.0 - 1e-6);
    EXPECT_GE(s.margins.cavity_stark_ratio, 10.0 - 1e-6);
    EXPECT_GE(s.margins.pulse_stark_ratio, 10.0 - 1e-6);
  }
}

TEST(Calibrate, SearchInfeasibleNamesBinding) {
  auto m = reference_device(3, 5.0);
  try {
    feasibility_search(m, MarginTargets{});
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.binding(), "qubit 2: cavity_detuning_ratio");
  }
  // Stark-limited: with a huge raman margin chi is too small to lift lambda
  // above the largest floor when couplings differ.
  auto skew = reference_device(3);
  skew.spectators[1].g = 0.1;
  skew.spectators[1].omega32 = skew.cavity.omega + 1.0 - skew.spectators[1].omega21;
  MarginTargets tight;
  tight.raman_ratio = 1e6;
  EXPECT_THROW(feasibility_search(skew, tight), InfeasibleError);
}

TEST(Calibrate, OccupationEstimate) {
  EXPECT_NEAR(occupation_probability(10.0, 10.0), 4.0 / 104.0, 1e-15);
  EXPECT_EQ(occupation_probability(INFINITY, INFINITY), 0.0);
  EXPECT_LT(occupation_probability(20.0, 20.0), occupation_probability(10.0, 10.0));
}

TEST(Calibrate, Classification) {
  ConditionThresholds t;
  EXPECT_EQ(classify(10.0, t), ConditionStatus::Pass);
  EXPECT_EQ(classify(9.99, t), ConditionStatus::Warn);
  EXPECT_EQ(classify(3.0, t), ConditionStatus::Warn);
  EXPECT_EQ(classify(2.9, t), ConditionStatus::Fail);
  EXPECT_EQ(to_string(ConditionStatus::Warn), "warn");
}

TEST(Calibrate, ConditionReportOnReferenceDevice) {
  auto m = reference_device(6, 10.0, true);
  auto calib = feasibility_search(m, MarginTargets{});
  auto sched = build_ghz_schedule(m, calib, 10.0, 10.0);
  auto rep = condition_report(m, calib, sched);
  ASSERT_EQ(rep.occupation.size(), 5u);
  EXPECT_NEAR(rep.occupation[0], 4.0 / 104.0 + 0.0, 2e-3);
  // phi = g_j^2 (t_1b + t_1c) / Delta_c = 0.04 * (pi/2 + pi/20) / 2 = 0.011 pi
  EXPECT_NEAR(rep.phase_error[0], 0.011 * M_PI, 1e-12);
  int global = 0;
  for (const auto& c : rep.conditions) {
    if (c.qubit == 0) ++global;
    if (c.name == "pulse_speed_1a") EXPECT_NEAR(c.value, 10.0, 1e-12);
  }
  EXPECT_EQ(global, 3);
  EXPECT_EQ(rep.conditions.size(), 5u * 9u + 7u);
}
