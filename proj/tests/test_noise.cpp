#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "fixtures.hpp"
#include "ghzcav/calibrate.hpp"
#include "ghzcav/error.hpp"
#include "ghzcav/metrics.hpp"
#include "ghzcav/noise.hpp"
#include "ghzcav/protocol.hpp"

using namespace ghzcav;
using ghzcav::testing::reference_device;

namespace {

struct Setup {
  DeviceModel model;
  Schedule schedule;
};

Setup setup(int n, bool noisy) {
  Setup s{reference_device(n, 10.0, noisy), {}};
  s.schedule = build_ghz_schedule(s.model, calibrate_at(s.model, 0.2, 0.022), 10.0, 10.0);
  return s;
}

std::vector<NoiseChannel> only(std::vector<NoiseChannel> channels, const std::string& label) {
  for (auto& c : channels) {
    if (c.label != label) c.rate = 0.0;
  }
  return channels;
}

}  // namespace

TEST(Noise, SplitMixReferenceValues) {
  // First outputs of the SplitMix64 generator seeded with 0 and 1.
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(splitmix64(1), 0x910A2DEC89025CC1ULL);
}

TEST(Noise, PairwiseSum) {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_EQ(pairwise_sum(v.data(), v.size()), 500500.0);
  EXPECT_EQ(pairwise_sum(v.data(), 0), 0.0);
}

TEST(Noise, ChannelInventory) {
  auto s = setup(3, true);
  auto b = make_basis(s.model);
  auto ch = noise_channels(s.model, *b);
  ASSERT_EQ(ch.size(), 4u + 2u * 2u + 1u);
  EXPECT_EQ(ch.front().label, "qubit1_level2_relaxation");
  EXPECT_EQ(ch[4].label, "qubit2_level1_relaxation");
  EXPECT_EQ(ch.back().label, "cavity_decay");
  EXPECT_NEAR(ch.back().rate, s.model.cavity.kappa(), 0.0);
  // Dephasing: L^dagger L = P/2 on the dephased level.
  const auto& deph = ch[1];
  EXPECT_EQ(deph.label, "qubit1_level2_dephasing");
  Eigen::MatrixXcd ll = (deph.op.adjoint() * deph.op).to_dense();
  const int lvl2[] = {2, 0, 0, 0};
  const auto i = static_cast<Eigen::Index>(b->flatten(lvl2));
  EXPECT_NEAR(ll(i, i).real(), 0.5, 1e-15);
}

TEST(Noise, ZeroRatesReproduceUnitary) {
  auto s = setup(3, false);
  ProtocolOptions opt;
  ProtocolEvolver ev(s.model, s.schedule, opt);
  auto psi0 = initial_product_state(ev.basis());
  auto ch = noise_channels(s.model, *ev.basis());
  auto r = run_trajectories(ev, psi0, ch, {10, 5, 0.0});
  EXPECT_TRUE(r.deterministic);
  EXPECT_EQ(r.std_error, 0.0);
  auto ref = run_protocol(s.model, s.schedule, psi0, opt);
  EXPECT_EQ(r.mean, fidelity_numeric(ref.final_state));
}

TEST(Noise, DeterministicPerSeed) {
  auto s = setup(2, true);
  ProtocolOptions opt;
  ProtocolEvolver ev(s.model, s.schedule, opt);
  auto psi0 = initial_product_state(ev.basis());
  auto ch = noise_channels(s.model, *ev.basis());
  auto a = run_trajectories(ev, psi0, ch, {40, 42, 0.0});
  auto b = run_trajectories(ev, psi0, ch, {40, 42, 0.0});
  auto c = run_trajectories(ev, psi0, ch, {40, 43, 0.0});
  EXPECT_EQ(a.fidelities, b.fidelities);
  EXPECT_NE(a.fidelities, c.fidelities);
  EXPECT_GT(a.mean_jumps, 0.0);
}

TEST(Noise, RefusesCoarseJumpResolution) {
  auto s = setup(2, true);
  ProtocolOptions opt;
  ProtocolEvolver ev(s.model, s.schedule, opt);
  auto ch = noise_channels(s.model, *ev.basis());
  EXPECT_THROW(run_trajectories(ev, initial_product_state(ev.basis()), ch, {4, 0, 1e6}), ConfigError);
  EXPECT_THROW(run_trajectories(ev, initial_product_state(ev.basis()), ch, {0, 0, 0.0}), ConfigError);
}

TEST(Noise, TrajectoriesAgreeWithDensityMatrix) {
  auto s = setup(2, true);
  ProtocolOptions opt;
  ProtocolEvolver ev(s.model, s.schedule, opt);
  auto psi0 = initial_product_state(ev.basis());
  auto all = noise_channels(s.model, *ev.basis());
  for (const std::string label : {"cavity_decay", "qubit2_level1_dephasing", "qubit1_level1_relaxation"}) {
    auto ch = only(all, label);
    const double exact = lindblad_fidelity(ev, psi0, ch, 0.05);
    auto r = run_trajectories(ev, psi0, ch, {800, 9, 0.0});
    EXPECT_NEAR(r.mean, exact, 4.0 * r.std_error + 1e-6) << label;
    EXPECT_LT(exact, 1.0);
  }
}

TEST(Noise, DephasingConvention) {
  // A lone dephasing channel L = sqrt(gamma/2) P on |1> of a spectator decays
  // the |0><1| coherence at gamma/4: coherence e^{-gamma t/4}.
  auto s = setup(2, false);
  s.model.spectators[0].level1.dephasing = 1e-3;
  ProtocolOptions opt;
  ProtocolEvolver ev(s.model, s.schedule, opt);
  auto ch = only(noise_channels(s.model, *ev.basis()), "qubit2_level1_dephasing");
  ASSERT_NEAR(ch[5].rate, 1e-3, 0.0);
  const double f = lindblad_fidelity(ev, initial_product_state(ev.basis()), ch, 0.05);
  // The spectator stays diagonal-phase only, so dephasing scales every
  // coherence between its |0> and |1> by c. Half of the 16 equal-weight
  // pairs of the n = 2 target differ on the spectator: F = (1 + c)/2.
  const double c = std::exp(-1e-3 * s.schedule.total_time / 4.0);
  EXPECT_NEAR(f, (1.0 + c) / 2.0, 1e-6);
}
