#pragma once

#include <cmath>
#include <numbers>

#include "ghzcav/hamiltonians.hpp"

namespace ghzcav::testing {

// Reference device in units of qubit 1's coupling (g/2pi = 220 MHz): qubit 1
// resonant with a 3 GHz cavity, spectators with g_j = 0.2 g and
// Delta_c,j = ratio * g_j, lifetimes 1 us (level 1) and 0.5 us (level 2).
inline DeviceModel reference_device(int n_qubits, double ratio = 10.0, bool noisy = false) {
  constexpr double g_hz = 2.2e8;
  const double to_internal = 1.0 / (2.0 * std::numbers::pi * g_hz);
  DeviceModel m;
  m.first.g = 1.0;
  m.first.omega10 = 2.5e9 / g_hz;
  m.first.omega21 = 3.0e9 / g_hz;
  m.cavity.omega = 3.0e9 / g_hz;
  m.cavity.quality = noisy ? 5e4 : INFINITY;
  m.cavity.n_max = 2;
  if (noisy) {
    m.first.level1 = {1e6 * to_internal, 1e6 * to_internal};
    m.first.level2 = {2e6 * to_internal, 2e6 * to_internal};
  }
  for (int k = 0; k + 1 < n_qubits; ++k) {
    SpectatorQubit s;
    s.g = 0.2;
    s.omega10 = (2.0e9 + 1e7 * k) / g_hz;
    s.omega21 = (2.4e9 + 1e7 * k) / g_hz;
    s.omega32 = m.cavity.omega + ratio * s.g - s.omega21;
    if (noisy) s.level1 = {1e6 * to_internal, 1e6 * to_internal};
    m.spectators.push_back(s);
  }
  return m;
}

}  // namespace ghzcav::testing
