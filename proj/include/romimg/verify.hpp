// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_VERIFY_HPP
#define ROMIMG_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "romimg/layered1d.hpp"

namespace romimg
{

struct CheckResult
{
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

// Small scene for the dense spectral oracle: 24 x 20 nodes at h = 1/8 with one slow block
// and m sensors on the first row.
struct OracleScene
{
  int nx = 24;
  int nz = 20;
  double h = 0.125;
  int m = 6;
  int n = 8;
  double tau_factor = 0.4;
  int random_points = 24;
  std::uint64_t seed = 7;
};

// Internal wave V_o(y) R e_j against cos(t_j sqrt A) fhat^{1/2}(sqrt A) V V_o(y)^T read at
// the sensors, every quantity from the spectral oracle. Max relative error over y.
CheckResult check_internal_wave_identity(const OracleScene &scene = {});
// Data-formula M and S against h^2 U^T U and h^2 U^T cos(tau sqrt A) U with simulated
// traces and simulated snapshots.
std::vector<CheckResult> check_mass_stiffness(const OracleScene &scene = {});
// P^ROM against the Galerkin projection h^2 V^T cos(tau sqrt A) V.
CheckResult check_propagator_projection(const OracleScene &scene = {});

// Layered medium: Goupillaud residual, half-integer ordering, series against the 1D solver,
// R^2 + T^2 = 1.
std::vector<CheckResult> check_layered();
// Waveguide modes: arrivals for j = 1, 2 and full-aperture Q.
std::vector<CheckResult> check_modes();

std::vector<CheckResult> run_verification(const OracleScene &scene = {});

} // namespace romimg

#endif // ROMIMG_VERIFY_HPP
