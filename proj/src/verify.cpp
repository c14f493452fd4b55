// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include "romimg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "romimg/error.hpp"
#include "romimg/internal.hpp"
#include "romimg/oracle.hpp"
#include "romimg/rom.hpp"
#include "romimg/solver.hpp"

namespace romimg
{

namespace
{

constexpr double omega_c = 2.0 * std::numbers::pi;

struct Scene
{
  Medium medium;
  ArrayGeometry array;
  std::vector<std::size_t> nodes;
  Pulse pulse;
  double tau = 0.0;
};

Scene make_scene(const OracleScene &s)
{
  require(s.nx <= 64 && s.nz <= 64, "oracle scene: at most 64 x 64 nodes");
  Scene sc;
  sc.medium = Medium(s.nx, s.nz, s.h, 1.0);
  // Slow block well below the array.
  for (int k = s.nz * 6 / 10; k < s.nz * 7 / 10; ++k)
    for (int i = s.nx / 4; i < 3 * s.nx / 4; ++i)
      sc.medium.c()[sc.medium.index(i, k)] = 0.6;
  sc.medium.set_ref_strip(2.0 * s.h);
  sc.medium.validate();
  const double w = sc.medium.width();
  sc.array = ArrayGeometry::linear(4.0 * s.h, w - 4.0 * s.h, s.m, sc.medium.position(0, 0).z);
  sc.nodes = sc.array.nodes(sc.medium);
  sc.tau = s.tau_factor * std::numbers::pi / omega_c;
  return sc;
}

double rel(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b)
{
  return (a - b).norm() / b.norm();
}

CheckResult result(std::string name, double value, double threshold, std::string detail = {})
{
  return {std::move(name), value, threshold, value < threshold, std::move(detail)};
}

} // namespace

CheckResult check_internal_wave_identity(const OracleScene &s)
{
  const Scene sc = make_scene(s);
  const SpectralModel model{sc.pulse, 0.0};
  const ImagingGrid grid = ImagingGrid::full(sc.medium);

  auto basis = [&](const Medium &med) {
    const DiscretizedOperator op(med);
    const DataTensor D = oracle_data_tensor(op, model, sc.nodes, sc.tau, s.n);
    SnapshotFields U{grid, s.n, s.m, sc.tau, oracle_snapshots(op, model, sc.nodes, sc.tau, s.n)};
    return orthonormalize(U, block_cholesky(assemble_mass(D)));
  };
  const SnapshotBasis true_basis = basis(sc.medium);
  const SnapshotBasis ref_basis = basis(sc.medium.reference());
  const DiscretizedOperator op(sc.medium);

  std::mt19937_64 rng(s.seed);
  const Point lo = grid.origin();
  std::uniform_real_distribution<double> ux(lo.x, lo.x + (grid.count_x() - 1) * grid.dx());
  std::uniform_real_distribution<double> uz(lo.z, lo.z + (grid.count_z() - 1) * grid.dz());
  double worst = 0.0;
  for (int q = 0; q < s.random_points; ++q)
  {
    const Point y{ux(rng), uz(rng)};
    const Eigen::MatrixXd g = internal_wave(true_basis.R, ref_basis, y);
    const Eigen::VectorXd source = true_basis.V * ref_basis.at(y).transpose();
    const Eigen::MatrixXd direct = oracle_internal_wave(op, model, sc.nodes, sc.tau, s.n, source);
    worst = std::max(worst, (g - direct).cwiseAbs().maxCoeff() / direct.cwiseAbs().maxCoeff());
  }
  return result("internal wave identity", worst, 1e-10,
                std::to_string(s.random_points) + " random points");
}

std::vector<CheckResult> check_mass_stiffness(const OracleScene &s)
{
  const Scene sc = make_scene(s);
  const auto shots = simulate_shots(sc.medium, sc.array, sc.pulse, sc.tau, s.n);
  const DataTensor D = compute_data_tensor(shots);
  const BlockMatrix M = assemble_mass(D);
  const BlockMatrix S = assemble_stiffness(D);

  const Eigen::MatrixXd U =
    simulate_snapshots(sc.medium, sc.array, sc.pulse, sc.tau, s.n, ImagingGrid::full(sc.medium)).U;
  const DiscretizedOperator op(sc.medium);
  const SpectralModel lf{sc.pulse, shots.front().dt};
  const Eigen::VectorXd omega = lf.frequencies(op);
  const Eigen::MatrixXd PU = op.apply_diagonal((sc.tau * omega).array().cos().matrix(), U);
  const double h2 = sc.medium.h() * sc.medium.h();
  const Eigen::MatrixXd Mq = h2 * U.transpose() * U;
  const Eigen::MatrixXd Sq = h2 * U.transpose() * PU;
  return {result("mass quadrature", rel(M.data, Mq), 1e-10),
          result("stiffness quadrature", rel(S.data, Sq), 1e-10)};
}

CheckResult check_propagator_projection(const OracleScene &s)
{
  const Scene sc = make_scene(s);
  const auto shots = simulate_shots(sc.medium, sc.array, sc.pulse, sc.tau, s.n);
  const DataTensor D = compute_data_tensor(shots);
  const BlockMatrix R = block_cholesky(assemble_mass(D));
  const BlockMatrix P = rom_propagator(R, assemble_stiffness(D));

  const Eigen::MatrixXd U =
    simulate_snapshots(sc.medium, sc.array, sc.pulse, sc.tau, s.n, ImagingGrid::full(sc.medium)).U;
  const Eigen::MatrixXd V = solve_right(U, R);
  const DiscretizedOperator op(sc.medium);
  const SpectralModel lf{sc.pulse, shots.front().dt};
  const Eigen::VectorXd omega = lf.frequencies(op);
  const Eigen::MatrixXd PV = op.apply_diagonal((sc.tau * omega).array().cos().matrix(), V);
  const double h2 = sc.medium.h() * sc.medium.h();
  return result("propagator projection", rel(P.data, h2 * V.transpose() * PV), 1e-8);
}

std::vector<CheckResult> check_layered()
{
  std::vector<CheckResult> out;
  SpanOptions opts;
  opts.pulse = CompactPulse{omega_c, 1.0};
  const double tau = 2.0 * opts.pulse.t_f;
  const int n = 25;

  // Interface half-way between two sampling positions: no pulse straddles it at t = j tau.
  const auto goup = LayeredMedium::single(1.0, 3.0, 5.5 * tau, 60.0);
  const auto half = LayeredMedium::single(1.0, 3.0, 5.25 * tau, 60.0);
  double rg = 0.0, rh = 0.0;
  for (int j = 0; j < n; ++j)
  {
    rg = std::max(rg, span_residual(goup, tau, n, j, opts).residual);
    rh = std::max(rh, span_residual(half, tau, n, j, opts).residual);
  }
  out.push_back(result("goupillaud span residual", rg, 1e-8, "2 T0 / tau = 11"));
  out.push_back({"half-integer residual exceeds goupillaud", rh, rg, rh > rg,
                 "2 T0 / tau = 10.5"});

  const Profile phi = [p = opts.pulse](double T) { return p.phi(T); };
  const std::vector<double> times = {3.0, 6.0, 9.0, 12.0};
  const LayeredSolution fd = solve_layered(goup, phi, 1.0 / 256.0, 1.0, times);
  double worst = 0.0;
  for (std::size_t q = 0; q < times.size(); ++q)
  {
    const int qm = series_terms(goup, times[q], opts.pulse.t_f);
    Eigen::VectorXd s(fd.nodes.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
      s(i) = single_layer_series(goup, phi, times[q], fd.nodes(i), qm);
    worst = std::max(worst, (s - fd.states[q]).norm() / s.norm());
  }
  out.push_back(result("series vs 1D solver (rel L2)", worst, 1e-2, "t in {3, 6, 9, 12}"));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> logz(-3.0, 3.0);
  double energy = 0.0;
  for (int q = 0; q < 1000; ++q)
  {
    const auto [R, T] = reflection_transmission(std::pow(10.0, logz(rng)), std::pow(10.0, logz(rng)));
    energy = std::max(energy, std::abs(R * R + T * T - 1.0));
  }
  out.push_back(result("R^2 + T^2 - 1", energy, 1e-14, "1000 random impedance pairs"));
  return out;
}

std::vector<CheckResult> check_modes()
{
  std::vector<CheckResult> out;
  const WaveguideModes modes = mode_table(3.3, omega_c, 1.0);
  const Pulse pulse;
  for (int j : {1, 2})
  {
    const ModeArrival a = measure_mode_arrival(modes, j, 8.0, 1.0 / 16.0, pulse);
    out.push_back(result("mode " + std::to_string(j) + " arrival offset",
                         std::abs(a.measured - a.predicted), a.pulse_width,
                         "predicted " + std::to_string(a.predicted) + ", measured " +
                           std::to_string(a.measured)));
  }
  const Eigen::MatrixXd Q = mode_coupling(modes.D, 0.0, modes.D, modes.N);
  out.push_back(result("full-aperture Q - I",
                       (Q - Eigen::MatrixXd::Identity(modes.N, modes.N)).cwiseAbs().maxCoeff(),
                       1e-12, "N = " + std::to_string(modes.N)));
  return out;
}

std::vector<CheckResult> run_verification(const OracleScene &scene)
{
  std::vector<CheckResult> out;
  out.push_back(check_internal_wave_identity(scene));
  for (auto &r : check_mass_stiffness(scene))
    out.push_back(std::move(r));
  out.push_back(check_propagator_projection(scene));
  for (auto &r : check_layered())
    out.push_back(std::move(r));
  for (auto &r : check_modes())
    out.push_back(std::move(r));
  return out;
}

} // namespace romimg
