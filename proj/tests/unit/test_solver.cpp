// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"

#include "fixtures.hpp"
#include "romimg/error.hpp"
#include "romimg/oracle.hpp"
#include "romimg/solver.hpp"

using namespace romimg;
using romimg::test::Small;

TEST_CASE("shots are reciprocal")
{
  Small s;
  const auto a = simulate_shot(s.medium, s.array, s.pulse, 0, s.tau, s.n);
  const auto b = simulate_shot(s.medium, s.array, s.pulse, 3, s.tau, s.n);
  const Eigen::VectorXd ab = a.traces.col(3), ba = b.traces.col(0);
  CHECK((ab - ba).norm() / ab.norm() < 1e-8);
}

TEST_CASE("zero pulse gives zero traces")
{
  Small s;
  const auto r = simulate_shot(s.medium, s.array, Pulse(test::omega_c, 0.25, 0.0), 1, s.tau, s.n);
  CHECK(r.traces.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("discrete energy is conserved once the source is off")
{
  Small s;
  const double dt = choose_time_step(s.medium, s.tau, 0.5);
  const LeapfrogSolver solver(s.medium, dt);
  const DiscretePulse dp(s.pulse, dt);
  PointSource src;
  src.node = s.array.nodes(s.medium)[2];
  src.k_first = -(dp.full_steps() + 1);
  for (int k = src.k_first; k <= dp.full_steps() + 1; ++k)
    src.amplitude.push_back(dp.full_source(k));
  const int k_off = dp.full_steps() + 2;
  std::vector<double> prev;
  std::vector<double> energies;
  solver.run(std::span(&src, 1), src.k_first, k_off + 2000, [&](int k, std::span<const double> w) {
    if (k > k_off && (k - k_off) % 250 == 0)
      energies.push_back(solver.energy(prev, {w.begin(), w.end()}));
    prev.assign(w.begin(), w.end());
  });
  REQUIRE(energies.size() >= 8);
  for (double e : energies)
    CHECK(std::abs(e - energies.front()) / energies.front() < 2e-10);
}

TEST_CASE("traces are causal and arrive on time")
{
  // Walls and bottom are far enough that nothing but the direct wave arrives in the window.
  Medium med(127, 112, 0.125, 1.0);
  med.set_ref_strip(0.25);
  const auto arr = ArrayGeometry::linear(3.0, 13.0, 2, 0.0);
  const Pulse pulse;
  const double tau = 0.4 * std::numbers::pi / test::omega_c;
  const auto r = simulate_shot(med, arr, pulse, 0, tau, 40);
  const double d = 10.0;
  const double width = 2.0 / pulse.bandwidth();
  const double cutoff = d - pulse.t_f();
  double peak = 0.0, t_peak = 0.0, before = 0.0;
  for (int k = r.k_first; k <= r.k_last(); ++k)
  {
    const double t = k * r.dt;
    const double v = std::abs(r.at(k, 1));
    if (t < cutoff)
      before = std::max(before, v);
    if (v > peak)
    {
      peak = v;
      t_peak = t;
    }
  }
  CHECK(before < 1e-6 * peak);
  CHECK(std::abs(t_peak - d) < width);
}

TEST_CASE("data tensor reads the causal trace for j tau >= t_f and is symmetric")
{
  Small s;
  const auto shots = simulate_shots(s.medium, s.array, s.pulse, s.tau, 30);
  const DataTensor D = compute_data_tensor(shots);
  CHECK(D.max_asymmetry() < 1e-6);
  for (int j = 0; j < 2 * D.n; ++j)
    if (j * D.tau >= s.pulse.t_f())
      for (int sr = 0; sr < D.m; ++sr)
        for (int rr = 0; rr < D.m; ++rr)
          CHECK(D.D[j](sr, rr) == shots[sr].sample(j, rr));
}

TEST_CASE("configurations violating the stability bound are rejected")
{
  Small s;
  SimulationOptions opts;
  opts.dt = s.medium.h();
  CHECK_THROWS_AS(simulate_shot(s.medium, s.array, s.pulse, 0, s.tau, s.n, opts), ConfigError);
  CHECK_THROWS_AS(simulate_shot(s.medium, s.array, s.pulse, 7, s.tau, s.n), ConfigError);
}

TEST_CASE("data converge under grid refinement")
{
  // Same width at both resolutions, walls beyond reach of the recorded window.
  auto data = [](double h) {
    Medium med(static_cast<int>(std::lround(12.0 / h)) - 1, static_cast<int>(std::lround(8.0 / h)), h, 1.0);
    med.set_ref_strip(0.25);
    const auto arr = ArrayGeometry::linear(5.5, 6.5, 2, 0.0);
    return compute_data_tensor(
      simulate_shots(med, arr, Pulse(), 0.4 * std::numbers::pi / test::omega_c, 6));
  };
  const DataTensor a = data(1.0 / 16.0), b = data(1.0 / 32.0);
  // Relative to the largest sample: single D_j pass near zero crossings.
  double worst = 0.0, scale = 0.0;
  for (int j = 0; j < 2 * a.n; ++j)
  {
    worst = std::max(worst, (a.D[j] - b.D[j]).norm());
    scale = std::max(scale, b.D[j].norm());
  }
  CHECK(worst < 0.01 * scale);
}

TEST_CASE("first snapshot is localized near the sensors")
{
  Medium med(64, 64, 0.125, 1.0);
  med.set_ref_strip(0.25);
  const auto arr = ArrayGeometry::linear(3.0, 5.0, 2, 0.0);
  const Pulse pulse;
  const auto grid = ImagingGrid::full(med);
  const auto U = simulate_snapshots(med, arr, pulse, 0.4 * std::numbers::pi / test::omega_c, 2, grid);
  const double radius = 3.0 * pulse.t_f();
  double total = 0.0, outside = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p)
  {
    const double e = U.U.row(static_cast<Eigen::Index>(p)).head(2).squaredNorm();
    total += e;
    const Point y = grid.position(p);
    if (distance(y, arr.positions[0]) > radius && distance(y, arr.positions[1]) > radius)
      outside += e;
  }
  CHECK(outside < 1e-6 * total);
}

TEST_CASE("snapshots match the spectral oracle")
{
  Small s;
  const auto grid = ImagingGrid::full(s.medium);
  const auto nodes = s.array.nodes(s.medium);
  const DiscretizedOperator op(s.medium);
  const auto U = simulate_snapshots(s.medium, s.array, s.pulse, s.tau, s.n, grid);

  SUBCASE("leapfrog model: same discrete dynamics")
  {
    const double dt = choose_time_step(s.medium, s.tau, 0.5);
    const Eigen::MatrixXd O = oracle_snapshots(op, SpectralModel{s.pulse, dt}, nodes, s.tau, s.n);
    CHECK((U.U - O).norm() / O.norm() < 1e-8);
  }
  SUBCASE("continuous time model with a fine step")
  {
    SimulationOptions fine;
    fine.cfl = 0.05;
    const auto Uf = simulate_snapshots(s.medium, s.array, s.pulse, s.tau, s.n, grid, fine);
    const Eigen::MatrixXd O = oracle_snapshots(op, SpectralModel{s.pulse, 0.0}, nodes, s.tau, s.n);
    CHECK((Uf.U - O).norm() / O.norm() < 0.02);
  }
}
