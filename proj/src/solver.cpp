// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include "romimg/solver.hpp"

#include <algorithm>
#include <cmath>

#include "romimg/error.hpp"
#include "romimg/parallel.hpp"

namespace romimg
{

void DataTensor::validate() const
{
  require(m > 0 && n > 0, "data tensor: empty");
  require(tau > 0.0, "data tensor: tau must be positive");
  require(static_cast<int>(D.size()) == 2 * n, "data tensor: expected 2n data matrices");
  for (const auto &d : D)
    require(d.rows() == m && d.cols() == m, "data tensor: data matrices must be m x m");
}

double DataTensor::max_asymmetry() const
{
  double worst = 0.0;
  for (const auto &d : D)
  {
    const double norm = d.norm();
    if (norm > 0.0)
      worst = std::max(worst, (d - d.transpose()).norm() / norm);
  }
  return worst;
}

void DataTensor::symmetrize()
{
  for (auto &d : D)
  {
    Eigen::MatrixXd sym = 0.5 * (d + d.transpose());
    d = std::move(sym);
  }
}

WaveOperator::WaveOperator(const Medium &medium)
  : nx_(medium.nx()), nz_(medium.nz()), inv_h2_(1.0 / (medium.h() * medium.h())), c_(medium.c())
{
  for (int e = 0; e < 4; ++e)
    neumann_[e] = medium.boundary(static_cast<Edge>(e)) == Boundary::SoundHard;
}

double WaveOperator::spectral_bound() const
{
  const double cmax = *std::max_element(c_.begin(), c_.end());
  return 8.0 * cmax * cmax * inv_h2_;
}

void WaveOperator::apply(std::span<const double> w, std::span<double> out) const
{
  const std::size_t count = c_.size();
  require(w.size() == count && out.size() == count, "wave operator: dimension mismatch");
  // Per-thread buffer: one operator may be shared by concurrent solves.
  thread_local std::vector<double> scratch;
  scratch.resize(count);
  double *cw = scratch.data();
  for (std::size_t i = 0; i < count; ++i)
    cw[i] = c_[i] * w[i];

  const bool left_n = neumann_[static_cast<int>(Edge::Left)];
  const bool right_n = neumann_[static_cast<int>(Edge::Right)];
  const bool top_n = neumann_[static_cast<int>(Edge::Top)];
  const bool bottom_n = neumann_[static_cast<int>(Edge::Bottom)];
  const std::vector<double> zeros(static_cast<std::size_t>(nx_), 0.0);

  for (int k = 0; k < nz_; ++k)
  {
    const double *row = cw + static_cast<std::size_t>(k) * nx_;
    const double *up = k > 0 ? row - nx_ : (top_n ? row : zeros.data());
    const double *down = k < nz_ - 1 ? row + nx_ : (bottom_n ? row : zeros.data());
    const double *ck = c_.data() + static_cast<std::size_t>(k) * nx_;
    double *o = out.data() + static_cast<std::size_t>(k) * nx_;

    for (int i = 0; i < nx_; ++i)
    {
      const double l = i > 0 ? row[i - 1] : (left_n ? row[i] : 0.0);
      const double r = i < nx_ - 1 ? row[i + 1] : (right_n ? row[i] : 0.0);
      o[i] = ck[i] * (4.0 * row[i] - l - r - up[i] - down[i]) * inv_h2_;
    }
  }
}

double choose_time_step(const Medium &medium, double tau, double cfl)
{
  require(tau > 0.0, "solver: tau must be positive");
  require(cfl > 0.0 && cfl <= 1.0 / std::sqrt(2.0), "solver: CFL factor must lie in (0, 1/sqrt 2]");
  const double cmax = std::max(medium.c_max(), medium.c_ref_max());
  const double dt_max = cfl * medium.h() / cmax;
  const int steps = static_cast<int>(std::ceil(tau / dt_max - 1e-12));
  return tau / std::max(steps, 1);
}

LeapfrogSolver::LeapfrogSolver(const Medium &medium, double dt)
  : h2_(medium.h() * medium.h()), dt_(dt), op_(medium)
{
  require(dt > 0.0, "solver: time step must be positive");
  if (dt * dt * op_.spectral_bound() > 4.0)
    throw ConfigError("solver: time step violates the CFL stability bound");
}

void LeapfrogSolver::run(std::span<const PointSource> sources, int k_first, int k_last,
                         const Observer &observer) const
{
  require(k_last >= k_first, "solver: empty time window");
  const std::size_t count = op_.size();
  for (const auto &s : sources)
    require(s.node < count, "solver: source off the grid");

  std::vector<double> prev(count, 0.0), cur(count, 0.0), next(count, 0.0), aw(count, 0.0);
  const double dt2 = dt_ * dt_;
  const double inject = dt2 / h2_;
  observer(k_first, cur);
  for (int k = k_first; k < k_last; ++k)
  {
    op_.apply(cur, aw);
    for (std::size_t i = 0; i < count; ++i)
      next[i] = 2.0 * cur[i] - prev[i] - dt2 * aw[i];
    for (const auto &s : sources)
      next[s.node] += inject * s.at(k);
    std::swap(prev, cur);
    std::swap(cur, next);
    observer(k + 1, cur);
  }
}

double LeapfrogSolver::energy(std::span<const double> prev, std::span<const double> next) const
{
  std::vector<double> aw(op_.size());
  op_.apply(next, aw);
  double kinetic = 0.0;
  double potential = 0.0;
  for (std::size_t i = 0; i < aw.size(); ++i)
  {
    const double v = (next[i] - prev[i]) / dt_;
    kinetic += v * v;
    potential += aw[i] * prev[i];
  }
  return h2_ * (kinetic + potential);
}

double ShotRecord::at(int k, int r) const
{
  if (k < k_first)
    return 0.0;
  require(k <= k_last(), "shot record: time outside the recorded window");
  return traces(k - k_first, r);
}

namespace
{

struct TimeLattice
{
  double dt;
  int steps_per_tau;
};

TimeLattice time_lattice(const Medium &medium, double tau, const SimulationOptions &opts)
{
  double dt = opts.dt;
  if (dt <= 0.0)
    dt = choose_time_step(medium, tau, opts.cfl);
  const double ratio = tau / dt;
  const int steps = static_cast<int>(std::lround(ratio));
  require(steps >= 1 && std::abs(ratio - steps) < 1e-9 * ratio,
          "solver: time step must divide the sampling interval tau");
  return {tau / steps, steps};
}

void check_setup(const Medium &medium, const ArrayGeometry &array, double tau, int n)
{
  medium.validate();
  require(tau > 0.0, "solver: tau must be positive");
  require(n >= 1, "solver: n must be at least 1");
  require(array.m() >= 1, "solver: empty array");
}

} // namespace

ShotRecord simulate_shot(const Medium &medium, const ArrayGeometry &array, const Pulse &pulse,
                         int source_index, double tau, int n, const SimulationOptions &opts)
{
  check_setup(medium, array, tau, n);
  require(source_index >= 0 && source_index < array.m(), "solver: source index out of range");
  const auto nodes = array.nodes(medium);
  const TimeLattice lattice = time_lattice(medium, tau, opts);
  const DiscretePulse dp(pulse, lattice.dt);

  PointSource src;
  src.node = nodes[source_index];
  src.k_first = -(dp.full_steps() + 1);
  for (int k = src.k_first; k <= dp.full_steps() + 1; ++k)
    src.amplitude.push_back(dp.full_source(k));

  ShotRecord rec;
  rec.source = source_index;
  rec.dt = lattice.dt;
  rec.tau = tau;
  rec.n = n;
  rec.steps_per_tau = lattice.steps_per_tau;
  rec.k_first = src.k_first;
  const int k_last = (2 * n - 1) * lattice.steps_per_tau;
  rec.traces.setZero(k_last - rec.k_first + 1, array.m());

  const LeapfrogSolver solver(medium, lattice.dt);
  solver.run(std::span(&src, 1), rec.k_first, k_last, [&](int k, std::span<const double> w) {
    for (int r = 0; r < array.m(); ++r)
      rec.traces(k - rec.k_first, r) = w[nodes[r]];
  });
  return rec;
}

std::vector<ShotRecord> simulate_shots(const Medium &medium, const ArrayGeometry &array,
                                       const Pulse &pulse, double tau, int n,
                                       const SimulationOptions &opts)
{
  std::vector<ShotRecord> out(static_cast<std::size_t>(array.m()));
  parallel_for(out.size(), [&](std::size_t s) {
    out[s] = simulate_shot(medium, array, pulse, static_cast<int>(s), tau, n, opts);
  });
  return out;
}

DataTensor compute_data_tensor(std::span<const ShotRecord> records)
{
  require(!records.empty(), "data tensor: no shot records");
  const ShotRecord &first = records.front();
  const int m = first.m();
  require(static_cast<int>(records.size()) == m, "data tensor: need one shot per sensor");
  for (const auto &rec : records)
    require(rec.m() == m && rec.n == first.n && rec.tau == first.tau && rec.dt == first.dt &&
              rec.k_first == first.k_first && rec.traces.rows() == first.traces.rows(),
            "data tensor: shot records have mismatched sampling");

  DataTensor out;
  out.m = m;
  out.n = first.n;
  out.tau = first.tau;
  out.D.assign(2 * first.n, Eigen::MatrixXd::Zero(m, m));
  for (const auto &rec : records)
    for (int j = 0; j < 2 * first.n; ++j)
      for (int r = 0; r < m; ++r)
        out.D[j](rec.source, r) = rec.sample(j, r) + rec.sample(-j, r);
  return out;
}

SnapshotFields simulate_snapshots(const Medium &medium, const ArrayGeometry &array,
                                  const Pulse &pulse, double tau, int n, const ImagingGrid &grid,
                                  const SimulationOptions &opts)
{
  check_setup(medium, array, tau, n);
  for (std::size_t node : grid.nodes())
    require(node < medium.size(), "snapshots: grid outside the domain");
  const auto nodes = array.nodes(medium);
  const TimeLattice lattice = time_lattice(medium, tau, opts);
  const DiscretePulse dp(pulse, lattice.dt);
  const int m = array.m();
  const int per_tau = lattice.steps_per_tau;

  SnapshotFields out;
  out.grid = grid;
  out.n = n;
  out.m = m;
  out.tau = tau;
  out.U.setZero(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(n) * m);

  parallel_for(static_cast<std::size_t>(m), [&](std::size_t s) {
    PointSource src;
    src.node = nodes[s];
    src.k_first = -(dp.half_steps() + 1);
    for (int k = src.k_first; k <= dp.half_steps() + 1; ++k)
      src.amplitude.push_back(dp.half_source(k));

    const LeapfrogSolver solver(medium, lattice.dt);
    const int k_last = (n - 1) * per_tau;
    solver.run(std::span(&src, 1), src.k_first, k_last, [&](int k, std::span<const double> w) {
      if (k % per_tau != 0)
        return;
      const int j = std::abs(k / per_tau);
      if (j >= n)
        return;
      const Eigen::Index col = static_cast<Eigen::Index>(j) * m + static_cast<Eigen::Index>(s);
      for (std::size_t p = 0; p < grid.size(); ++p)
        out.U(static_cast<Eigen::Index>(p), col) += w[grid.node(p)];
      if (k == 0)
        for (std::size_t p = 0; p < grid.size(); ++p)
          out.U(static_cast<Eigen::Index>(p), col) += w[grid.node(p)];
    });
  });
  return out;
}

} // namespace romimg
