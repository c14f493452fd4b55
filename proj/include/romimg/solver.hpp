// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_SOLVER_HPP
#define ROMIMG_SOLVER_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "romimg/grid.hpp"
#include "romimg/medium.hpp"
#include "romimg/pulse.hpp"

namespace romimg
{

// The 2n array data matrices, D[j](s, r) = w_e^(s)(j tau, x_r).
struct DataTensor
{
  int m = 0;
  int n = 0;
  double tau = 0.0;
  std::vector<Eigen::MatrixXd> D;

  void validate() const;
  // max_j |D_j - D_j^T|_F / |D_j|_F over the nonzero D_j.
  double max_asymmetry() const;
  // Replaces every D_j by (D_j + D_j^T) / 2.
  void symmetrize();
};

// Discrete A(c) = -c Lap(c .) on the node lattice of a medium: C L C with the 5-point
// negative Laplacian L, mirror ghost nodes on the sound-hard edge and eliminated
// boundary nodes on sound-soft edges.
class WaveOperator
{
public:
  explicit WaveOperator(const Medium &medium);

  std::size_t size() const { return c_.size(); }
  void apply(std::span<const double> w, std::span<double> out) const;
  // Gershgorin bound 8 c_max^2 / h^2 on the spectrum.
  double spectral_bound() const;

private:
  int nx_;
  int nz_;
  double inv_h2_;
  std::vector<double> c_;
  bool neumann_[4];
};

struct SimulationOptions
{
  double cfl = 0.5; // c_max dt / h
  double dt = 0.0;  // 0 selects the largest CFL-admissible step that divides tau
};

// Largest dt <= cfl h / c_max dividing tau into an integer number of steps; c_max covers
// both c and c_ref so true and reference runs share the same time lattice.
double choose_time_step(const Medium &medium, double tau, double cfl);

// Point source with amplitude F^k for k = k_first, k_first + 1, ...; the solver adds
// dt^2 F^k / h^2 at the node (Dirac with 1/h^2 normalization).
struct PointSource
{
  std::size_t node = 0;
  int k_first = 0;
  std::vector<double> amplitude;

  double at(int k) const
  {
    const int i = k - k_first;
    return i >= 0 && i < static_cast<int>(amplitude.size()) ? amplitude[i] : 0.0;
  }
};

// Second order centered leapfrog in time for w'' + A w = sum_s F_s(t) delta_s.
class LeapfrogSolver
{
public:
  LeapfrogSolver(const Medium &medium, double dt);

  double dt() const { return dt_; }
  const WaveOperator &op() const { return op_; }

  using Observer = std::function<void(int k, std::span<const double> field)>;
  // Fields are zero at k_first - 1 and k_first; steps through k_last and calls
  // observer(k, w^k) for every k in [k_first, k_last].
  void run(std::span<const PointSource> sources, int k_first, int k_last,
           const Observer &observer) const;

  // Conserved leapfrog energy between consecutive steps:
  //   |(w^{k+1} - w^k)/dt|^2 + <A w^{k+1}, w^k>, inner product h^2 sum.
  double energy(std::span<const double> prev, std::span<const double> next) const;

private:
  double h2_;
  double dt_;
  WaveOperator op_;
};

// Traces of one shot at every solver step, starting in the negative-time window.
struct ShotRecord
{
  int source = 0; // 0-based
  double dt = 0.0;
  double tau = 0.0;
  int n = 0;
  int steps_per_tau = 0;
  int k_first = 0;
  Eigen::MatrixXd traces; // row k - k_first, column receiver

  int k_last() const { return k_first + static_cast<int>(traces.rows()) - 1; }
  int m() const { return static_cast<int>(traces.cols()); }
  // w(k dt, x_r); zero before the recorded window (quiescent field).
  double at(int k, int r) const;
  // w(j tau, x_r) for integer j, possibly negative.
  double sample(int j, int r) const { return at(j * steps_per_tau, r); }
};

// One forward solve for the probing pulse emitted at sensor source_index (0-based),
// recorded from the start of the pulse to (2n - 1) tau.
ShotRecord simulate_shot(const Medium &medium, const ArrayGeometry &array, const Pulse &pulse,
                         int source_index, double tau, int n, const SimulationOptions &opts = {});

// All m shots; independent solves distributed over worker threads.
std::vector<ShotRecord> simulate_shots(const Medium &medium, const ArrayGeometry &array,
                                       const Pulse &pulse, double tau, int n,
                                       const SimulationOptions &opts = {});

// D_j = w(j tau) + w(-j tau) at the receivers.
DataTensor compute_data_tensor(std::span<const ShotRecord> records);

// Snapshots u_j^(s)(x) = cos(j tau sqrt(A)) fhat^{1/2}(sqrt(A)) delta_s on grid nodes, as
// an nm-column row-vector field: U(p, j m + s).
struct SnapshotFields
{
  ImagingGrid grid;
  int n = 0;
  int m = 0;
  double tau = 0.0;
  Eigen::MatrixXd U;
};

SnapshotFields simulate_snapshots(const Medium &medium, const ArrayGeometry &array,
                                  const Pulse &pulse, double tau, int n, const ImagingGrid &grid,
                                  const SimulationOptions &opts = {});

} // namespace romimg

#endif // ROMIMG_SOLVER_HPP
