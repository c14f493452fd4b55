// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_ORACLE_HPP
#define ROMIMG_ORACLE_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "romimg/medium.hpp"
#include "romimg/pulse.hpp"
#include "romimg/solver.hpp"

namespace romimg
{

// Dense A_h = C L C for a small medium with its full eigendecomposition. Vectors are
// nodal values; the field inner product is h^2 x^T y.
class DiscretizedOperator
{
public:
  explicit DiscretizedOperator(const Medium &medium);

  std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }
  double h() const { return h_; }
  const Eigen::MatrixXd &matrix() const { return matrix_; }
  // Ascending, negative round-off clamped to 0.
  const Eigen::VectorXd &eigenvalues() const { return theta_; }
  const Eigen::MatrixXd &eigenvectors() const { return y_; }

  // |A - A^T|_max / |A|_max before symmetrization.
  double asymmetry() const { return asymmetry_; }
  // Most negative eigenvalue before clamping (0 if none).
  double clamped_min() const { return clamped_min_; }
  // |Y Y^T - I|_max.
  double completeness_error() const;

  // sum_l phi(sqrt(theta_l)) y_l (y_l^T v), column by column.
  Eigen::MatrixXd apply_function(const std::function<double(double)> &phi,
                                 const Eigen::MatrixXd &v) const;
  // Same with phi evaluated on the spectral variable omega_l supplied by the caller.
  Eigen::MatrixXd apply_diagonal(const Eigen::VectorXd &phi_l, const Eigen::MatrixXd &v) const;

  // Unit-mass Dirac at a node, e_node / h^2.
  Eigen::VectorXd dirac(std::size_t node) const;

private:
  double h_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd theta_;
  Eigen::MatrixXd y_;
  double asymmetry_ = 0.0;
  double clamped_min_ = 0.0;
};

// Maps the eigenvalues of A_h to the time-frequency and pulse weights the oracle uses.
// Continuous: omega = sqrt(theta), cos(t omega), analytic fhat.
// Leapfrog (dt > 0): cos(dt omega) = 1 - dt^2 theta / 2 and the discrete pulse
// transform, which reproduces the finite-difference solver to round-off.
struct SpectralModel
{
  Pulse pulse;
  double dt = 0.0;

  bool leapfrog() const { return dt > 0.0; }
  Eigen::VectorXd frequencies(const DiscretizedOperator &op) const;
  // fhat^{1/2} at the given frequencies.
  Eigen::VectorXd half_weights(const Eigen::VectorXd &omega) const;
};

// delta^f_s = fhat^{1/2}(sqrt A) delta_s as columns.
Eigen::MatrixXd oracle_sensor_functions(const DiscretizedOperator &op, const SpectralModel &model,
                                        std::span<const std::size_t> sensors);

// D_j(s, r) = <delta^f_r, cos(j tau sqrt A) delta^f_s>.
DataTensor oracle_data_tensor(const DiscretizedOperator &op, const SpectralModel &model,
                              std::span<const std::size_t> sensors, double tau, int n);

// Snapshot fields u_j^(s) = cos(j tau sqrt A) delta^f_s on every node; column j m + s.
Eigen::MatrixXd oracle_snapshots(const DiscretizedOperator &op, const SpectralModel &model,
                                 std::span<const std::size_t> sensors, double tau, int n);

// g(t_j, x_r) = [fhat^{1/2}(sqrt A) cos(t_j sqrt A) source](x_r) for a field `source` on
// every node, as an n x m matrix.
Eigen::MatrixXd oracle_internal_wave(const DiscretizedOperator &op, const SpectralModel &model,
                                     std::span<const std::size_t> sensors, double tau, int n,
                                     const Eigen::VectorXd &source);

} // namespace romimg

#endif // ROMIMG_ORACLE_HPP
