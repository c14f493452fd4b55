// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include "romimg/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "romimg/error.hpp"

namespace romimg
{

DiscretizedOperator::DiscretizedOperator(const Medium &medium) : h_(medium.h())
{
  medium.validate();
  const int nx = medium.nx();
  const int nz = medium.nz();
  const auto count = static_cast<Eigen::Index>(medium.size());
  require(count <= 64 * 64, "oracle: grid larger than 64 x 64 nodes");

  // Negative 5-point Laplacian with ghost mirror (sound-hard) or eliminated nodes.
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(count, count);
  const double inv_h2 = 1.0 / (h_ * h_);
  auto couple = [&](std::size_t p, int i, int k, Edge edge) {
    if (i < 0 || i >= nx || k < 0 || k >= nz)
    {
      if (medium.boundary(edge) == Boundary::SoundHard)
        lap(p, p) -= inv_h2;
      return;
    }
    lap(p, medium.index(i, k)) -= inv_h2;
  };
  for (int k = 0; k < nz; ++k)
    for (int i = 0; i < nx; ++i)
    {
      const std::size_t p = medium.index(i, k);
      lap(p, p) += 4.0 * inv_h2;
      couple(p, i - 1, k, Edge::Left);
      couple(p, i + 1, k, Edge::Right);
      couple(p, i, k - 1, Edge::Top);
      couple(p, i, k + 1, Edge::Bottom);
    }

  const Eigen::Map<const Eigen::VectorXd> c(medium.c().data(), count);
  matrix_ = c.asDiagonal() * lap * c.asDiagonal();
  const double scale = matrix_.cwiseAbs().maxCoeff();
  asymmetry_ = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() / scale;
  matrix_ = 0.5 * (matrix_ + matrix_.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix_);
  if (eig.info() != Eigen::Success)
    throw NumericalError("oracle: eigendecomposition failed");
  theta_ = eig.eigenvalues();
  y_ = eig.eigenvectors();
  clamped_min_ = std::min(0.0, theta_.minCoeff());
  theta_ = theta_.cwiseMax(0.0);
}

double DiscretizedOperator::completeness_error() const
{
  const auto n = y_.rows();
  return (y_ * y_.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd DiscretizedOperator::apply_diagonal(const Eigen::VectorXd &phi_l,
                                                    const Eigen::MatrixXd &v) const
{
  require(v.rows() == y_.rows(), "oracle: dimension mismatch");
  require(phi_l.size() == theta_.size(), "oracle: spectral weight count mismatch");
  const Eigen::MatrixXd coeff = phi_l.asDiagonal() * (y_.transpose() * v);
  return y_ * coeff;
}

Eigen::MatrixXd DiscretizedOperator::apply_function(const std::function<double(double)> &phi,
                                                    const Eigen::MatrixXd &v) const
{
  Eigen::VectorXd w(theta_.size());
  for (Eigen::Index l = 0; l < w.size(); ++l)
    w(l) = phi(std::sqrt(theta_(l)));
  return apply_diagonal(w, v);
}

Eigen::VectorXd DiscretizedOperator::dirac(std::size_t node) const
{
  require(node < size(), "oracle: node outside the grid");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  e(static_cast<Eigen::Index>(node)) = 1.0 / (h_ * h_);
  return e;
}

Eigen::VectorXd SpectralModel::frequencies(const DiscretizedOperator &op) const
{
  const Eigen::VectorXd &theta = op.eigenvalues();
  Eigen::VectorXd omega(theta.size());
  for (Eigen::Index l = 0; l < theta.size(); ++l)
  {
    if (!leapfrog())
    {
      omega(l) = std::sqrt(theta(l));
      continue;
    }
    const double arg = 0.5 * dt * std::sqrt(theta(l));
    require(arg <= 1.0, "oracle: time step violates the CFL bound");
    omega(l) = 2.0 / dt * std::asin(arg);
  }
  return omega;
}

Eigen::VectorXd SpectralModel::half_weights(const Eigen::VectorXd &omega) const
{
  Eigen::VectorXd w(omega.size());
  if (leapfrog())
  {
    const DiscretePulse dp(pulse, dt);
    for (Eigen::Index l = 0; l < omega.size(); ++l)
      w(l) = dp.half_spectrum(omega(l));
  }
  else
  {
    for (Eigen::Index l = 0; l < omega.size(); ++l)
      w(l) = pulse.sqrt_spectrum(omega(l));
  }
  return w;
}

namespace
{

Eigen::MatrixXd diracs(const DiscretizedOperator &op, std::span<const std::size_t> sensors)
{
  Eigen::MatrixXd out(static_cast<Eigen::Index>(op.size()), static_cast<Eigen::Index>(sensors.size()));
  for (std::size_t s = 0; s < sensors.size(); ++s)
    out.col(static_cast<Eigen::Index>(s)) = op.dirac(sensors[s]);
  return out;
}

} // namespace

Eigen::MatrixXd oracle_sensor_functions(const DiscretizedOperator &op, const SpectralModel &model,
                                        std::span<const std::size_t> sensors)
{
  return op.apply_diagonal(model.half_weights(model.frequencies(op)), diracs(op, sensors));
}

DataTensor oracle_data_tensor(const DiscretizedOperator &op, const SpectralModel &model,
                              std::span<const std::size_t> sensors, double tau, int n)
{
  require(tau > 0.0 && n >= 1, "oracle: invalid sampling");
  const Eigen::VectorXd omega = model.frequencies(op);
  const Eigen::VectorXd half = model.half_weights(omega);
  const auto m = static_cast<Eigen::Index>(sensors.size());
  // Sensor rows of the eigenvectors, scaled to the Dirac normalization.
  Eigen::MatrixXd ys(m, omega.size());
  for (Eigen::Index s = 0; s < m; ++s)
    ys.row(s) = op.eigenvectors().row(static_cast<Eigen::Index>(sensors[s])) / (op.h() * op.h());

  DataTensor out;
  out.m = static_cast<int>(m);
  out.n = n;
  out.tau = tau;
  const double h2 = op.h() * op.h();
  for (int j = 0; j < 2 * n; ++j)
  {
    Eigen::VectorXd w(omega.size());
    for (Eigen::Index l = 0; l < omega.size(); ++l)
      w(l) = h2 * std::cos(j * tau * omega(l)) * half(l) * half(l);
    out.D.push_back(ys * w.asDiagonal() * ys.transpose());
  }
  return out;
}

Eigen::MatrixXd oracle_snapshots(const DiscretizedOperator &op, const SpectralModel &model,
                                 std::span<const std::size_t> sensors, double tau, int n)
{
  require(tau > 0.0 && n >= 1, "oracle: invalid sampling");
  const Eigen::VectorXd omega = model.frequencies(op);
  const Eigen::VectorXd half = model.half_weights(omega);
  const Eigen::MatrixXd coeff = op.eigenvectors().transpose() * diracs(op, sensors);
  const auto m = static_cast<Eigen::Index>(sensors.size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(op.size()), n * m);
  for (int j = 0; j < n; ++j)
  {
    Eigen::VectorXd w(omega.size());
    for (Eigen::Index l = 0; l < omega.size(); ++l)
      w(l) = std::cos(j * tau * omega(l)) * half(l);
    out.middleCols(j * m, m) = op.eigenvectors() * (w.asDiagonal() * coeff);
  }
  return out;
}

Eigen::MatrixXd oracle_internal_wave(const DiscretizedOperator &op, const SpectralModel &model,
                                     std::span<const std::size_t> sensors, double tau, int n,
                                     const Eigen::VectorXd &source)
{
  require(source.size() == static_cast<Eigen::Index>(op.size()), "oracle: dimension mismatch");
  const Eigen::VectorXd omega = model.frequencies(op);
  const Eigen::VectorXd half = model.half_weights(omega);
  const Eigen::VectorXd coeff = op.eigenvectors().transpose() * source;
  const auto m = static_cast<Eigen::Index>(sensors.size());
  Eigen::MatrixXd ys(m, omega.size());
  for (Eigen::Index s = 0; s < m; ++s)
    ys.row(s) = op.eigenvectors().row(static_cast<Eigen::Index>(sensors[s]));

  Eigen::MatrixXd out(n, m);
  for (int j = 0; j < n; ++j)
  {
    Eigen::VectorXd w(omega.size());
    for (Eigen::Index l = 0; l < omega.size(); ++l)
      w(l) = std::cos(j * tau * omega(l)) * half(l) * coeff(l);
    out.row(j) = (ys * w).transpose();
  }
  return out;
}

} // namespace romimg
