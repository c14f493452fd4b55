// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include "romimg/rom.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "romimg/error.hpp"

namespace romimg
{

BlockMatrix::BlockMatrix(int n_, int m_, Structure s) : n(n_), m(m_), structure(s)
{
  require(n_ > 0 && m_ > 0, "block matrix: empty dimensions");
  data.setZero(size(), size());
}

double BlockMatrix::asymmetry() const
{
  const double norm = data.norm();
  return norm > 0.0 ? (data - data.transpose()).norm() / norm : 0.0;
}

bool BlockMatrix::is_block_upper_triangular() const
{
  for (int j = 1; j < n; ++j)
    for (int l = 0; l < j; ++l)
      if ((block(j, l).array() != 0.0).any())
        return false;
  return true;
}

namespace
{

void check_tensor(const DataTensor &D, int needed)
{
  D.validate();
  require(static_cast<int>(D.D.size()) >= needed,
          "rom: need " + std::to_string(needed) + " data matrices, got " +
            std::to_string(D.D.size()));
}

// Symmetric square root and inverse square root of an SPD block.
struct BlockRoot
{
  Eigen::MatrixXd root;
  Eigen::MatrixXd inv_root;
};

BlockRoot spd_root(const Eigen::MatrixXd &a, int block)
{
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success)
    throw NumericalError("block cholesky: eigensolver failed on pivot block " +
                         std::to_string(block));
  const Eigen::VectorXd &lam = eig.eigenvalues();
  if (!(lam.minCoeff() > 0.0))
    throw NumericalError("block cholesky: pivot block " + std::to_string(block) +
                         " is not positive definite (min eigenvalue " +
                         std::to_string(lam.minCoeff()) + "); increase the regularization");
  const Eigen::MatrixXd &w = eig.eigenvectors();
  return {w * lam.cwiseSqrt().asDiagonal() * w.transpose(),
          w * lam.cwiseSqrt().cwiseInverse().asDiagonal() * w.transpose()};
}

} // namespace

BlockMatrix assemble_mass(const DataTensor &D)
{
  check_tensor(D, 2 * D.n - 1);
  BlockMatrix M(D.n, D.m, Structure::SPD);
  for (int j = 0; j < D.n; ++j)
    for (int l = 0; l < D.n; ++l)
      M.block(j, l) = 0.5 * (D.D[j + l] + D.D[std::abs(j - l)]);
  return M;
}

BlockMatrix assemble_stiffness(const DataTensor &D)
{
  check_tensor(D, 2 * D.n);
  BlockMatrix S(D.n, D.m);
  for (int j = 0; j < D.n; ++j)
    for (int l = 0; l < D.n; ++l)
      S.block(j, l) = 0.25 * (D.D[j + l + 1] + D.D[std::abs(j - l - 1)] +
                              D.D[std::abs(j + l - 1)] + D.D[std::abs(j - l + 1)]);
  return S;
}

double largest_eigenvalue(const BlockMatrix &M)
{
  const Eigen::MatrixXd sym = 0.5 * (M.data + M.data.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw NumericalError("rom: eigensolver failed");
  return eig.eigenvalues().maxCoeff();
}

double default_lambda_min(const BlockMatrix &M, bool noisy)
{
  return (noisy ? 1e-3 : 1e-8) * largest_eigenvalue(M);
}

BlockMatrix regularize_mass(const BlockMatrix &M, double lambda_min)
{
  require(lambda_min > 0.0, "regularize: lambda_min must be positive");
  const Eigen::MatrixXd sym = 0.5 * (M.data + M.data.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success)
    throw NumericalError("regularize: eigensolver failed");
  BlockMatrix out(M.n, M.m, Structure::SPD);
  const Eigen::VectorXd lam = eig.eigenvalues();
  if (lam.minCoeff() > lambda_min)
  {
    out.data = sym;
    return out;
  }
  const Eigen::MatrixXd &w = eig.eigenvectors();
  out.data = w * lam.cwiseMax(lambda_min).asDiagonal() * w.transpose();
  out.data = 0.5 * (out.data + out.data.transpose()).eval();
  return out;
}

BlockMatrix block_cholesky(const BlockMatrix &M)
{
  require(M.data.rows() == M.size() && M.data.cols() == M.size(), "block cholesky: bad shape");
  const int n = M.n;
  const int m = M.m;
  const Eigen::Index N = M.size();
  BlockMatrix R(n, m, Structure::BlockUpperTriangular);
  for (int j = 0; j < n; ++j)
  {
    const Eigen::Index row = static_cast<Eigen::Index>(j) * m;
    const Eigen::Index width = N - row;
    // Schur complement row: M_{j, j:} - sum_{k<j} R_{kj}^T R_{k, j:}.
    Eigen::MatrixXd c = M.data.block(row, row, m, width);
    if (j > 0)
      c.noalias() -= R.data.block(0, row, row, m).transpose() * R.data.block(0, row, row, width);
    const BlockRoot piv = spd_root(c.leftCols(m), j);
    R.data.block(row, row, m, m) = piv.root;
    if (width > m)
      R.data.block(row, row + m, m, width - m).noalias() = piv.inv_root * c.rightCols(width - m);
  }
  return R;
}

namespace
{

Eigen::FullPivLU<Eigen::MatrixXd> pivot_lu(const Eigen::MatrixXd &block, int j)
{
  Eigen::FullPivLU<Eigen::MatrixXd> lu(block);
  if (!lu.isInvertible())
    throw NumericalError("rom: singular diagonal block " + std::to_string(j) + " of R");
  return lu;
}

} // namespace

Eigen::MatrixXd solve_right(const Eigen::MatrixXd &B, const BlockMatrix &R)
{
  require(B.cols() == R.size(), "solve_right: dimension mismatch");
  const int m = R.m;
  Eigen::MatrixXd X(B.rows(), B.cols());
  for (int l = 0; l < R.n; ++l)
  {
    const Eigen::Index col = static_cast<Eigen::Index>(l) * m;
    Eigen::MatrixXd y = B.middleCols(col, m);
    if (l > 0)
      y.noalias() -= X.leftCols(col) * R.data.block(0, col, col, m);
    // X_l R_ll = y  <=>  R_ll^T X_l^T = y^T.
    const auto lu = pivot_lu(R.block(l, l).transpose(), l);
    X.middleCols(col, m) = lu.solve(y.transpose()).transpose();
  }
  return X;
}

Eigen::MatrixXd solve_left_transpose(const BlockMatrix &R, const Eigen::MatrixXd &B)
{
  require(B.rows() == R.size(), "solve_left_transpose: dimension mismatch");
  const int m = R.m;
  Eigen::MatrixXd Z(B.rows(), B.cols());
  for (int j = 0; j < R.n; ++j)
  {
    const Eigen::Index row = static_cast<Eigen::Index>(j) * m;
    Eigen::MatrixXd y = B.middleRows(row, m);
    if (j > 0)
      y.noalias() -= R.data.block(0, row, row, m).transpose() * Z.topRows(row);
    const auto lu = pivot_lu(R.block(j, j).transpose(), j);
    Z.middleRows(row, m) = lu.solve(y);
  }
  return Z;
}

BlockMatrix rom_propagator(const BlockMatrix &R, const BlockMatrix &S)
{
  require(R.n == S.n && R.m == S.m, "rom_propagator: dimension mismatch");
  BlockMatrix P(R.n, R.m);
  P.data = solve_left_transpose(R, solve_right(S.data, R));
  P.data = 0.5 * (P.data + P.data.transpose()).eval();
  return P;
}

NoiseReport add_noise(std::vector<ShotRecord> &records, double fraction, std::uint64_t seed)
{
  require(fraction >= 0.0, "noise: fraction must be non-negative");
  NoiseReport report;
  if (fraction == 0.0 || records.empty())
    return report;

  auto sample_rows = [](const ShotRecord &rec) {
    std::vector<Eigen::Index> rows;
    const int j0 = -((-rec.k_first) / rec.steps_per_tau);
    for (int j = j0; j * rec.steps_per_tau <= rec.k_last(); ++j)
      rows.push_back(j * rec.steps_per_tau - rec.k_first);
    return rows;
  };

  double peak = 0.0;
  for (const auto &rec : records)
    for (Eigen::Index row : sample_rows(rec))
      peak = std::max(peak, rec.traces.row(row).cwiseAbs().maxCoeff());
  report.sigma = fraction * peak;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, report.sigma);
  double sum = 0.0;
  double sum2 = 0.0;
  for (auto &rec : records)
    for (Eigen::Index row : sample_rows(rec))
      for (Eigen::Index r = 0; r < rec.traces.cols(); ++r)
      {
        const double e = normal(rng);
        rec.traces(row, r) += e;
        sum += e;
        sum2 += e * e;
        ++report.samples;
      }
  const double mean = sum / static_cast<double>(report.samples);
  report.sample_variance = sum2 / static_cast<double>(report.samples) - mean * mean;
  return report;
}

} // namespace romimg
