// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_ROM_HPP
#define ROMIMG_ROM_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "romimg/solver.hpp"

namespace romimg
{

enum class Structure
{
  General,
  SPD,
  BlockUpperTriangular
};

// nm x nm matrix made of n x n blocks of size m x m.
struct BlockMatrix
{
  int n = 0;
  int m = 0;
  Eigen::MatrixXd data;
  Structure structure = Structure::General;

  BlockMatrix() = default;
  BlockMatrix(int n, int m, Structure structure = Structure::General);

  Eigen::Index size() const { return static_cast<Eigen::Index>(n) * m; }
  auto block(int j, int l) { return data.block(j * m, l * m, m, m); }
  auto block(int j, int l) const { return data.block(j * m, l * m, m, m); }

  // |B - B^T|_F / |B|_F.
  double asymmetry() const;
  // True if every block strictly below the block diagonal is exactly zero.
  bool is_block_upper_triangular() const;
};

// M_{jl} = (D_{j+l} + D_{|j-l|}) / 2.
BlockMatrix assemble_mass(const DataTensor &D);
// S_{jl} = (D_{j+l+1} + D_{|j-l-1|} + D_{|j+l-1|} + D_{|j-l+1|}) / 4.
BlockMatrix assemble_stiffness(const DataTensor &D);

// Threshold used when none is configured: rel * largest eigenvalue of M, with rel 1e-8
// for noiseless and 1e-3 for noisy data.
double default_lambda_min(const BlockMatrix &M, bool noisy);
double largest_eigenvalue(const BlockMatrix &M);

// W max(Lambda, lambda_min) W^T from the eigendecomposition of the symmetrized input.
BlockMatrix regularize_mass(const BlockMatrix &M, double lambda_min);

// M = R^T R with R block upper triangular and symmetric positive definite diagonal
// blocks. Throws NumericalError when a pivot block is not positive definite.
BlockMatrix block_cholesky(const BlockMatrix &M);

// B R^{-1} and R^{-T} B by block substitution; B has nm columns (resp. rows).
Eigen::MatrixXd solve_right(const Eigen::MatrixXd &B, const BlockMatrix &R);
Eigen::MatrixXd solve_left_transpose(const BlockMatrix &R, const Eigen::MatrixXd &B);

// P = R^{-T} S R^{-1}, symmetrized.
BlockMatrix rom_propagator(const BlockMatrix &R, const BlockMatrix &S);

// Adds i.i.d. N(0, sigma^2) to every recorded sample w(j tau, x_r) (negative j
// included), sigma = fraction * max |w(j tau, x_r)|. Deterministic for a fixed seed.
struct NoiseReport
{
  double sigma = 0.0;
  double sample_variance = 0.0;
  std::size_t samples = 0;
};
NoiseReport add_noise(std::vector<ShotRecord> &records, double fraction, std::uint64_t seed);

} // namespace romimg

#endif // ROMIMG_ROM_HPP
