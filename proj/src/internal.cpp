// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include "romimg/internal.hpp"

#include <algorithm>
#include <cmath>

#include "romimg/error.hpp"

namespace romimg
{

Eigen::RowVectorXd SnapshotBasis::at(const Point &y) const
{
  const ImagingGrid::Stencil st = grid.interpolation(y);
  Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(V.cols());
  for (int q = 0; q < 4; ++q)
    if (st.weight[q] != 0.0)
      out += st.weight[q] * V.row(static_cast<Eigen::Index>(st.pixel[q]));
  return out;
}

SnapshotBasis orthonormalize(const SnapshotFields &U, const BlockMatrix &R)
{
  require(U.n == R.n && U.m == R.m, "basis: snapshot and factor dimensions differ");
  SnapshotBasis out;
  out.grid = U.grid;
  out.n = U.n;
  out.m = U.m;
  out.tau = U.tau;
  out.V = solve_right(U.U, R);
  out.R = R;
  return out;
}

SnapshotBasis build_snapshot_basis(const Medium &medium, const ArrayGeometry &array,
                                   const Pulse &pulse, double tau, int n, const ImagingGrid &grid,
                                   double lambda_min, const SimulationOptions &opts)
{
  const auto shots = simulate_shots(medium, array, pulse, tau, n, opts);
  DataTensor data = compute_data_tensor(shots);
  const BlockMatrix M = assemble_mass(data);
  const double floor = lambda_min > 0.0 ? lambda_min : default_lambda_min(M, false);
  const BlockMatrix R = block_cholesky(regularize_mass(M, floor));
  const SnapshotFields U = simulate_snapshots(medium, array, pulse, tau, n, grid, opts);
  SnapshotBasis basis = orthonormalize(U, R);
  basis.data = std::move(data);
  return basis;
}

SnapshotBasis build_reference_basis(const Medium &medium, const ArrayGeometry &array,
                                    const Pulse &pulse, double tau, int n,
                                    const ImagingGrid &grid, double lambda_min,
                                    const SimulationOptions &opts)
{
  return build_snapshot_basis(medium.reference(), array, pulse, tau, n, grid, lambda_min, opts);
}

Eigen::MatrixXd internal_wave(const BlockMatrix &R, const SnapshotBasis &basis, const Point &y)
{
  require(R.n == basis.n && R.m == basis.m, "internal wave: factor and basis dimensions differ");
  const Eigen::RowVectorXd g = basis.at(y) * R.data;
  Eigen::MatrixXd out(basis.n, basis.m);
  for (int j = 0; j < basis.n; ++j)
    out.row(j) = g.segment(static_cast<Eigen::Index>(j) * basis.m, basis.m);
  return out;
}

Eigen::VectorXd rom_psf(const SnapshotBasis &basis_true, const SnapshotBasis &basis_ref,
                        const Point &y)
{
  require(basis_true.grid.same_as(basis_ref.grid), "psf: bases live on different grids");
  require(basis_true.V.cols() == basis_ref.V.cols(), "psf: basis dimensions differ");
  return basis_true.V * basis_ref.at(y).transpose();
}

double psf_norm(const SnapshotBasis &basis_ref, const Point &y)
{
  return basis_ref.at(y).squaredNorm();
}

double peak_to_sidelobe(const ImagingGrid &grid, const Eigen::VectorXd &field, const Point &y,
                        double inner, double outer)
{
  require(field.size() == static_cast<Eigen::Index>(grid.size()), "psf: field size mismatch");
  double peak = 0.0;
  double side = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p)
  {
    const double d = distance(grid.position(p), y);
    const double v = std::abs(field(static_cast<Eigen::Index>(p)));
    if (d <= inner)
      peak = std::max(peak, v);
    if (d >= outer)
      side = std::max(side, v);
  }
  require(peak > 0.0, "psf: no pixel near the test point");
  return side > 0.0 ? peak / side : INFINITY;
}

} // namespace romimg
