// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_INTERNAL_HPP
#define ROMIMG_INTERNAL_HPP

#include <Eigen/Dense>

#include "romimg/grid.hpp"
#include "romimg/medium.hpp"
#include "romimg/pulse.hpp"
#include "romimg/rom.hpp"
#include "romimg/solver.hpp"

namespace romimg
{

// Orthonormal snapshot fields V = U R^{-1} on an imaging grid, row p holding the nm
// components v_j^(s)(x_p) in column j m + s.
struct SnapshotBasis
{
  ImagingGrid grid;
  int n = 0;
  int m = 0;
  double tau = 0.0;
  Eigen::MatrixXd V;
  BlockMatrix R;  // factor of the mass matrix used for the orthogonalization
  DataTensor data; // array data of the medium the snapshots were computed in

  // Quadrature weight of one pixel; equals h^2 when the grid is the full solver grid.
  double cell_area() const { return grid.dx() * grid.dz(); }
  // V(y) by bilinear interpolation; exact at grid nodes.
  Eigen::RowVectorXd at(const Point &y) const;
};

// V = U R^{-1} by block substitution per grid node.
SnapshotBasis orthonormalize(const SnapshotFields &U, const BlockMatrix &R);

// Simulates data and snapshots in `medium` (as given, no reference substitution), factors
// the regularized mass matrix (lambda_min absolute, 0 selects the noiseless default) and
// returns the orthonormal basis on `grid`.
SnapshotBasis build_snapshot_basis(const Medium &medium, const ArrayGeometry &array,
                                   const Pulse &pulse, double tau, int n, const ImagingGrid &grid,
                                   double lambda_min = 0.0, const SimulationOptions &opts = {});

// build_snapshot_basis in medium.reference().
SnapshotBasis build_reference_basis(const Medium &medium, const ArrayGeometry &array,
                                    const Pulse &pulse, double tau, int n,
                                    const ImagingGrid &grid, double lambda_min = 0.0,
                                    const SimulationOptions &opts = {});

// Estimated internal wave at the sensors, values(j, r) = (V_o(y) R)_{j m + r}.
Eigen::MatrixXd internal_wave(const BlockMatrix &R, const SnapshotBasis &basis, const Point &y);

// delta_y^ROM(x) = V(x) V_o(y)^T over the imaging grid.
Eigen::VectorXd rom_psf(const SnapshotBasis &basis_true, const SnapshotBasis &basis_ref,
                        const Point &y);

// |V_o(y)|^2.
double psf_norm(const SnapshotBasis &basis_ref, const Point &y);

// max |field| within `inner` of y divided by max |field| at distance >= `outer` from y.
double peak_to_sidelobe(const ImagingGrid &grid, const Eigen::VectorXd &field, const Point &y,
                        double inner, double outer);

} // namespace romimg

#endif // ROMIMG_INTERNAL_HPP
