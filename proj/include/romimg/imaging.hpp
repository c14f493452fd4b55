// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_IMAGING_HPP
#define ROMIMG_IMAGING_HPP

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "romimg/grid.hpp"
#include "romimg/internal.hpp"
#include "romimg/medium.hpp"
#include "romimg/pulse.hpp"
#include "romimg/rom.hpp"
#include "romimg/solver.hpp"

namespace romimg
{

enum class ImageKind
{
  Norm,
  Ideal,
  Backprojection,
  RTM,
  PixelScan,
  RangeDerivative
};

std::string to_string(ImageKind kind);
ImageKind image_kind_from_string(const std::string &name);

struct Image
{
  ImagingGrid grid;
  Eigen::VectorXd values;
  ImageKind kind = ImageKind::Norm;
  nlohmann::json params = nlohmann::json::object();

  double at(int a, int b) const { return values(static_cast<Eigen::Index>(grid.pixel(a, b))); }
  // Global maximum of |values|.
  double max_abs() const { return values.cwiseAbs().maxCoeff(); }
};

// I(y) = |V_o(y) R|^2, the squared norm of the internal wave at the sensors.
Image image_norm(const BlockMatrix &R, const SnapshotBasis &basis_ref);

// Same quantity summed explicitly from internal_wave, pixel by pixel.
Image image_norm_explicit(const BlockMatrix &R, const SnapshotBasis &basis_ref);

// I^ideal(y) = |V(y) R|^2 with the true-medium basis, i.e. the squared norm at the sensors
// of the wave emitted by the projected Dirac V V(y)^T in the true medium.
Image image_ideal(const SnapshotBasis &basis_true, const BlockMatrix &R);

// I^BP(y) = V_o(y) (P - P_o) V_o(y)^T.
Image image_backprojection(const BlockMatrix &P, const BlockMatrix &P_ref,
                           const SnapshotBasis &basis_ref);

// Reverse-time migration of the scattered data D - D_ref in the reference medium,
// zero-lag cross-correlation imaging condition, normalized to unit max |I|.
Image image_rtm(const DataTensor &D, const DataTensor &D_ref, const Medium &medium,
                const ArrayGeometry &array, const Pulse &pulse, const ImagingGrid &grid,
                const SimulationOptions &opts = {});

struct PixelScanResult
{
  Point y;
  double value = 0.0;
  double dt = 0.0;
  int steps_per_tau = 0;
  Eigen::MatrixXd g;       // n x m internal wave
  Eigen::MatrixXd control; // row k = 0..n S: F(k dt, x_s)
  Eigen::MatrixXd gamma;   // row k = 0..2n S: gamma(k dt, x_r)
  Eigen::VectorXd focus;   // gamma(n tau) on the focus grid, if one was given
};

// Steps (4)-(6) of the pixel-scanning algorithm at one point: internal wave, time-reversed
// control interpolated to the solver step, one true-medium solve with the m controlled
// sources, and trapezoidal correlation at interval tau.
PixelScanResult pixel_scan_point(const BlockMatrix &R, const SnapshotBasis &basis_ref,
                                 const Medium &medium_true, const ArrayGeometry &array,
                                 const Point &y, const ImagingGrid *focus_grid = nullptr,
                                 const SimulationOptions &opts = {});

// gamma at the receivers rebuilt as sum_s F_s * H_rs from per-source impulse responses;
// returns |gamma - rebuilt|_F / |gamma|_F.
double pixel_scan_superposition_error(const PixelScanResult &result, const Medium &medium_true,
                                      const ArrayGeometry &array);

// Pixel-scan image over the listed pixels (all pixels when empty); other pixels are 0.
// Refuses more than max_pixels solves.
Image image_pixel_scan(const BlockMatrix &R, const SnapshotBasis &basis_ref,
                       const Medium &medium_true, const ArrayGeometry &array,
                       const std::vector<std::size_t> &pixels, std::size_t max_pixels = 256,
                       const SimulationOptions &opts = {});

// Gaussian smoothing along range (truncated at 4 sigma, renormalized) followed by a
// centered range difference.
Image range_derivative(const Image &img, double sigma);

// Catmull-Rom interpolation of integer-indexed samples at fractional position x.
template <typename Sample>
double cubic_interpolate(const Sample &sample, double x)
{
  const double fl = std::floor(x);
  const int i = static_cast<int>(fl);
  const double t = x - fl;
  const double p0 = sample(i - 1), p1 = sample(i), p2 = sample(i + 1), p3 = sample(i + 2);
  return p1 + 0.5 * t *
                (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
}

} // namespace romimg

#endif // ROMIMG_IMAGING_HPP
