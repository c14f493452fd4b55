// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"

#include "fixtures.hpp"
#include "romimg/error.hpp"
#include "romimg/imaging.hpp"
#include "romimg/internal.hpp"
#include "romimg/rom.hpp"
#include "romimg/solver.hpp"

using namespace romimg;
using romimg::test::Small;

namespace
{

struct Roms
{
  DataTensor D, D_ref;
  BlockMatrix R, R_ref, P, P_ref;
  SnapshotBasis ref;
  ImagingGrid grid;
};

Roms roms(const Small &s)
{
  Roms r;
  const Medium ref = s.medium.reference();
  r.grid = ImagingGrid::window(s.medium, 0.5, 2.5, 0.25, 2.25, 2, 2);
  r.D = compute_data_tensor(simulate_shots(s.medium, s.array, s.pulse, s.tau, s.n));
  r.D_ref = compute_data_tensor(simulate_shots(ref, s.array, s.pulse, s.tau, s.n));
  r.R = block_cholesky(assemble_mass(r.D));
  r.R_ref = block_cholesky(assemble_mass(r.D_ref));
  r.P = rom_propagator(r.R, assemble_stiffness(r.D));
  r.P_ref = rom_propagator(r.R_ref, assemble_stiffness(r.D_ref));
  r.ref = orthonormalize(simulate_snapshots(ref, s.array, s.pulse, s.tau, s.n, r.grid), r.R_ref);
  return r;
}

DataTensor scaled(DataTensor D, double a)
{
  for (auto &d : D.D)
    d *= a;
  return D;
}

double exponent(double base, double scaled_value, double a)
{
  return std::log(scaled_value / base) / std::log(a);
}

} // namespace

TEST_CASE("norm image routes agree and are non-negative")
{
  Small s;
  const Roms r = roms(s);
  const Image a = image_norm(r.R, r.ref);
  const Image b = image_norm_explicit(r.R, r.ref);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-12 * a.max_abs());
  CHECK(a.values.minCoeff() >= 0.0);
  CHECK(a.kind == ImageKind::Norm);
}

TEST_CASE("backprojection vanishes in the reference medium")
{
  Small s(false);
  const Roms r = roms(s);
  const double pnorm = Eigen::JacobiSVD<Eigen::MatrixXd>(r.P_ref.data).singularValues()(0);
  CHECK(image_backprojection(r.P, r.P_ref, r.ref).max_abs() < 1e-8 * pnorm);
}

TEST_CASE("images scale with the data amplitude")
{
  Small s;
  const Roms r = roms(s);
  const double a = 3.0;
  const DataTensor Da = scaled(r.D, a), Da_ref = scaled(r.D_ref, a);
  const BlockMatrix Ra = block_cholesky(assemble_mass(Da));
  const BlockMatrix Ra_ref = block_cholesky(assemble_mass(Da_ref));
  const Point y{1.5, 1.5};
  const std::size_t p = r.grid.nearest(y);

  // The reference basis is built from reference snapshots and stays fixed.
  const double n0 = image_norm(r.R, r.ref).values(static_cast<Eigen::Index>(p));
  const double n1 = image_norm(Ra, r.ref).values(static_cast<Eigen::Index>(p));
  CHECK(exponent(n0, n1, a) == doctest::Approx(1.0).epsilon(1e-9));

  // Propagators are scale free, so the backprojection is unchanged.
  const BlockMatrix Pa = rom_propagator(Ra, assemble_stiffness(Da));
  const BlockMatrix Pa_ref = rom_propagator(Ra_ref, assemble_stiffness(Da_ref));
  const double b0 = image_backprojection(r.P, r.P_ref, r.ref).max_abs();
  const double b1 = image_backprojection(Pa, Pa_ref, r.ref).max_abs();
  CHECK(b1 == doctest::Approx(b0).epsilon(1e-8));

  const double s0 = pixel_scan_point(r.R, r.ref, s.medium, s.array, y).value;
  const double s1 = pixel_scan_point(Ra, r.ref, s.medium, s.array, y).value;
  CHECK(exponent(s0, s1, a) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("pixel scan superposition")
{
  Small s;
  const Roms r = roms(s);
  const PixelScanResult ps = pixel_scan_point(r.R, r.ref, s.medium, s.array, {1.5, 1.5});
  CHECK(pixel_scan_superposition_error(ps, s.medium, s.array) < 0.02);
  CHECK(ps.g.rows() == s.n);
  CHECK(ps.g.cols() == s.array.m());
}

TEST_CASE("range derivative")
{
  Medium med(33, 41, 0.125, 1.0);
  const auto grid = ImagingGrid::full(med);
  Image img;
  img.grid = grid;
  img.values.setConstant(static_cast<Eigen::Index>(grid.size()), 2.0);
  CHECK(range_derivative(img, 0.05).max_abs() < 1e-12);

  for (std::size_t p = 0; p < grid.size(); ++p)
    img.values(static_cast<Eigen::Index>(p)) = 1.0 + 3.0 * grid.position(p).z;
  const Image d = range_derivative(img, 0.05);
  for (int b = 5; b < grid.count_z() - 5; ++b)
    CHECK(d.at(4, b) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(d.kind == ImageKind::RangeDerivative);
  CHECK_THROWS_AS(range_derivative(img, 0.0), ConfigError);
}

TEST_CASE("image kind names round trip")
{
  for (ImageKind k : {ImageKind::Norm, ImageKind::Ideal, ImageKind::Backprojection, ImageKind::RTM,
                      ImageKind::PixelScan, ImageKind::RangeDerivative})
    CHECK(image_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(image_kind_from_string("sonar"), ConfigError);
}
