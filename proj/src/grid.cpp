// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include "romimg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "romimg/error.hpp"

namespace romimg
{

double ArrayGeometry::aperture() const
{
  if (positions.size() < 2)
    return 0.0;
  const auto [lo, hi] = std::minmax_element(positions.begin(), positions.end(),
                                            [](const Point &a, const Point &b) { return a.x < b.x; });
  return hi->x - lo->x;
}

ArrayGeometry ArrayGeometry::linear(double x_begin, double x_end, int m, double z)
{
  require(m >= 1, "array: need at least one sensor");
  ArrayGeometry out;
  out.positions.reserve(m);
  for (int s = 0; s < m; ++s)
  {
    const double x = m == 1 ? 0.5 * (x_begin + x_end) : x_begin + (x_end - x_begin) * s / (m - 1);
    out.positions.push_back({x, z});
  }
  return out;
}

std::vector<std::size_t> ArrayGeometry::nodes(const Medium &medium) const
{
  require(!positions.empty(), "array: no sensors");
  std::vector<std::size_t> out;
  out.reserve(positions.size());
  std::set<std::size_t> seen;
  for (const Point &p : positions)
  {
    const std::size_t idx = medium.index(medium.nearest_node(p));
    require(seen.insert(idx).second, "array: two sensors snap to the same grid node");
    out.push_back(idx);
  }
  return out;
}

ImagingGrid::ImagingGrid(const Medium &medium, int i0, int stride_x, int count_x, int k0,
                         int stride_z, int count_z)
  : i0_(i0), k0_(k0), stride_x_(stride_x), stride_z_(stride_z), count_x_(count_x),
    count_z_(count_z)
{
  require(count_x > 0 && count_z > 0 && stride_x > 0 && stride_z > 0,
          "imaging grid: counts and strides must be positive");
  require(i0 >= 0 && k0 >= 0 && i0 + stride_x * (count_x - 1) < medium.nx() &&
            k0 + stride_z * (count_z - 1) < medium.nz(),
          "imaging grid: extends outside the medium");
  dx_ = stride_x * medium.h();
  dz_ = stride_z * medium.h();
  origin_ = medium.position(i0, k0);
  nodes_.reserve(size());
  for (int b = 0; b < count_z; ++b)
    for (int a = 0; a < count_x; ++a)
      nodes_.push_back(medium.index(i0 + a * stride_x, k0 + b * stride_z));
}

ImagingGrid ImagingGrid::full(const Medium &medium)
{
  return ImagingGrid(medium, 0, 1, medium.nx(), 0, 1, medium.nz());
}

ImagingGrid ImagingGrid::window(const Medium &medium, double x0, double x1, double z0, double z1,
                                int stride_x, int stride_z)
{
  require(x1 >= x0 && z1 >= z0, "imaging grid: empty window");
  if (!medium.contains({x0, z0}) || !medium.contains({x1, z1}))
    throw ConfigError("imaging grid: window outside the domain");
  const NodeIndex lo = medium.nearest_node({x0, z0});
  const NodeIndex hi = medium.nearest_node({x1, z1});
  const int count_x = (hi.i - lo.i) / stride_x + 1;
  const int count_z = (hi.k - lo.k) / stride_z + 1;
  return ImagingGrid(medium, lo.i, stride_x, count_x, lo.k, stride_z, count_z);
}

Point ImagingGrid::position(std::size_t p) const
{
  const auto a = static_cast<int>(p % count_x_);
  const auto b = static_cast<int>(p / count_x_);
  return {origin_.x + a * dx_, origin_.z + b * dz_};
}

bool ImagingGrid::contains(const Point &y) const
{
  constexpr double slack = 1e-9;
  const double fx = (y.x - origin_.x) / dx_;
  const double fz = (y.z - origin_.z) / dz_;
  return fx >= -slack && fz >= -slack && fx <= count_x_ - 1 + slack && fz <= count_z_ - 1 + slack;
}

namespace
{
// Splits a fractional lattice coordinate into a cell index and offset, snapping
// offsets within round-off of a node onto that node.
std::pair<int, double> split(double f, int count)
{
  constexpr double snap = 1e-9;
  double cell = std::floor(f);
  double frac = f - cell;
  if (frac < snap)
    frac = 0.0;
  else if (frac > 1.0 - snap)
  {
    cell += 1.0;
    frac = 0.0;
  }
  int c = static_cast<int>(cell);
  c = std::clamp(c, 0, count - 1);
  if (c == count - 1 && frac > 0.0)
    frac = 0.0;
  return {c, frac};
}
} // namespace

ImagingGrid::Stencil ImagingGrid::interpolation(const Point &y) const
{
  if (!contains(y))
    throw ConfigError("imaging grid: point (" + std::to_string(y.x) + ", " + std::to_string(y.z) +
                      ") outside the imaging grid");
  const auto [a, fx] = split((y.x - origin_.x) / dx_, count_x_);
  const auto [b, fz] = split((y.z - origin_.z) / dz_, count_z_);
  const int a1 = std::min(a + 1, count_x_ - 1);
  const int b1 = std::min(b + 1, count_z_ - 1);
  Stencil s;
  s.pixel = {pixel(a, b), pixel(a1, b), pixel(a, b1), pixel(a1, b1)};
  s.weight = {(1 - fx) * (1 - fz), fx * (1 - fz), (1 - fx) * fz, fx * fz};
  return s;
}

std::size_t ImagingGrid::nearest(const Point &y) const
{
  const int a = std::clamp(static_cast<int>(std::lround((y.x - origin_.x) / dx_)), 0, count_x_ - 1);
  const int b = std::clamp(static_cast<int>(std::lround((y.z - origin_.z) / dz_)), 0, count_z_ - 1);
  return pixel(a, b);
}

bool ImagingGrid::same_as(const ImagingGrid &other) const
{
  return count_x_ == other.count_x_ && count_z_ == other.count_z_ && nodes_ == other.nodes_;
}

} // namespace romimg
