// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_GRID_HPP
#define ROMIMG_GRID_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "romimg/medium.hpp"

namespace romimg
{

// Equidistant sensors on a segment parallel to the accessible edge.
struct ArrayGeometry
{
  std::vector<Point> positions;

  int m() const { return static_cast<int>(positions.size()); }
  double aperture() const;

  static ArrayGeometry linear(double x_begin, double x_end, int m, double z);

  // Snaps every sensor to its nearest node; throws ConfigError when a sensor is
  // outside the domain or two sensors share a node.
  std::vector<std::size_t> nodes(const Medium &medium) const;
};

// Regular sub-lattice of the solver nodes on which fields and images live.
class ImagingGrid
{
public:
  ImagingGrid() = default;
  ImagingGrid(const Medium &medium, int i0, int stride_x, int count_x, int k0, int stride_z,
              int count_z);

  // Every solver node.
  static ImagingGrid full(const Medium &medium);
  // Nodes with x in [x0, x1], z in [z0, z1], keeping every stride-th node.
  static ImagingGrid window(const Medium &medium, double x0, double x1, double z0, double z1,
                            int stride_x, int stride_z);

  std::size_t size() const { return static_cast<std::size_t>(count_x_) * count_z_; }
  int count_x() const { return count_x_; }
  int count_z() const { return count_z_; }
  int i0() const { return i0_; }
  int k0() const { return k0_; }
  int stride_x() const { return stride_x_; }
  int stride_z() const { return stride_z_; }
  double dx() const { return dx_; }
  double dz() const { return dz_; }
  Point origin() const { return origin_; }

  // Pixel p = b * count_x + a for column a (cross-range) and row b (range).
  std::size_t pixel(int a, int b) const { return static_cast<std::size_t>(b) * count_x_ + a; }
  Point position(std::size_t p) const;
  // Index of the underlying solver node.
  std::size_t node(std::size_t p) const { return nodes_[p]; }
  const std::vector<std::size_t> &nodes() const { return nodes_; }

  bool contains(const Point &y) const;

  struct Stencil
  {
    std::array<std::size_t, 4> pixel{};
    std::array<double, 4> weight{};
  };
  // Bilinear weights; at a grid node the stencil is exactly that node with weight 1.
  Stencil interpolation(const Point &y) const;

  // Pixel nearest to y.
  std::size_t nearest(const Point &y) const;

  bool same_as(const ImagingGrid &other) const;

private:
  int i0_ = 0;
  int k0_ = 0;
  int stride_x_ = 1;
  int stride_z_ = 1;
  int count_x_ = 0;
  int count_z_ = 0;
  double dx_ = 0.0;
  double dz_ = 0.0;
  Point origin_;
  std::vector<std::size_t> nodes_;
};

} // namespace romimg

#endif // ROMIMG_GRID_HPP
