// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_MEDIUM_HPP
#define ROMIMG_MEDIUM_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace romimg
{

// x is cross-range (parallel to the array), z is range (depth, away from the array).
struct Point
{
  double x = 0.0;
  double z = 0.0;
};

double distance(const Point &a, const Point &b);

enum class Boundary
{
  SoundHard, // homogeneous Neumann
  SoundSoft  // homogeneous Dirichlet
};

enum class Edge : int
{
  Top = 0, // z = 0
  Bottom = 1,
  Left = 2, // x = 0
  Right = 3
};

struct NodeIndex
{
  int i = 0; // cross-range
  int k = 0; // range
};

// Wave speed on a rectangular node lattice.
//
// Nodes sit at x = x0 + i h, z = z0 + k h. A sound-soft edge lies one cell beyond the
// outermost node row (those boundary nodes are eliminated), a sound-hard edge half a
// cell beyond it (mirror ghost node). Both placements keep the discrete operator
// C L C exactly symmetric.
class Medium
{
public:
  Medium() = default;
  Medium(int nx, int nz, double h, double c_background,
         std::array<Boundary, 4> boundary = default_boundary());

  static std::array<Boundary, 4> default_boundary()
  {
    return {Boundary::SoundHard, Boundary::SoundSoft, Boundary::SoundSoft, Boundary::SoundSoft};
  }

  int nx() const { return nx_; }
  int nz() const { return nz_; }
  double h() const { return h_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * nz_; }

  std::size_t index(int i, int k) const { return static_cast<std::size_t>(k) * nx_ + i; }
  std::size_t index(NodeIndex n) const { return index(n.i, n.k); }
  NodeIndex node(std::size_t idx) const
  {
    return {static_cast<int>(idx % nx_), static_cast<int>(idx / nx_)};
  }

  Boundary boundary(Edge e) const { return boundary_[static_cast<int>(e)]; }
  const std::array<Boundary, 4> &boundaries() const { return boundary_; }

  // The single sound-hard edge.
  Edge accessible_edge() const;

  Point position(int i, int k) const;
  Point position(NodeIndex n) const { return position(n.i, n.k); }
  // Nearest lattice node; throws if p lies outside the domain.
  NodeIndex nearest_node(const Point &p) const;
  bool contains(const Point &p) const;

  // Physical extent of the domain including the boundary offsets.
  double width() const;
  double depth() const;

  std::vector<double> &c() { return c_; }
  const std::vector<double> &c() const { return c_; }
  std::vector<double> &c_ref() { return c_ref_; }
  const std::vector<double> &c_ref() const { return c_ref_; }

  double c_max() const;
  double c_ref_max() const;

  // Depth of the strip next to the accessible edge where c must equal c_ref.
  double ref_strip() const { return ref_strip_; }
  void set_ref_strip(double depth) { ref_strip_ = depth; }

  // Same lattice with c replaced by c_ref.
  Medium reference() const;

  // Checks c > 0, c_ref > 0, exactly one sound-hard edge and c == c_ref in the strip.
  void validate() const;

private:
  double offset(Edge e) const;

  int nx_ = 0;
  int nz_ = 0;
  double h_ = 0.0;
  std::vector<double> c_;
  std::vector<double> c_ref_;
  std::array<Boundary, 4> boundary_ = default_boundary();
  double ref_strip_ = 0.0;
};

} // namespace romimg

#endif // ROMIMG_MEDIUM_HPP
