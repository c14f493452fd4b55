// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include "romimg/medium.hpp"

#include <algorithm>
#include <cmath>

#include "romimg/error.hpp"

namespace romimg
{

double distance(const Point &a, const Point &b) { return std::hypot(a.x - b.x, a.z - b.z); }

Medium::Medium(int nx, int nz, double h, double c_background, std::array<Boundary, 4> boundary)
  : nx_(nx), nz_(nz), h_(h), boundary_(boundary)
{
  require(nx > 0 && nz > 0, "medium: grid must have at least one node per direction");
  require(h > 0.0, "medium: grid spacing must be positive");
  require(c_background > 0.0, "medium: background speed must be positive");
  c_.assign(size(), c_background);
  c_ref_.assign(size(), c_background);
}

Edge Medium::accessible_edge() const
{
  for (int e = 0; e < 4; ++e)
    if (boundary_[e] == Boundary::SoundHard)
      return static_cast<Edge>(e);
  throw ConfigError("medium: no sound-hard edge");
}

double Medium::offset(Edge e) const
{
  return boundary(e) == Boundary::SoundHard ? 0.5 * h_ : h_;
}

Point Medium::position(int i, int k) const
{
  return {offset(Edge::Left) + i * h_, offset(Edge::Top) + k * h_};
}

double Medium::width() const { return offset(Edge::Left) + (nx_ - 1) * h_ + offset(Edge::Right); }

double Medium::depth() const { return offset(Edge::Top) + (nz_ - 1) * h_ + offset(Edge::Bottom); }

bool Medium::contains(const Point &p) const
{
  return p.x >= 0.0 && p.x <= width() && p.z >= 0.0 && p.z <= depth();
}

NodeIndex Medium::nearest_node(const Point &p) const
{
  if (!contains(p))
    throw ConfigError("medium: point (" + std::to_string(p.x) + ", " + std::to_string(p.z) +
                      ") lies outside the domain");
  const int i = static_cast<int>(std::lround((p.x - offset(Edge::Left)) / h_));
  const int k = static_cast<int>(std::lround((p.z - offset(Edge::Top)) / h_));
  return {std::clamp(i, 0, nx_ - 1), std::clamp(k, 0, nz_ - 1)};
}

double Medium::c_max() const { return *std::max_element(c_.begin(), c_.end()); }

double Medium::c_ref_max() const { return *std::max_element(c_ref_.begin(), c_ref_.end()); }

Medium Medium::reference() const
{
  Medium out = *this;
  out.c_ = c_ref_;
  return out;
}

void Medium::validate() const
{
  require(c_.size() == size() && c_ref_.size() == size(), "medium: speed field size mismatch");
  for (std::size_t idx = 0; idx < size(); ++idx)
  {
    require(c_[idx] > 0.0 && std::isfinite(c_[idx]), "medium: wave speed must be positive");
    require(c_ref_[idx] > 0.0 && std::isfinite(c_ref_[idx]),
            "medium: reference wave speed must be positive");
  }
  const auto hard = std::count(boundary_.begin(), boundary_.end(), Boundary::SoundHard);
  require(hard == 1, "medium: exactly one edge must be sound hard");

  const Edge acc = accessible_edge();
  for (int k = 0; k < nz_; ++k)
    for (int i = 0; i < nx_; ++i)
    {
      const Point p = position(i, k);
      double d = 0.0;
      switch (acc)
      {
      case Edge::Top: d = p.z; break;
      case Edge::Bottom: d = depth() - p.z; break;
      case Edge::Left: d = p.x; break;
      case Edge::Right: d = width() - p.x; break;
      }
      if (d <= ref_strip_)
        require(c_[index(i, k)] == c_ref_[index(i, k)],
                "medium: c differs from c_ref inside the sensor strip");
    }
}

} // namespace romimg
