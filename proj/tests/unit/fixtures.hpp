// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_TESTS_FIXTURES_HPP
#define ROMIMG_TESTS_FIXTURES_HPP

#include <numbers>

#include "romimg/grid.hpp"
#include "romimg/medium.hpp"
#include "romimg/pulse.hpp"
#include "romimg/scenario.hpp"

namespace romimg::test
{

inline constexpr double omega_c = 2.0 * std::numbers::pi;

// Small medium with a slow block, cheap enough for the dense oracle.
struct Small
{
  Medium medium;
  ArrayGeometry array;
  Pulse pulse;
  double tau = 0.4 * std::numbers::pi / omega_c;
  int n = 8;

  explicit Small(bool block = true, int m = 5)
    : medium(24, 20, 0.125, 1.0)
  {
    if (block)
      for (int k = 12; k < 14; ++k)
        for (int i = 6; i < 18; ++i)
          medium.c()[medium.index(i, k)] = 0.6;
    medium.set_ref_strip(0.25);
    array = ArrayGeometry::linear(0.5, medium.width() - 0.5, m, 0.0);
  }
};

inline ScenarioSpec tiny_spec()
{
  ScenarioSpec s;
  s.name = "tiny";
  s.width = 8.0;
  s.depth = 4.0;
  s.h = 0.125;
  s.m = 9;
  s.aperture = 6.0;
  s.reflectors = {{{2.0, 2.0}, {6.0, 2.0}, 0.125, 0.5}};
  s.image_z0 = 0.5;
  return s;
}

} // namespace romimg::test

#endif // ROMIMG_TESTS_FIXTURES_HPP
