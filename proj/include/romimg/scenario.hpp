// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_SCENARIO_HPP
#define ROMIMG_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "romimg/grid.hpp"
#include "romimg/medium.hpp"
#include "romimg/pulse.hpp"

namespace romimg
{

// Thin low-velocity segment from a to b, rasterized onto every node within
// thickness / 2 of the segment. Lengths in units of lambda_c, speed relative to c_o.
struct Reflector
{
  Point a;
  Point b;
  double thickness = 0.125;
  double speed = 0.5;
};

// Geometry of an experiment in scale-free units: lengths in lambda_c = 1, omega_c = 2 pi,
// c_o = 1. The array sits on the first node row below the sound-hard top edge, its ends
// `margin` from the side walls.
struct ScenarioSpec
{
  std::string name = "custom";
  double width = 32.0;
  double depth = 12.0;
  double h = 1.0 / 16.0;
  double c0 = 1.0;
  int m = 49;
  double aperture = 30.0;
  double array_center = -1.0; // < 0 centers the array
  double tau_factor = 0.4;    // tau = tau_factor pi / omega_c
  int n = 0;                  // 0 selects two round trips to the deepest reflector
  double bandwidth_ratio = 0.25;
  double ref_strip = 1.0;
  std::vector<Reflector> reflectors;

  // Imaging window (defaults: full width, from 1 lambda below the array to the depth).
  std::optional<double> image_x0, image_x1, image_z0, image_z1;
  double image_dx = 0.25;
  double image_dz = 0.125;
};

struct Scenario
{
  ScenarioSpec spec;
  Medium medium;
  ArrayGeometry array;
  Pulse pulse;
  double tau = 0.0;
  int n = 0;

  ImagingGrid imaging_grid() const;
};

// waveguide, halfspace or homogeneous.
ScenarioSpec preset_spec(const std::string &name);
Scenario build_scenario(const ScenarioSpec &spec);
Scenario preset_scenario(const std::string &name);

void to_json(nlohmann::json &j, const ScenarioSpec &spec);
void from_json(const nlohmann::json &j, ScenarioSpec &spec);

} // namespace romimg

#endif // ROMIMG_SCENARIO_HPP
