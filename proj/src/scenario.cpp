// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include "romimg/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "romimg/error.hpp"

namespace romimg
{

namespace
{

constexpr double omega_c = 2.0 * std::numbers::pi;

double segment_distance(const Point &p, const Point &a, const Point &b)
{
  const double vx = b.x - a.x;
  const double vz = b.z - a.z;
  const double len2 = vx * vx + vz * vz;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.z - a.z) * vz) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, {a.x + t * vx, a.z + t * vz});
}

int default_n(const ScenarioSpec &spec, double tau)
{
  double deepest = 0.0;
  for (const auto &r : spec.reflectors)
    deepest = std::max({deepest, r.a.z, r.b.z});
  if (deepest == 0.0)
    deepest = spec.depth / 4.0;
  // (2n - 1) tau >= two round trips at c0.
  const double window = 4.0 * deepest / spec.c0;
  return static_cast<int>(std::ceil((window / tau + 1.0) / 2.0));
}

} // namespace

ImagingGrid Scenario::imaging_grid() const
{
  const double h = medium.h();
  const double x0 = spec.image_x0.value_or(0.0);
  const double x1 = spec.image_x1.value_or(medium.width());
  const double z0 = spec.image_z0.value_or(1.0);
  const double z1 = spec.image_z1.value_or(medium.depth());
  const int sx = std::max(1, static_cast<int>(std::lround(spec.image_dx / h)));
  const int sz = std::max(1, static_cast<int>(std::lround(spec.image_dz / h)));
  const NodeIndex lo = medium.nearest_node({std::clamp(x0, 0.0, medium.width()),
                                            std::clamp(z0, 0.0, medium.depth())});
  const NodeIndex hi = medium.nearest_node({std::clamp(x1, 0.0, medium.width()),
                                            std::clamp(z1, 0.0, medium.depth())});
  require(hi.i >= lo.i && hi.k >= lo.k, "scenario: empty imaging window");
  return ImagingGrid(medium, lo.i, sx, (hi.i - lo.i) / sx + 1, lo.k, sz, (hi.k - lo.k) / sz + 1);
}

ScenarioSpec preset_spec(const std::string &name)
{
  ScenarioSpec s;
  s.name = name;
  if (name == "waveguide")
  {
    s.width = 32.0;
    s.depth = 10.0;
    s.aperture = 30.0;
    s.m = 49;
    s.tau_factor = 0.4;
    s.reflectors = {
      {{10.0, 3.5}, {22.0, 3.5}, 0.125, 0.5}, // two nearby horizontal reflectors
      {{12.0, 5.0}, {20.0, 5.0}, 0.125, 0.5},
      {{4.0, 4.5}, {8.0, 6.5}, 0.125, 0.5}, // oblique
      {{24.0, 6.5}, {28.0, 4.5}, 0.125, 0.5},
      {{16.0, 5.75}, {16.0, 7.0}, 0.125, 0.5}, // vertical, partly shadowed
    };
  }
  else if (name == "halfspace")
  {
    s.width = 40.0;
    s.depth = 12.0;
    s.aperture = 18.0;
    s.m = 49;
    s.tau_factor = 0.42;
    s.reflectors = {
      {{15.0, 4.0}, {19.0, 4.0}, 0.125, 0.5}, // crack-like
      {{20.0, 5.5}, {23.0, 5.5}, 0.125, 0.5},
      {{23.0, 5.5}, {25.0, 7.0}, 0.125, 0.5},
      {{16.0, 7.5}, {19.0, 8.0}, 0.125, 0.5},
    };
  }
  else if (name == "homogeneous")
  {
    s.width = 32.0;
    s.depth = 12.0;
    s.aperture = 30.0;
    s.m = 49;
    s.tau_factor = 0.4;
  }
  else
    throw ConfigError("unknown scenario '" + name + "' (waveguide, halfspace, homogeneous)");
  return s;
}

Scenario build_scenario(const ScenarioSpec &spec)
{
  require(spec.h > 0.0 && spec.width > 2.0 * spec.h && spec.depth > 2.0 * spec.h,
          "scenario: domain must span several grid cells");
  require(spec.c0 > 0.0, "scenario: background speed must be positive");
  require(spec.m >= 1, "scenario: m must be positive");
  require(spec.tau_factor > 0.0, "scenario: tau factor must be positive");
  require(spec.n >= 0, "scenario: n must be non-negative");

  // Soft walls at x = 0, x = width and z = depth; hard edge at z = 0.
  const int nx = static_cast<int>(std::lround(spec.width / spec.h)) - 1;
  const int nz = static_cast<int>(std::lround(spec.depth / spec.h - 0.5));
  Scenario sc;
  sc.spec = spec;
  sc.medium = Medium(nx, nz, spec.h, spec.c0);
  sc.medium.set_ref_strip(spec.ref_strip);
  for (const auto &r : spec.reflectors)
  {
    require(r.speed > 0.0 && r.thickness > 0.0, "scenario: reflector speed and thickness must be positive");
    for (int k = 0; k < nz; ++k)
      for (int i = 0; i < nx; ++i)
        if (segment_distance(sc.medium.position(i, k), r.a, r.b) <= 0.5 * r.thickness + 1e-9)
          sc.medium.c()[sc.medium.index(i, k)] = r.speed * spec.c0;
  }

  const double center = spec.array_center >= 0.0 ? spec.array_center : 0.5 * spec.width;
  const double z = sc.medium.position(0, 0).z;
  require(center - 0.5 * spec.aperture > 0.0 && center + 0.5 * spec.aperture < spec.width,
          "scenario: array does not fit inside the domain");
  sc.array = ArrayGeometry::linear(center - 0.5 * spec.aperture, center + 0.5 * spec.aperture,
                                   spec.m, z);
  sc.array.nodes(sc.medium); // rejects sensors sharing a node
  sc.pulse = Pulse(omega_c, spec.bandwidth_ratio);
  sc.tau = spec.tau_factor * std::numbers::pi / omega_c;
  sc.n = spec.n > 0 ? spec.n : default_n(spec, sc.tau);
  sc.medium.validate();
  return sc;
}

Scenario preset_scenario(const std::string &name) { return build_scenario(preset_spec(name)); }

void to_json(nlohmann::json &j, const ScenarioSpec &s)
{
  j = nlohmann::json{{"name", s.name},
                     {"width", s.width},
                     {"depth", s.depth},
                     {"h", s.h},
                     {"c0", s.c0},
                     {"m", s.m},
                     {"aperture", s.aperture},
                     {"array_center", s.array_center},
                     {"tau_factor", s.tau_factor},
                     {"n", s.n},
                     {"bandwidth_ratio", s.bandwidth_ratio},
                     {"ref_strip", s.ref_strip},
                     {"image_dx", s.image_dx},
                     {"image_dz", s.image_dz}};
  auto &refl = j["reflectors"] = nlohmann::json::array();
  for (const auto &r : s.reflectors)
    refl.push_back({{"a", {r.a.x, r.a.z}},
                    {"b", {r.b.x, r.b.z}},
                    {"thickness", r.thickness},
                    {"speed", r.speed}});
  if (s.image_x0 || s.image_x1 || s.image_z0 || s.image_z1)
  {
    auto &win = j["image_window"];
    if (s.image_x0)
      win["x0"] = *s.image_x0;
    if (s.image_x1)
      win["x1"] = *s.image_x1;
    if (s.image_z0)
      win["z0"] = *s.image_z0;
    if (s.image_z1)
      win["z1"] = *s.image_z1;
  }
}

void from_json(const nlohmann::json &j, ScenarioSpec &s)
{
  if (j.contains("preset"))
    s = preset_spec(j.at("preset").get<std::string>());
  auto read = [&](const char *key, auto &field) {
    if (j.contains(key))
      j.at(key).get_to(field);
  };
  read("name", s.name);
  read("width", s.width);
  read("depth", s.depth);
  read("h", s.h);
  read("c0", s.c0);
  read("m", s.m);
  read("aperture", s.aperture);
  read("array_center", s.array_center);
  read("tau_factor", s.tau_factor);
  read("n", s.n);
  read("bandwidth_ratio", s.bandwidth_ratio);
  read("ref_strip", s.ref_strip);
  read("image_dx", s.image_dx);
  read("image_dz", s.image_dz);
  if (j.contains("reflectors"))
  {
    s.reflectors.clear();
    for (const auto &r : j.at("reflectors"))
    {
      Reflector refl;
      const auto a = r.at("a").get<std::vector<double>>();
      const auto b = r.at("b").get<std::vector<double>>();
      require(a.size() == 2 && b.size() == 2, "scenario: reflector end points need two coordinates");
      refl.a = {a[0], a[1]};
      refl.b = {b[0], b[1]};
      if (r.contains("thickness"))
        r.at("thickness").get_to(refl.thickness);
      if (r.contains("speed"))
        r.at("speed").get_to(refl.speed);
      s.reflectors.push_back(refl);
    }
  }
  if (j.contains("image_window"))
  {
    const auto &w = j.at("image_window");
    if (w.contains("x0"))
      s.image_x0 = w.at("x0").get<double>();
    if (w.contains("x1"))
      s.image_x1 = w.at("x1").get<double>();
    if (w.contains("z0"))
      s.image_z0 = w.at("z0").get<double>();
    if (w.contains("z1"))
      s.image_z1 = w.at("z1").get<double>();
  }
}

} // namespace romimg
