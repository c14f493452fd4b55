// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"

#include "romimg/error.hpp"
#include "romimg/layered1d.hpp"
#include "romimg/pulse.hpp"

using namespace romimg;

TEST_CASE("reflection and transmission coefficients")
{
  auto [r0, t0] = reflection_transmission(2.0, 2.0);
  CHECK(r0 == 0.0);
  CHECK(t0 == doctest::Approx(1.0));
  auto [r, t] = reflection_transmission(1.0, 3.0);
  CHECK(r == doctest::Approx(-0.5));
  CHECK(t == doctest::Approx(std::sqrt(3.0) / 2.0));
  CHECK_THROWS_AS(reflection_transmission(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(reflection_transmission(1.0, -2.0), ConfigError);
}

TEST_CASE("layered medium validation and travel time")
{
  CHECK_THROWS_AS(LayeredMedium::single(1.0, 3.0, 5.0, 4.0), ConfigError);
  LayeredMedium bad{{1.0, 2.0, 3.0}, {2.0, 1.0}, 5.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  const auto T = travel_time({1.0, 2.0, 4.0}, 0.5);
  REQUIRE(T.size() == 3);
  CHECK(T[0] == 0.0);
  CHECK(T.back() > T[1]);
}

TEST_CASE("single-layer series")
{
  const CompactPulse pulse;
  const Profile phi = [pulse](double T) { return pulse.phi(T); };

  SUBCASE("matched impedances reduce to d'Alembert")
  {
    const auto med = LayeredMedium::single(2.0, 2.0, 6.0, 30.0);
    for (double t : {0.5, 3.0, 8.0})
      for (double T : {0.0, 2.5, 7.0, 11.0})
        CHECK(single_layer_series(med, phi, t, T, 10) == doctest::Approx(dalembert(phi, t, T)));
  }
  SUBCASE("near side before the first echo sees only the direct wave")
  {
    const auto med = LayeredMedium::single(1.0, 3.0, 10.0, 30.0);
    for (double t : {1.0, 3.0, 5.0})
      for (double T : {0.0, 1.5, 4.0})
        CHECK(single_layer_series(med, phi, t, T, 10) == doctest::Approx(dalembert(phi, t, T)));
  }
}

TEST_CASE("span residual")
{
  SpanOptions opts;
  opts.pulse = CompactPulse{2.0 * std::numbers::pi, 1.0};
  const double tau = 2.0;
  CHECK(span_residual(LayeredMedium::homogeneous(1.0, 60.0), tau, 10, 6, opts).residual < 1e-12);
  const double g = span_residual(LayeredMedium::single(1.0, 3.0, 5.5 * tau, 60.0), tau, 20, 15, opts).residual;
  const double h = span_residual(LayeredMedium::single(1.0, 3.0, 5.25 * tau, 60.0), tau, 20, 15, opts).residual;
  CHECK(g < 1e-8);
  CHECK(h > 1e-3);
}

TEST_CASE("1D solver rejects unstable steps and off-lattice times")
{
  const auto med = LayeredMedium::single(1.0, 3.0, 4.0, 10.0);
  const CompactPulse pulse;
  const Profile phi = [pulse](double T) { return pulse.phi(T); };
  CHECK_THROWS_AS(solve_layered(med, phi, 0.01, 1.0, {1.0}, 1.5), ConfigError);
  CHECK_THROWS_AS(solve_layered(med, phi, 0.01, 1.0, {1.0 / 3.0}), ConfigError);
}

TEST_CASE("waveguide modes")
{
  const double omega = 2.0 * std::numbers::pi;
  const double D = 5.3 * std::numbers::pi / omega;
  const WaveguideModes w = mode_table(D, omega, 1.0);
  CHECK(w.N == 5);
  for (int j = 0; j < w.N; ++j)
  {
    CHECK(w.beta[j] > 0.0);
    CHECK(w.c_bar * w.beta[j] / w.k_c < w.c_bar);
  }
  CHECK_THROWS_AS(mode_table(0.3, omega, 1.0), ConfigError);

  const Eigen::MatrixXd half = mode_coupling(D, 0.0, D / 2.0, w.N);
  CHECK(half(0, 0) == doctest::Approx(0.5));
  double last = -1.0;
  for (double frac : {0.3, 0.5, 0.7, 0.9, 1.0})
  {
    const Eigen::MatrixXd Q = mode_coupling(D, 0.0, frac * D, w.N);
    const double smin = Eigen::JacobiSVD<Eigen::MatrixXd>(Q).singularValues().minCoeff();
    CHECK(smin > last);
    last = smin;
  }
  CHECK(last == doctest::Approx(1.0));
}
