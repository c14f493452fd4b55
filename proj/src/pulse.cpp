// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include "romimg/pulse.hpp"

#include <cmath>
#include <cstdlib>

#include "romimg/error.hpp"

namespace romimg
{

namespace
{
constexpr double pi = std::numbers::pi;
// exp(-(4.3)^2) ~ 1e-8: envelope of the half pulse at its truncation point.
constexpr double half_support_factor = 4.3;
constexpr int spectral_quadrature_intervals = 8192;
} // namespace

Pulse::Pulse(double omega_c, double bandwidth_ratio, double scale)
  : omega_c_(omega_c), bandwidth_(bandwidth_ratio * omega_c), scale_(scale)
{
  require(omega_c > 0.0, "pulse: carrier frequency must be positive");
  require(bandwidth_ratio > 0.0, "pulse: bandwidth must be positive");
  require(scale >= 0.0, "pulse: amplitude scale must be non-negative");
  half_support_ = half_support_factor / bandwidth_;
}

double Pulse::value(double t) const
{
  const double b = bandwidth_;
  return scale_ * std::sqrt(2.0 * pi) / 2.0 * std::exp(-0.5 * t * t * b * b) *
         std::cos(omega_c_ * t);
}

double Pulse::spectrum(double omega) const
{
  const double b = bandwidth_;
  const double dm = omega - omega_c_;
  const double dp = omega + omega_c_;
  return scale_ * pi / (2.0 * b) *
         (std::exp(-dm * dm / (2.0 * b * b)) + std::exp(-dp * dp / (2.0 * b * b)));
}

double Pulse::sqrt_spectrum(double omega) const { return std::sqrt(spectrum(omega)); }

double Pulse::max_frequency() const { return omega_c_ + 12.0 * bandwidth_; }

double Pulse::half_pulse(double t) const
{
  // (1/pi) int_0^inf fhat^{1/2}(w) cos(w t) dw, composite Simpson.
  const int n = spectral_quadrature_intervals;
  const double wmax = max_frequency();
  const double dw = wmax / n;
  double sum = sqrt_spectrum(0.0) + sqrt_spectrum(wmax) * std::cos(wmax * t);
  for (int i = 1; i < n; ++i)
  {
    const double w = i * dw;
    sum += (i % 2 ? 4.0 : 2.0) * sqrt_spectrum(w) * std::cos(w * t);
  }
  return sum * dw / 3.0 / pi;
}

DiscretePulse::DiscretePulse(const Pulse &pulse, double dt) : pulse_(pulse), dt_(dt)
{
  require(dt > 0.0, "pulse: time step must be positive");
  half_steps_ = static_cast<int>(std::ceil(pulse.half_support() / dt));
  half_.resize(half_steps_ + 1);
  for (int k = 0; k <= half_steps_; ++k)
    half_[k] = pulse.half_pulse(k * dt);

  full_.assign(2 * half_steps_ + 1, 0.0);
  for (int k = 0; k <= 2 * half_steps_; ++k)
  {
    double acc = 0.0;
    for (int i = k - half_steps_; i <= half_steps_; ++i)
      acc += half(i) * half(k - i);
    full_[k] = dt * acc;
  }
}

double DiscretePulse::half(int k) const
{
  const int a = std::abs(k);
  return a <= half_steps_ ? half_[a] : 0.0;
}

double DiscretePulse::full(int k) const
{
  const int a = std::abs(k);
  return a <= 2 * half_steps_ ? full_[a] : 0.0;
}

double DiscretePulse::full_source(int k) const { return (full(k + 1) - full(k - 1)) / (2.0 * dt_); }

double DiscretePulse::half_source(int k) const { return (half(k + 1) - half(k - 1)) / (2.0 * dt_); }

double DiscretePulse::half_spectrum(double omega) const
{
  double acc = half_[0];
  for (int k = 1; k <= half_steps_; ++k)
    acc += 2.0 * half_[k] * std::cos(k * dt_ * omega);
  return dt_ * acc;
}

double DiscretePulse::full_spectrum(double omega) const
{
  const double s = half_spectrum(omega);
  return s * s;
}

} // namespace romimg
