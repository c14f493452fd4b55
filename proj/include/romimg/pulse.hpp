// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_PULSE_HPP
#define ROMIMG_PULSE_HPP

#include <numbers>
#include <vector>

namespace romimg
{

// Modulated Gaussian probing pulse
//   f(t) = sqrt(2 pi)/2 exp(-t^2 B^2 / 2) cos(omega_c t),
// even in t, with non-negative cosine transform.
class Pulse
{
public:
  explicit Pulse(double omega_c = 2.0 * std::numbers::pi, double bandwidth_ratio = 0.25,
                 double scale = 1.0);

  double omega_c() const { return omega_c_; }
  double bandwidth() const { return bandwidth_; }
  double scale() const { return scale_; }

  // Truncation half-width of the half pulse; the full pulse is supported on twice that.
  double half_support() const { return half_support_; }
  double t_f() const { return 2.0 * half_support_; }

  double value(double t) const;
  // fhat(w) = int f(t) cos(w t) dt >= 0.
  double spectrum(double omega) const;
  double sqrt_spectrum(double omega) const;
  // Inverse cosine transform of sqrt_spectrum, evaluated by quadrature.
  double half_pulse(double t) const;

  // Frequencies above this carry less than ~1e-15 of the spectral peak.
  double max_frequency() const;

private:
  double omega_c_;
  double bandwidth_;
  double scale_;
  double half_support_;
};

// Samples of the pulse on a time lattice t_k = k dt, built so that the sampled full
// pulse is exactly the discrete autoconvolution of the sampled half pulse:
//   f_k = dt sum_i h_i h_{k-i}.
// Consequently the discrete-time transform of f is the square of that of h, which
// makes leapfrog traces and leapfrog half-pulse snapshots exactly consistent.
class DiscretePulse
{
public:
  DiscretePulse(const Pulse &pulse, double dt);

  double dt() const { return dt_; }
  int half_steps() const { return half_steps_; }  // h_k nonzero for |k| <= half_steps
  int full_steps() const { return 2 * half_steps_; }

  double half(int k) const;
  double full(int k) const;

  // Source amplitudes: centered time difference of the (half) pulse. Nonzero for
  // |k| <= full_steps() + 1 (resp. half_steps() + 1) and odd in k.
  double full_source(int k) const;
  double half_source(int k) const;

  // dt sum_k h_k cos(k dt w) and its square.
  double half_spectrum(double omega) const;
  double full_spectrum(double omega) const;

  const Pulse &pulse() const { return pulse_; }

private:
  Pulse pulse_;
  double dt_;
  int half_steps_;
  std::vector<double> half_; // k = 0..half_steps
  std::vector<double> full_; // k = 0..2 half_steps
};

} // namespace romimg

#endif // ROMIMG_PULSE_HPP
