// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_LAYERED1D_HPP
#define ROMIMG_LAYERED1D_HPP

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "romimg/pulse.hpp"

namespace romimg
{

// Piecewise constant impedance in travel-time coordinates: zeta[0] on (0, T[0]],
// zeta[j] on (T[j-1], T[j]], zeta.back() on (T.back(), total]. Sound-hard at T = 0,
// sound-soft at T = total.
struct LayeredMedium
{
  std::vector<double> zeta;       // l + 2 values
  std::vector<double> interfaces; // l + 1 increasing travel times
  double total = 0.0;

  void validate() const;
  int layers() const { return static_cast<int>(interfaces.size()) - 1; } // l
  double impedance(double T) const;
  // Single interface at T0 between zeta0 and zeta1.
  static LayeredMedium single(double zeta0, double zeta1, double T0, double total);
  static LayeredMedium homogeneous(double zeta, double total);
};

// Travel time T(z) = int_0^z dz'/c(z') by the trapezoidal rule on samples c(z_i), z_i = i dz.
std::vector<double> travel_time(const std::vector<double> &c, double dz);

// (R, T) across an impedance jump zeta_j -> zeta_j1.
std::pair<double, double> reflection_transmission(double zeta_j, double zeta_j1);

// Compactly supported modulated pulse f(t) = F(t / t_f) cos(omega_c t), F(s) = cos^4(pi s / 2)
// on |s| < 1. The initial state is phi = 2 f.
struct CompactPulse
{
  double omega_c = 6.283185307179586;
  double t_f = 2.0;

  double value(double t) const;
  double phi(double T) const { return 2.0 * value(T); }
};

using Profile = std::function<double(double)>;

// Reference solution 1/2 [phi(T - t) + phi(T + t)].
double dalembert(const Profile &phi, double t, double T);

// Multiple-reflection series for one interface, truncated at q_max.
double single_layer_series(const LayeredMedium &medium, const Profile &phi, double t, double T,
                           int q_max);
// Smallest q_max covering every echo that can reach (t, T) plus |R|^q below 1e-16.
int series_terms(const LayeredMedium &medium, double t, double support);

struct LayeredSolution
{
  double dT = 0.0;
  double dt = 0.0;
  Eigen::VectorXd nodes;                // T_i = (i + 1/2) dT
  std::vector<double> times;            // requested times
  std::vector<Eigen::VectorXd> states;  // P at each requested time
};

// Leapfrog for P_tt = zeta d_T(zeta^-1 d_T P), P(0) = phi, P_t(0) = 0, cell-centered nodes,
// face impedance the mean of the adjacent cells. Every requested time must be a multiple
// of the internal step, which is the largest <= cfl dT dividing `time_unit`.
LayeredSolution solve_layered(const LayeredMedium &medium, const Profile &phi, double dT,
                              double time_unit, const std::vector<double> &times,
                              double cfl = 0.5);

struct SpanResidual
{
  double residual = 0.0; // |P - proj P| / |P|
  int rank = 0;
  bool flagged = false;  // rank deficient span, pseudo-inverse projection
};

struct SpanOptions
{
  CompactPulse pulse;
  double dT = 0.0; // 0 selects t_f / 64
  double cfl = 0.5; // 1D solver, layered case only
};

// Least-squares residual of P(j tau, .) against span{P_o(j' tau, .), j' <= j} in the
// reference impedance zeta[0]. Uses the series for one interface, the 1D solver otherwise.
SpanResidual span_residual(const LayeredMedium &medium, double tau, int n, int j,
                           const SpanOptions &opts = {});

struct WaveguideModes
{
  double D = 0.0;
  double omega_c = 0.0;
  double c_bar = 1.0;
  double k_c = 0.0;
  int N = 0;
  std::vector<double> alpha;        // alpha_j = pi j / D
  std::vector<double> beta;         // beta_j(omega_c)
  std::vector<double> group_speed;  // c_bar beta_j / k_c

  double psi(int j, double x) const; // 1-based mode index
};

WaveguideModes mode_table(double D, double omega_c, double c_bar);

struct ModeArrival
{
  int j = 0;
  double range = 0.0;     // distance from the source row
  double predicted = 0.0; // range / c_{o,j}
  double measured = 0.0;  // peak of the mode-projected envelope
  double pulse_width = 0.0; // 2 / B
};

// 2D finite-difference check of the group speed: the waveguide (0, D) x (0, depth) with soft
// walls is excited on its first node row by psi_j(x) f'(t), and the psi_j component of the
// field at `range` below is tracked. Envelope sqrt(a^2 + (a'/omega_c)^2).
ModeArrival measure_mode_arrival(const WaveguideModes &modes, int j, double range, double h,
                                 const Pulse &pulse);

// Q_jl = int_a^b psi_j psi_l dx, closed form.
Eigen::MatrixXd mode_coupling(double D, double a, double b, int N);

} // namespace romimg

#endif // ROMIMG_LAYERED1D_HPP
