// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include "romimg/layered1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "romimg/error.hpp"
#include "romimg/medium.hpp"
#include "romimg/solver.hpp"

namespace romimg
{

void LayeredMedium::validate() const
{
  require(!zeta.empty(), "layered: no impedances");
  require(zeta.size() == interfaces.size() + 1, "layered: need one more impedance than interfaces");
  for (double z : zeta)
    require(z > 0.0, "layered: impedances must be positive");
  for (std::size_t j = 0; j < interfaces.size(); ++j)
  {
    require(interfaces[j] > 0.0, "layered: interface travel times must be positive");
    require(j == 0 || interfaces[j] > interfaces[j - 1],
            "layered: interface travel times must increase");
  }
  require(total > (interfaces.empty() ? 0.0 : interfaces.back()),
          "layered: total travel time must exceed the last interface");
}

double LayeredMedium::impedance(double T) const
{
  const auto it = std::lower_bound(interfaces.begin(), interfaces.end(), T);
  return zeta[static_cast<std::size_t>(it - interfaces.begin())];
}

LayeredMedium LayeredMedium::single(double zeta0, double zeta1, double T0, double total)
{
  LayeredMedium m{{zeta0, zeta1}, {T0}, total};
  m.validate();
  return m;
}

LayeredMedium LayeredMedium::homogeneous(double zeta, double total)
{
  LayeredMedium m{{zeta}, {}, total};
  m.validate();
  return m;
}

std::vector<double> travel_time(const std::vector<double> &c, double dz)
{
  require(dz > 0.0, "travel time: dz must be positive");
  std::vector<double> T(c.size(), 0.0);
  for (std::size_t i = 1; i < c.size(); ++i)
  {
    require(c[i] > 0.0 && c[i - 1] > 0.0, "travel time: speeds must be positive");
    T[i] = T[i - 1] + 0.5 * dz * (1.0 / c[i - 1] + 1.0 / c[i]);
  }
  return T;
}

std::pair<double, double> reflection_transmission(double zeta_j, double zeta_j1)
{
  require(zeta_j > 0.0 && zeta_j1 > 0.0, "reflection: impedances must be positive");
  const double s = zeta_j + zeta_j1;
  return {(zeta_j - zeta_j1) / s, 2.0 * std::sqrt(zeta_j * zeta_j1) / s};
}

double CompactPulse::value(double t) const
{
  const double s = t / t_f;
  if (std::abs(s) >= 1.0)
    return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * s);
  return c * c * c * c * std::cos(omega_c * t);
}

double dalembert(const Profile &phi, double t, double T)
{
  return 0.5 * (phi(T - t) + phi(T + t));
}

double single_layer_series(const LayeredMedium &medium, const Profile &phi, double t, double T,
                           int q_max)
{
  require(medium.layers() == 0, "series: exactly one interface expected");
  require(q_max >= 0, "series: q_max must be non-negative");
  t = std::abs(t); // P is even in t
  const double T0 = medium.interfaces[0];
  const auto [R, Tr] = reflection_transmission(medium.zeta[0], medium.zeta[1]);
  double sum = 0.0;
  double coef = 1.0;
  if (T <= T0)
  {
    for (int q = 0; q <= q_max; ++q, coef *= -R)
      sum += coef * 0.5 * (phi(T - t + 2.0 * q * T0) + phi(T + t - 2.0 * q * T0));
    return sum;
  }
  for (int q = 0; q <= q_max; ++q, coef *= -R)
    sum += coef * 0.5 * phi(T - t + 2.0 * q * T0);
  return Tr * std::sqrt(medium.zeta[1] / medium.zeta[0]) * sum;
}

int series_terms(const LayeredMedium &medium, double t, double support)
{
  require(medium.layers() == 0, "series: exactly one interface expected");
  const double T0 = medium.interfaces[0];
  int q = static_cast<int>(std::ceil((std::abs(t) + support) / (2.0 * T0))) + 1;
  const double R = std::abs(reflection_transmission(medium.zeta[0], medium.zeta[1]).first);
  if (R > 0.0)
    q = std::min(q, static_cast<int>(std::ceil(std::log(1e-16) / std::log(R))) + 1);
  return std::max(q, 0);
}

LayeredSolution solve_layered(const LayeredMedium &medium, const Profile &phi, double dT,
                              double time_unit, const std::vector<double> &times, double cfl)
{
  medium.validate();
  require(dT > 0.0 && time_unit > 0.0, "layered solver: dT and time unit must be positive");
  require(cfl > 0.0, "layered solver: cfl must be positive");
  const int N = static_cast<int>(std::lround(medium.total / dT));
  require(N >= 2, "layered solver: domain must span several cells");
  dT = medium.total / N;

  LayeredSolution out;
  out.dT = dT;
  out.dt = time_unit / std::ceil(time_unit / (cfl * dT) - 1e-12);
  out.nodes.resize(N);
  std::vector<double> zc(N);
  for (int i = 0; i < N; ++i)
  {
    out.nodes(i) = (i + 0.5) * dT;
    zc[i] = medium.impedance(out.nodes(i));
  }
  // inv_face[i] = 1 / zeta on the face between cells i - 1 and i; zero at the hard edge,
  // and the sound-soft edge mirrors with a sign flip.
  std::vector<double> inv_face(N + 1);
  inv_face[0] = 0.0;
  for (int i = 1; i < N; ++i)
    inv_face[i] = 2.0 / (zc[i - 1] + zc[i]);
  inv_face[N] = 1.0 / zc[N - 1];

  const double r = out.dt * out.dt / (dT * dT);
  // Gershgorin bound of the operator symmetrized by zeta^{-1/2}.
  double bound = 0.0;
  for (int i = 0; i < N; ++i)
  {
    double row = zc[i] * (inv_face[i] + (i + 1 < N ? 1.0 : 2.0) * inv_face[i + 1]);
    if (i > 0)
      row += std::sqrt(zc[i] * zc[i - 1]) * inv_face[i];
    if (i + 1 < N)
      row += std::sqrt(zc[i] * zc[i + 1]) * inv_face[i + 1];
    bound = std::max(bound, row);
  }
  if (r * bound > 4.0 * (1.0 + 1e-12))
    throw ConfigError("layered solver: time step violates the stability bound");

  std::vector<int> steps;
  int k_last = 0;
  for (double t : times)
  {
    require(t >= 0.0, "layered solver: times must be non-negative");
    const int k = static_cast<int>(std::lround(t / out.dt));
    require(std::abs(k * out.dt - t) <= 1e-9 * std::max(1.0, t),
            "layered solver: requested time is not on the step lattice");
    steps.push_back(k);
    k_last = std::max(k_last, k);
  }

  Eigen::VectorXd prev(N), cur(N), next(N), lap(N);
  for (int i = 0; i < N; ++i)
    cur(i) = phi(out.nodes(i));
  auto apply = [&](const Eigen::VectorXd &p) {
    for (int i = 0; i < N; ++i)
    {
      const double left = i > 0 ? (p(i) - p(i - 1)) * inv_face[i] : 0.0;
      const double right = (i + 1 < N ? p(i + 1) - p(i) : -2.0 * p(i)) * inv_face[i + 1];
      lap(i) = zc[i] * (right - left);
    }
  };

  out.times = times;
  out.states.assign(times.size(), Eigen::VectorXd());
  auto record = [&](int k, const Eigen::VectorXd &p) {
    for (std::size_t q = 0; q < steps.size(); ++q)
      if (steps[q] == k)
        out.states[q] = p;
  };
  record(0, cur);
  if (k_last == 0)
    return out;
  apply(cur);
  prev = cur;
  cur = prev + 0.5 * r * lap;
  record(1, cur);
  for (int k = 1; k < k_last; ++k)
  {
    apply(cur);
    next = 2.0 * cur - prev + r * lap;
    prev.swap(cur);
    cur.swap(next);
    record(k + 1, cur);
  }
  return out;
}

SpanResidual span_residual(const LayeredMedium &medium, double tau, int n, int j,
                           const SpanOptions &opts)
{
  medium.validate();
  require(tau > 0.0, "span residual: tau must be positive");
  require(j >= 0 && j < n, "span residual: need 0 <= j < n");
  const CompactPulse pulse = opts.pulse;
  const Profile phi = [&pulse](double T) { return pulse.phi(T); };
  const double dT = opts.dT > 0.0 ? opts.dT : pulse.t_f / 64.0;

  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  if (medium.layers() <= 0)
  {
    // Closed forms; the soft end must stay outside the window.
    require(medium.total >= j * tau + pulse.t_f,
            "span residual: total travel time too short for the window");
    const int N = static_cast<int>(std::ceil(medium.total / dT));
    A.resize(N, j + 1);
    b.resize(N);
    const int q_max = medium.layers() == 0 ? series_terms(medium, j * tau, pulse.t_f) : 0;
    for (int i = 0; i < N; ++i)
    {
      const double T = (i + 0.5) * dT;
      for (int l = 0; l <= j; ++l)
        A(i, l) = dalembert(phi, l * tau, T);
      b(i) = medium.layers() == 0 ? single_layer_series(medium, phi, j * tau, T, q_max)
                                  : A(i, j);
    }
  }
  else
  {
    std::vector<double> times;
    for (int l = 0; l <= j; ++l)
      times.push_back(l * tau);
    const auto ref = solve_layered(LayeredMedium::homogeneous(medium.zeta[0], medium.total), phi,
                                   dT, tau, times, opts.cfl);
    const auto tru = solve_layered(medium, phi, dT, tau, {j * tau}, opts.cfl);
    A.resize(ref.nodes.size(), j + 1);
    for (int l = 0; l <= j; ++l)
      A.col(l) = ref.states[l];
    b = tru.states[0];
  }

  const double bn = b.norm();
  require(bn > 0.0, "span residual: snapshot vanishes");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-12);
  SpanResidual out;
  out.rank = static_cast<int>(qr.rank());
  out.flagged = out.rank < j + 1;
  const Eigen::VectorXd x = qr.solve(b);
  out.residual = (b - A * x).norm() / bn;
  return out;
}

double WaveguideModes::psi(int j, double x) const
{
  return std::sqrt(2.0 / D) * std::sin(std::numbers::pi * j * x / D);
}

WaveguideModes mode_table(double D, double omega_c, double c_bar)
{
  require(D > 0.0 && omega_c > 0.0 && c_bar > 0.0,
          "modes: width, frequency and speed must be positive");
  WaveguideModes w;
  w.D = D;
  w.omega_c = omega_c;
  w.c_bar = c_bar;
  w.k_c = omega_c / c_bar;
  const int N = static_cast<int>(std::floor(w.k_c * D / std::numbers::pi));
  for (int j = 1; j <= N; ++j)
  {
    const double a = std::numbers::pi * j / D;
    const double b2 = w.k_c * w.k_c - a * a;
    if (b2 <= 0.0) // exactly at cutoff
      break;
    w.alpha.push_back(a);
    w.beta.push_back(std::sqrt(b2));
    w.group_speed.push_back(c_bar * w.beta.back() / w.k_c);
  }
  w.N = static_cast<int>(w.beta.size());
  if (w.N == 0)
    throw ConfigError("modes: waveguide is below cutoff, no propagating mode");
  return w;
}

ModeArrival measure_mode_arrival(const WaveguideModes &modes, int j, double range, double h,
                                 const Pulse &pulse)
{
  require(j >= 1 && j <= modes.N, "mode arrival: mode index out of range");
  require(range > 0.0 && h > 0.0, "mode arrival: range and h must be positive");
  ModeArrival out;
  out.j = j;
  out.pulse_width = 2.0 / pulse.bandwidth();
  const double cg = modes.group_speed[j - 1];

  // Deep enough that the bottom echo returns after the pulse has passed.
  const int nx = static_cast<int>(std::lround(modes.D / h)) - 1;
  const double depth = range + 2.0 * pulse.t_f() * modes.c_bar + 2.0;
  const int nz = static_cast<int>(std::lround(depth / h - 0.5));
  require(nx >= 2, "mode arrival: waveguide narrower than the mesh");
  Medium medium(nx, nz, h, modes.c_bar);
  const int row = static_cast<int>(std::lround(range / h));
  require(row < nz, "mode arrival: range outside the domain");
  out.range = row * h;
  out.predicted = out.range / cg;

  const double dt = 0.5 * h / modes.c_bar;
  const DiscretePulse dp(pulse, dt);
  const int k_first = -(dp.full_steps() + 1);
  std::vector<PointSource> sources(nx);
  std::vector<double> weight(nx);
  for (int i = 0; i < nx; ++i)
  {
    weight[i] = modes.psi(j, medium.position(i, 0).x);
    sources[i].node = medium.index(i, 0);
    sources[i].k_first = k_first;
    for (int k = k_first; k <= -k_first; ++k)
      sources[i].amplitude.push_back(weight[i] * dp.full_source(k));
  }
  const int k_last = static_cast<int>(std::ceil((out.predicted + 2.0 * pulse.t_f()) / dt));
  std::vector<double> a;
  LeapfrogSolver solver(medium, dt);
  solver.run(sources, k_first, k_last, [&](int, std::span<const double> w) {
    double s = 0.0;
    for (int i = 0; i < nx; ++i)
      s += weight[i] * w[medium.index(i, row)];
    a.push_back(h * s);
  });

  int best = 1;
  double best_env = -1.0;
  std::vector<double> env(a.size(), 0.0);
  for (std::size_t k = 1; k + 1 < a.size(); ++k)
  {
    const double da = (a[k + 1] - a[k - 1]) / (2.0 * dt * pulse.omega_c());
    env[k] = std::sqrt(a[k] * a[k] + da * da);
    if (env[k] > best_env)
    {
      best_env = env[k];
      best = static_cast<int>(k);
    }
  }
  double shift = 0.0;
  if (best > 1 && best + 2 < static_cast<int>(env.size()))
  {
    const double l = env[best - 1], c = env[best], r = env[best + 1];
    const double den = l - 2.0 * c + r;
    if (den < 0.0)
      shift = 0.5 * (l - r) / den;
  }
  out.measured = (k_first + best + shift) * dt;
  return out;
}

Eigen::MatrixXd mode_coupling(double D, double a, double b, int N)
{
  require(D > 0.0 && N >= 1, "mode coupling: need D > 0 and N >= 1");
  require(0.0 <= a && a <= b && b <= D, "mode coupling: aperture must lie in [0, D]");
  // int_a^b cos(k x) dx
  auto icos = [a, b](double k) {
    return k == 0.0 ? b - a : (std::sin(k * b) - std::sin(k * a)) / k;
  };
  Eigen::MatrixXd Q(N, N);
  for (int j = 1; j <= N; ++j)
    for (int l = j; l <= N; ++l)
    {
      const double d = std::numbers::pi * (j - l) / D;
      const double s = std::numbers::pi * (j + l) / D;
      Q(j - 1, l - 1) = Q(l - 1, j - 1) = (icos(d) - icos(s)) / D;
    }
  return Q;
}

} // namespace romimg
