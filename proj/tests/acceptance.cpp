// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Waveguide runs use a lambda/8 mesh.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "romimg/imaging.hpp"
#include "romimg/internal.hpp"
#include "romimg/oracle.hpp"
#include "romimg/rom.hpp"
#include "romimg/scenario.hpp"
#include "romimg/verify.hpp"

using namespace romimg;

namespace
{

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char *f, double a)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Verdict
{
  bool pass = false;
  std::string detail;
};

// Two horizontal reflectors 1.5 lambda apart in range, each on a node row.
constexpr double z_top = 4.0625;
constexpr double z_bottom = 5.5625;
const Point psf_point{16.0, 4.8125};

ScenarioSpec waveguide_spec(int m, double aperture, double tau_factor)
{
  ScenarioSpec s;
  s.name = "acceptance-waveguide";
  s.width = 32.0;
  s.depth = 10.0;
  s.h = 0.125;
  s.m = m;
  s.aperture = aperture;
  s.tau_factor = tau_factor;
  s.reflectors = {{{8.0, z_top}, {24.0, z_top}, 0.125, 0.5},
                  {{10.0, z_bottom}, {22.0, z_bottom}, 0.125, 0.5}};
  s.image_x0 = 1.0;
  s.image_x1 = 31.0;
  s.image_z0 = 0.5;
  s.image_z1 = 9.5;
  return s;
}

struct Run
{
  Scenario sc;
  ImagingGrid grid;
  DataTensor D, D_ref;
  double lambda_min = 0.0;
  BlockMatrix R, R_ref;
  SnapshotBasis basis_ref;
  SnapshotBasis basis_true; // only when requested
};

Run make_run(const ScenarioSpec &spec, bool want_true, double noise = 0.0, std::uint64_t seed = 1)
{
  Run r;
  r.sc = build_scenario(spec);
  r.grid = r.sc.imaging_grid();
  const Scenario &sc = r.sc;
  auto shots = simulate_shots(sc.medium, sc.array, sc.pulse, sc.tau, sc.n);
  if (noise > 0.0)
    add_noise(shots, noise, seed);
  r.D = compute_data_tensor(shots);
  if (noise > 0.0)
    r.D.symmetrize();
  const Medium ref = sc.medium.reference();
  r.D_ref = compute_data_tensor(simulate_shots(ref, sc.array, sc.pulse, sc.tau, sc.n));
  const BlockMatrix M = assemble_mass(r.D);
  r.lambda_min = default_lambda_min(M, noise > 0.0);
  r.R = block_cholesky(regularize_mass(M, r.lambda_min));
  r.R_ref = block_cholesky(regularize_mass(assemble_mass(r.D_ref), r.lambda_min));
  r.basis_ref = orthonormalize(simulate_snapshots(ref, sc.array, sc.pulse, sc.tau, sc.n, r.grid), r.R_ref);
  if (want_true)
    r.basis_true =
      orthonormalize(simulate_snapshots(sc.medium, sc.array, sc.pulse, sc.tau, sc.n, r.grid), r.R);
  return r;
}

double psf_ratio(const Run &r)
{
  return peak_to_sidelobe(r.grid, rom_psf(r.basis_true, r.basis_ref, psf_point), psf_point, 0.5, 1.0);
}

// Max over the central cross-range band x in [12, 20] of |img| per range row.
std::vector<std::pair<double, double>> range_profile(const Image &img)
{
  std::vector<std::pair<double, double>> out;
  const auto &g = img.grid;
  for (int b = 0; b < g.count_z(); ++b)
  {
    double best = 0.0;
    for (int a = 0; a < g.count_x(); ++a)
    {
      const double x = g.position(g.pixel(a, b)).x;
      if (x >= 12.0 && x <= 20.0)
        best = std::max(best, std::abs(img.at(a, b)));
    }
    out.emplace_back(g.position(g.pixel(0, b)).z, best);
  }
  return out;
}

// Strict local maxima at depth >= z_min with value >= floor * max over that depth range.
std::vector<std::pair<double, double>> local_maxima(const std::vector<std::pair<double, double>> &p,
                                                    double z_min, double floor)
{
  double top = 0.0;
  for (const auto &[z, v] : p)
    if (z >= z_min)
      top = std::max(top, v);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 1; i + 1 < p.size(); ++i)
    if (p[i].first >= z_min && p[i].second > p[i - 1].second && p[i].second >= p[i + 1].second &&
        p[i].second >= floor * top)
      out.emplace_back(p[i].first, p[i].second / top);
  return out;
}

double value_at(const std::vector<std::pair<double, double>> &p, double z)
{
  for (const auto &[zz, v] : p)
    if (std::abs(zz - z) < 1e-9)
      return v;
  return 0.0;
}

// ---------------------------------------------------------------------------------------------

Verdict c1_internal_wave()
{
  const auto t0 = std::chrono::steady_clock::now();
  const CheckResult c = check_internal_wave_identity();
  const double t = seconds_since(t0);
  return {c.pass && t < 60.0, "max rel err " + fmt("%.2e", c.value) + " < 1e-10 over " + c.detail +
                                ", " + fmt("%.1f", t) + " s"};
}

Verdict c2_quadrature()
{
  const auto t0 = std::chrono::steady_clock::now();
  const auto cs = check_mass_stiffness();
  const double t = seconds_since(t0);
  return {cs[0].pass && cs[1].pass && t < 60.0,
          "M " + fmt("%.2e", cs[0].value) + ", S " + fmt("%.2e", cs[1].value) + " < 1e-10, " +
            fmt("%.1f", t) + " s"};
}

Verdict c3_reference_null()
{
  ScenarioSpec s;
  s.name = "null";
  s.width = 8.0;
  s.depth = 4.0;
  s.h = 0.125;
  s.m = 9;
  s.aperture = 6.0;
  s.image_z0 = 0.5;
  Run r = make_run(s, true);
  const BlockMatrix P = rom_propagator(r.R, assemble_stiffness(r.D));
  const BlockMatrix P_ref = rom_propagator(r.R_ref, assemble_stiffness(r.D_ref));
  const double pnorm = Eigen::JacobiSVD<Eigen::MatrixXd>(P_ref.data).singularValues()(0);
  const double bp = image_backprojection(P, P_ref, r.basis_ref).max_abs() / pnorm;

  // Internal wave against the reference snapshots at grid pixels.
  const SnapshotFields U = simulate_snapshots(r.sc.medium.reference(), r.sc.array, r.sc.pulse,
                                              r.sc.tau, r.sc.n, r.grid);
  double iw = 0.0;
  for (std::size_t p = 0; p < r.grid.size(); p += 37)
  {
    const Eigen::MatrixXd g = internal_wave(r.R, r.basis_ref, r.grid.position(p));
    Eigen::MatrixXd u(r.sc.n, r.sc.array.m());
    for (int j = 0; j < r.sc.n; ++j)
      u.row(j) = U.U.row(static_cast<Eigen::Index>(p)).segment(j * u.cols(), u.cols());
    iw = std::max(iw, (g - u).cwiseAbs().maxCoeff() / std::max(u.cwiseAbs().maxCoeff(), 1e-300));
  }
  const Image I = image_norm(r.R, r.basis_ref);
  const Image Iid = image_ideal(r.basis_true, r.R);
  const double ideal = (I.values - Iid.values).cwiseAbs().maxCoeff() / Iid.max_abs();
  return {bp < 1e-8 && iw < 1e-8 && ideal < 1e-8,
          "BP/|P_o| " + fmt("%.1e", bp) + ", internal wave " + fmt("%.1e", iw) + ", I vs ideal " +
            fmt("%.1e", ideal) + " (all < 1e-8)"};
}

Verdict c4_cholesky()
{
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 8);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  bool pattern = true;
  for (int t = 0; t < 100; ++t)
  {
    const int n = dim(rng), m = dim(rng);
    Eigen::MatrixXd B(n * m, n * m);
    for (Eigen::Index i = 0; i < B.size(); ++i)
      B.data()[i] = gauss(rng);
    BlockMatrix M(n, m, Structure::SPD);
    M.data = B * B.transpose() + 0.1 * Eigen::MatrixXd::Identity(n * m, n * m);
    const BlockMatrix R = block_cholesky(M);
    worst = std::max(worst, (R.data.transpose() * R.data - M.data).norm() / M.data.norm());
    pattern = pattern && R.is_block_upper_triangular();
  }
  return {worst < 1e-12 && pattern, "max |R^T R - M|/|M| " + fmt("%.1e", worst) +
                                      " < 1e-12, zero pattern " + (pattern ? "exact" : "broken")};
}

// Criteria 5, 6 (full aperture) and 9 share this run.
struct WaveguideResults
{
  Verdict c5, c9;
  double psr_full = 0.0;
};

WaveguideResults waveguide_block()
{
  const auto t0 = std::chrono::steady_clock::now();
  WaveguideResults out;
  Run r = make_run(waveguide_spec(49, 30.0, 0.4), true);
  out.psr_full = psf_ratio(r);

  const Image I = image_norm(r.R, r.basis_ref);
  const Image dI = range_derivative(I, 0.05);
  const Image rtm = image_rtm(r.D, r.D_ref, r.sc.medium, r.sc.array, r.sc.pulse, r.grid);
  const auto pI = range_profile(I);
  const auto pdI = range_profile(dI);
  const auto prtm = range_profile(rtm);
  const double Imax = I.max_abs();

  // Two distinct local maxima of |dI/dz|, one within lambda of each reflector, below the
  // near-array zone.
  const auto peaks = local_maxima(pdI, 2.0, 0.1);
  int hit_top = -1, hit_bottom = -1;
  for (std::size_t i = 0; i < peaks.size(); ++i)
  {
    if (std::abs(peaks[i].first - z_top) <= 1.0 &&
        (hit_top < 0 || peaks[i].second > peaks[hit_top].second))
      hit_top = static_cast<int>(i);
  }
  for (std::size_t i = 0; i < peaks.size(); ++i)
    if (static_cast<int>(i) != hit_top && std::abs(peaks[i].first - z_bottom) <= 1.0 &&
        peaks[i].first > (hit_top >= 0 ? peaks[hit_top].first : 0.0) &&
        (hit_bottom < 0 || peaks[i].second > peaks[hit_bottom].second))
      hit_bottom = static_cast<int>(i);
  const bool two = hit_top >= 0 && hit_bottom >= 0;

  // Ghost: RTM local max >= 0.2 more than lambda from both reflectors where I <= 0.2 max I.
  double ghost_z = -1.0, ghost_v = 0.0, ghost_I = 0.0;
  for (const auto &[z, v] : local_maxima(prtm, 2.0, 0.2))
    if (std::abs(z - z_top) > 1.0 && std::abs(z - z_bottom) > 1.0)
    {
      const double iz = value_at(pI, z) / Imax;
      if (iz <= 0.2 && v > ghost_v)
      {
        ghost_z = z;
        ghost_v = v;
        ghost_I = iz;
      }
    }
  const bool ghost = ghost_z > 0.0;

  std::string d = "dI/dz maxima at z = ";
  d += two ? fmt("%.2f", peaks[hit_top].first) + " and " + fmt("%.2f", peaks[hit_bottom].first)
           : std::string("(missing)");
  d += " for reflectors at 4.06, 5.56; RTM ghost ";
  d += ghost ? "at z = " + fmt("%.2f", ghost_z) + " (|RTM| " + fmt("%.2f", ghost_v) + ", I/Imax " +
                 fmt("%.2f", ghost_I) + ")"
             : std::string("not found");

  // Pixel scan at a point of the unobstructed top reflector.
  const Point y{16.0, z_top};
  const PixelScanResult ps = pixel_scan_point(r.R, r.basis_ref, r.sc.medium, r.sc.array, y, &r.grid);
  Eigen::Index arg = 0;
  ps.focus.cwiseAbs().maxCoeff(&arg);
  const double miss = distance(r.grid.position(static_cast<std::size_t>(arg)), y);
  const double sup = pixel_scan_superposition_error(ps, r.sc.medium, r.sc.array);
  const double t = seconds_since(t0);
  out.c5 = {two && ghost && t < 1800.0, d + ", " + fmt("%.0f", t) + " s"};
  out.c9 = {miss <= 1.0 && sup < 0.02,
            "focus max " + fmt("%.2f", miss) + " from y (<= 1), superposition error " +
              fmt("%.1e", sup) + " (< 2e-2)"};
  return out;
}

Verdict c6_aperture(double psr_full)
{
  const double p40 = psf_ratio(make_run(waveguide_spec(20, 11.875, 0.4), true));
  const double p60 = psf_ratio(make_run(waveguide_spec(30, 18.125, 0.4), true));
  return {p40 < p60 && p60 < psr_full, "PSR " + fmt("%.3f", p40) + ", " + fmt("%.3f", p60) +
                                         ", " + fmt("%.3f", psr_full) +
                                         " for apertures 11.9, 18.1, 30"};
}

Verdict c7_tau(double psr_full)
{
  const double p3 = psf_ratio(make_run(waveguide_spec(49, 30.0, 1.2), true));
  return {p3 < psr_full, "PSR at 3 tau_ref " + fmt("%.3f", p3) + " vs " + fmt("%.3f", psr_full) + " at tau_ref"};
}

Verdict c8_noise()
{
  Run r = make_run(waveguide_spec(49, 30.0, 0.67), false, 0.2, 12345);
  // Compared as displayed: range derivative of I against the backprojection image.
  const Image dI = range_derivative(image_norm(r.R, r.basis_ref), 0.05);
  const BlockMatrix P = rom_propagator(r.R, assemble_stiffness(r.D));
  const BlockMatrix P_ref = rom_propagator(r.R_ref, assemble_stiffness(r.D_ref));
  const Image bp = image_backprojection(P, P_ref, r.basis_ref);

  // Peak near the top reflector against the largest value away from both reflectors.
  auto score = [](const Image &img, double &argz) {
    const auto p = range_profile(img);
    double peak = 0.0, spurious = 0.0, best = 0.0;
    for (const auto &[z, v] : p)
    {
      if (z < 2.0)
        continue;
      if (v > best)
      {
        best = v;
        argz = z;
      }
      if (std::abs(z - z_top) <= 1.0)
        peak = std::max(peak, v);
      else if (std::abs(z - z_bottom) > 1.0)
        spurious = std::max(spurious, v);
    }
    return peak / spurious;
  };
  double zI = 0.0, zB = 0.0;
  const double qI = score(dI, zI);
  const double qB = score(bp, zB);
  const bool localized = std::abs(zI - z_top) <= 1.0;
  return {localized && qB < qI, "dI/dz max at z = " + fmt("%.2f", zI) + ", peak/spurious dI/dz " +
                                  fmt("%.2f", qI) + " vs BP " + fmt("%.2f", qB) +
                                  " (BP max at z = " + fmt("%.2f", zB) + ")"};
}

Verdict from_checks(const std::vector<CheckResult> &cs)
{
  Verdict v{true, ""};
  for (const auto &c : cs)
  {
    v.pass = v.pass && c.pass;
    if (!v.detail.empty())
      v.detail += "; ";
    v.detail += c.name + " " + fmt("%.2e", c.value);
  }
  return v;
}

} // namespace

// Arguments: criterion numbers to run (default all), and --known-red=K for criteria recorded
// as unattainable. A known-red criterion still prints FAIL but does not set the exit status;
// if it starts passing the run fails so the record gets updated.
int main(int argc, char **argv)
{
  std::vector<int> only, known_red;
  for (int a = 1; a < argc; ++a)
  {
    const std::string arg = argv[a];
    if (arg.rfind("--known-red=", 0) == 0)
      known_red.push_back(std::atoi(arg.c_str() + 12));
    else
      only.push_back(std::atoi(arg.c_str()));
  }
  auto listed = [](const std::vector<int> &v, int k) { return std::find(v.begin(), v.end(), k) != v.end(); };
  auto wanted = [&](int k) { return only.empty() || listed(only, k); };
  int failed = 0;
  int passed = 0;
  int ran = 0;
  int unexpected = 0;
  auto report = [&](int k, const char *name, const Verdict &v) {
    ++ran;
    const bool red = listed(known_red, k);
    std::printf("%s [%2d] %s: %s%s\n", v.pass ? "PASS" : "FAIL", k, name, v.detail.c_str(),
                red ? (v.pass ? " (listed as known red)" : " (known red)") : "");
    std::fflush(stdout);
    passed += v.pass ? 1 : 0;
    failed += v.pass || red ? 0 : 1;
    unexpected += v.pass && red ? 1 : 0;
  };
  auto guarded = [](const std::function<Verdict()> &fn) {
    try
    {
      return fn();
    }
    catch (const std::exception &e)
    {
      return Verdict{false, std::string("exception: ") + e.what()};
    }
  };

  auto run = [&](int k, const char *name, const std::function<Verdict()> &fn) {
    if (wanted(k))
      report(k, name, guarded(fn));
  };

  run(1, "Internal wave exactness", c1_internal_wave);
  run(2, "Mass/stiffness quadrature equivalence", c2_quadrature);
  run(3, "Reference-medium null tests", c3_reference_null);
  run(4, "Block Cholesky", c4_cholesky);

  WaveguideResults wg;
  if (wanted(5) || wanted(6) || wanted(7) || wanted(9))
  {
    try
    {
      wg = waveguide_block();
    }
    catch (const std::exception &e)
    {
      wg.c5 = wg.c9 = {false, std::string("exception: ") + e.what()};
    }
  }
  run(5, "Waveguide reflectors and RTM ghost", [&] { return wg.c5; });
  run(6, "PSF aperture monotonicity", [&] { return c6_aperture(wg.psr_full); });
  run(7, "PSF degradation at 3 tau_ref", [&] { return c7_tau(wg.psr_full); });
  run(8, "Noise robustness against backprojection", c8_noise);
  run(9, "Pixel-scan focusing", [&] { return wg.c9; });
  run(10, "Layered-medium validation", [] { return from_checks(check_layered()); });
  run(11, "Waveguide mode utilities", [] { return from_checks(check_modes()); });
  std::printf("%d/%d criteria passed\n", passed, ran);
  return failed == 0 && unexpected == 0 ? 0 : 1;
}
