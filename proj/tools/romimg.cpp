// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: simulate, build-rom, basis, internal-wave, image, postprocess,
// validate, verify, run, sweep. Exit codes: 0 success, 2 configuration error,
// 3 numerical failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "romimg/error.hpp"
#include "romimg/internal.hpp"
#include "romimg/io.hpp"
#include "romimg/layered1d.hpp"
#include "romimg/parallel.hpp"
#include "romimg/pipeline.hpp"
#include "romimg/verify.hpp"

namespace fs = std::filesystem;
using namespace romimg;

namespace
{

void log_line(const std::string &msg) { std::cerr << "[romimg] " << msg << '\n'; }

std::vector<double> parse_list(const std::string &text)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    try
    {
      out.push_back(std::stod(item));
    }
    catch (const std::exception &)
    {
      throw ConfigError("cannot parse number '" + item + "'");
    }
  }
  return out;
}

Point parse_point(const std::string &text)
{
  const auto v = parse_list(text);
  require(v.size() == 2, "expected a point as x,z");
  return {v[0], v[1]};
}

// Scenario flag: a JSON config file, or a preset name.
struct ScenarioFlags
{
  std::string scenario = "waveguide";
  std::string config;
  int m = 0;
  double aperture = 0.0;
  double tau_factor = 0.0;
  int n = 0;
  double h = 0.0;
  double noise = -1.0;
  long long seed = -1;
  std::string methods;

  void add(CLI::App *app)
  {
    app->add_option("--scenario", scenario, "preset name (waveguide, halfspace, homogeneous) or config file");
    app->add_option("--config", config, "experiment config (JSON)");
    app->add_option("--m", m, "number of sensors");
    app->add_option("--aperture", aperture, "array aperture in wavelengths");
    app->add_option("--tau-factor", tau_factor, "tau in units of pi / omega_c");
    app->add_option("--n", n, "number of snapshots (0: automatic)");
    app->add_option("--grid-step", h, "grid step in wavelengths");
    app->add_option("--noise", noise, "noise fraction of the max trace amplitude");
    app->add_option("--seed", seed, "noise seed");
    app->add_option("--methods", methods, "comma separated subset of norm,ideal,bp,rtm,ps");
  }

  ExperimentConfig build() const
  {
    ExperimentConfig cfg;
    if (!config.empty())
      cfg = load_config(config);
    else if (fs::exists(scenario) && fs::is_regular_file(scenario))
      cfg = load_config(scenario);
    else
      cfg.scenario = preset_spec(scenario);
    if (m > 0)
      cfg.scenario.m = m;
    if (aperture > 0.0)
      cfg.scenario.aperture = aperture;
    if (tau_factor > 0.0)
      cfg.scenario.tau_factor = tau_factor;
    if (n > 0)
      cfg.scenario.n = n;
    if (h > 0.0)
      cfg.scenario.h = h;
    if (noise >= 0.0)
      cfg.noise_fraction = noise;
    if (seed >= 0)
      cfg.seed = static_cast<std::uint64_t>(seed);
    if (!methods.empty())
    {
      cfg.methods.clear();
      std::stringstream ss(methods);
      std::string item;
      while (std::getline(ss, item, ','))
        cfg.methods.push_back(item);
    }
    // Round-trip through JSON to apply the config validation.
    return ExperimentConfig::from_json(cfg.to_json());
  }
};

void print_checks(const std::vector<CheckResult> &checks)
{
  int failed = 0;
  for (const auto &c : checks)
  {
    std::cout << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(44) << c.name << ' '
              << std::scientific << std::setprecision(3) << c.value << "  (threshold "
              << c.threshold << ")";
    if (!c.detail.empty())
      std::cout << "  " << c.detail;
    std::cout << '\n';
    failed += c.pass ? 0 : 1;
  }
  std::cout << std::defaultfloat << checks.size() - failed << '/' << checks.size()
            << " checks passed\n";
}

void validate_a1()
{
  SpanOptions opts;
  opts.pulse = CompactPulse{2.0 * std::numbers::pi, 1.0};
  const double tf = opts.pulse.t_f;
  std::cout << "case,tau,T0,two_T0_over_tau,j,residual,rank,flagged\n" << std::setprecision(10);
  auto row = [&](const std::string &name, const LayeredMedium &med, double tau, int n, int j) {
    const SpanResidual r = span_residual(med, tau, n, j, opts);
    std::cout << name << ',' << tau << ',' << med.interfaces[0] << ','
              << 2.0 * med.interfaces[0] / tau << ',' << j << ',' << r.residual << ',' << r.rank
              << ',' << r.flagged << '\n';
  };
  const double tau = 2.0 * tf;
  const auto goup = LayeredMedium::single(1.0, 3.0, 5.5 * tau, 60.0);
  const auto half = LayeredMedium::single(1.0, 3.0, 5.25 * tau, 60.0);
  for (int j = 0; j < 25; ++j)
    row("goupillaud", goup, tau, 25, j);
  for (int j = 0; j < 25; ++j)
    row("half-integer", half, tau, 25, j);
  // tau sweep at fixed 2 T0 mod tau = t_f / 16, observed at t = 16 t_f.
  for (double t : {tf / 2.0, tf / 4.0, tf / 8.0})
  {
    const auto med = LayeredMedium::single(1.0, 3.0, 0.5 * (12.0 * tf + tf / 16.0), 60.0);
    const int j = static_cast<int>(std::lround(16.0 * tf / t));
    row("tau-sweep", med, t, j + 1, j);
  }
  const auto two = LayeredMedium{{1.0, 3.0, 1.5}, {5.5 * tau, 7.5 * tau}, 60.0};
  row("two-layer-goupillaud", two, tau, 25, 12);
}

void validate_a2()
{
  const WaveguideModes modes = mode_table(3.3, 2.0 * std::numbers::pi, 1.0);
  std::cout << "j,alpha,beta,group_speed\n" << std::setprecision(10);
  for (int j = 1; j <= modes.N; ++j)
    std::cout << j << ',' << modes.alpha[j - 1] << ',' << modes.beta[j - 1] << ','
              << modes.group_speed[j - 1] << '\n';
  std::cout << "\naperture_fraction,min_singular_value_Q\n";
  for (double f = 0.1; f <= 1.0 + 1e-12; f += 0.1)
  {
    const Eigen::MatrixXd Q = mode_coupling(modes.D, 0.0, f * modes.D, modes.N);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Q);
    std::cout << f << ',' << svd.singularValues().minCoeff() << '\n';
  }
  std::cout << "\nj,range,predicted_arrival,measured_arrival,pulse_width\n";
  for (int j : {1, 2})
  {
    const ModeArrival a = measure_mode_arrival(modes, j, 8.0, 1.0 / 16.0, Pulse());
    std::cout << j << ',' << a.range << ',' << a.predicted << ',' << a.measured << ','
              << a.pulse_width << '\n';
  }
}

void write_internal_wave(const fs::path &rom_dir, const fs::path &basis_dir, const Point &y,
                         const fs::path &out)
{
  const Artifact rom_a = read_artifact(rom_dir / "rom.bin");
  const ExperimentConfig cfg = config_of(rom_a);
  const Scenario sc = cfg.build();
  const RomFactors rom = rom_from(rom_a);
  const SnapshotBasis basis = basis_from(read_artifact(basis_dir / "basis_ref.bin"), sc.medium);
  Artifact a;
  a.header = cfg.meta();
  a.header["kind"] = "internal_wave";
  a.header["y"] = {y.x, y.z};
  a.header["tau"] = basis.tau;
  a.arrays.push_back(to_named("g", internal_wave(rom.R, basis, y)));
  write_artifact(out, a);
}

void run_sweep(const ExperimentConfig &base, const std::string &param,
               const std::vector<double> &values, const std::string &psf, const fs::path &out)
{
  require(param == "aperture" || param == "tau", "sweep: --param must be aperture or tau");
  require(!values.empty(), "sweep: no values");
  nlohmann::json index = {{"param", param}, {"runs", nlohmann::json::array()}};
  fs::create_directories(out);
  std::ofstream csv(out / "sweep.csv", std::ios::trunc);
  csv << param << ",directory,config_hash" << (psf.empty() ? "" : ",psf_peak_to_sidelobe") << '\n';
  for (double v : values)
  {
    require(v > 0.0, "sweep: values must be positive");
    ExperimentConfig cfg = base;
    if (param == "aperture")
    {
      // Fraction of the configured aperture at constant sensor spacing.
      cfg.scenario.aperture = base.scenario.aperture * v;
      cfg.scenario.m = static_cast<int>(std::lround((base.scenario.m - 1) * v)) + 1;
    }
    else
      cfg.scenario.tau_factor = base.scenario.tau_factor * v;
    std::ostringstream name;
    name << param << '_' << v;
    const fs::path dir = out / name.str();
    log_line("sweep: " + name.str());
    run_pipeline(cfg, dir, log_line);
    nlohmann::json entry = {{"value", v}, {"directory", name.str()}, {"config_hash", cfg.hash()}};
    csv << v << ',' << name.str() << ',' << cfg.hash();
    if (!psf.empty())
    {
      const Point y = parse_point(psf);
      if (!fs::exists(dir / "basis_true.bin"))
        stage_basis(dir, true, dir, log_line);
      const Scenario sc = cfg.build();
      const SnapshotBasis bt = basis_from(read_artifact(dir / "basis_true.bin"), sc.medium);
      const SnapshotBasis bo = basis_from(read_artifact(dir / "basis_ref.bin"), sc.medium);
      const double psr = peak_to_sidelobe(bt.grid, rom_psf(bt, bo, y), y, 0.5, 1.0);
      entry["psf_peak_to_sidelobe"] = psr;
      csv << ',' << psr;
    }
    csv << '\n';
    index["runs"].push_back(entry);
  }
  std::ofstream f(out / "sweep.json", std::ios::trunc);
  f << index.dump(2) << '\n';
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"ROM-based imaging of reflectors with a sensor array"};
  app.require_subcommand(1);

  ScenarioFlags sim_flags;
  std::string out;
  auto *sim = app.add_subcommand("simulate", "simulate true and reference data tensors");
  sim_flags.add(sim);
  sim->add_option("--out", out, "output directory")->required();

  std::string data_dir;
  double lambda_min = 0.0;
  auto *rom = app.add_subcommand("build-rom", "mass, stiffness, Cholesky factor and propagator");
  rom->add_option("--data", data_dir, "directory with data.bin and data_ref.bin")->required();
  rom->add_option("--lambda-min", lambda_min, "eigenvalue floor (0: default)");
  rom->add_option("--out", out, "output directory")->required();

  std::string rom_dir;
  bool with_true = false;
  auto *basis = app.add_subcommand("basis", "orthonormal reference snapshots V_o");
  basis->add_option("--rom", rom_dir, "directory with rom_ref.bin")->required();
  basis->add_flag("--true-basis", with_true, "also build the true-medium basis (ideal image)");
  basis->add_option("--out", out, "output directory")->required();

  std::string basis_dir, y_text;
  auto *iw = app.add_subcommand("internal-wave", "internal wave V_o(y) R at the sensors");
  iw->add_option("--rom", rom_dir, "ROM directory")->required();
  iw->add_option("--basis", basis_dir, "basis directory")->required();
  iw->add_option("--y", y_text, "imaging point x,z")->required();
  iw->add_option("--out", out, "output file")->required();

  std::string method, scenario_check;
  auto *image = app.add_subcommand("image", "imaging function on the configured grid");
  image->add_option("--method", method, "norm, ideal, bp, rtm or ps")->required();
  image->add_option("--rom", rom_dir, "ROM directory")->required();
  image->add_option("--basis", basis_dir, "basis directory")->required();
  image->add_option("--scenario", scenario_check, "expected scenario name");
  image->add_option("--out", out, "output file")->required();

  std::string in_file;
  bool range_derivative = false;
  double sigma = 0.125;
  auto *post = app.add_subcommand("postprocess", "range derivative of an image");
  post->add_flag("--range-derivative", range_derivative, "smoothed range derivative")->required();
  post->add_option("--sigma", sigma, "Gaussian smoothing width in wavelengths");
  post->add_option("--in", in_file, "input image file")->required();
  post->add_option("--out", out, "output file")->required();

  std::string appendix;
  auto *val = app.add_subcommand("validate", "layered-medium (a1) or waveguide-mode (a2) residual tables as CSV");
  val->add_option("--appendix", appendix, "a1: layered medium, a2: waveguide modes")->required()->check(CLI::IsMember({"a1", "a2"}));

  bool oracle_only = false;
  auto *ver = app.add_subcommand("verify", "oracle equivalence suite");
  ver->add_flag("--oracle", oracle_only, "oracle identities only, no layered or mode checks");

  ScenarioFlags run_flags;
  auto *run = app.add_subcommand("run", "full pipeline with manifest");
  run_flags.add(run);
  run->add_option("--out", out, "output directory")->required();

  ScenarioFlags sweep_flags;
  std::string param, values, psf;
  auto *sweep = app.add_subcommand("sweep", "pipeline over aperture fractions or tau multiples");
  sweep_flags.add(sweep);
  sweep->add_option("--param", param, "aperture or tau")->required();
  sweep->add_option("--values", values, "comma separated multipliers")->required();
  sweep->add_option("--psf", psf, "also report the PSF peak-to-sidelobe ratio at x,z");
  sweep->add_option("--out", out, "output directory")->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError &e)
  {
    app.exit(e);
    return 2;
  }

  try
  {
    log_line("threads: " + std::to_string(thread_count()));
    if (*sim)
      stage_simulate(sim_flags.build(), out, log_line);
    else if (*rom)
      stage_build_rom(data_dir, lambda_min, out, log_line);
    else if (*basis)
      stage_basis(rom_dir, with_true, out, log_line);
    else if (*iw)
      write_internal_wave(rom_dir, basis_dir, parse_point(y_text), out);
    else if (*image)
    {
      if (!scenario_check.empty())
      {
        const auto cfg = config_of(read_artifact(fs::path(rom_dir) / "rom.bin"));
        require(cfg.scenario.name == scenario_check,
                "image: ROM was built for scenario '" + cfg.scenario.name + "'");
      }
      stage_image(method, rom_dir, basis_dir, out, log_line);
    }
    else if (*post)
      stage_postprocess(in_file, sigma, out);
    else if (*val)
      appendix == "a1" ? validate_a1() : validate_a2();
    else if (*ver)
    {
      std::vector<CheckResult> checks;
      checks.push_back(check_internal_wave_identity());
      for (auto &c : check_mass_stiffness())
        checks.push_back(c);
      checks.push_back(check_propagator_projection());
      if (!oracle_only)
      {
        for (auto &c : check_layered())
          checks.push_back(c);
        for (auto &c : check_modes())
          checks.push_back(c);
      }
      print_checks(checks);
    }
    else if (*run)
    {
      const auto manifest = run_pipeline(run_flags.build(), out, log_line);
      log_line("manifest: " + std::to_string(manifest.at("artifacts").size()) + " artifacts, config " +
               manifest.at("config_hash").get<std::string>());
    }
    else if (*sweep)
      run_sweep(sweep_flags.build(), param, parse_list(values), psf, out);
  }
  catch (const ConfigError &e)
  {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }
  catch (const NumericalError &e)
  {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
