// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include "romimg/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "romimg/error.hpp"
#include "romimg/imaging.hpp"
#include "romimg/internal.hpp"
#include "romimg/rom.hpp"
#include "romimg/solver.hpp"

namespace romimg
{

namespace fs = std::filesystem;

namespace
{

const std::vector<std::string> known_methods = {"norm", "ideal", "bp", "rtm", "ps"};

void say(const Log &log, const std::string &msg)
{
  if (log)
    log(msg);
}

std::string sci(double v)
{
  std::ostringstream ss;
  ss << std::scientific << std::setprecision(3) << v;
  return ss.str();
}

template <typename Fn>
void staged(const std::string &name, const fs::path &out, Fn &&fn)
{
  fs::create_directories(out);
  const fs::path marker = out / (name + ".partial");
  {
    std::ofstream f(marker, std::ios::trunc);
    f << name << '\n';
  }
  try
  {
    fn();
  }
  catch (const ConfigError &e)
  {
    throw ConfigError(name + ": " + e.what());
  }
  catch (const nlohmann::json::exception &e)
  {
    throw ConfigError(name + ": " + e.what());
  }
  catch (const NumericalError &e)
  {
    throw NumericalError(name + ": " + e.what());
  }
  catch (const std::exception &e)
  {
    throw std::runtime_error(name + ": " + e.what());
  }
  fs::remove(marker);
}

nlohmann::json tagged(const nlohmann::json &meta, const std::string &role)
{
  nlohmann::json h = meta;
  h["role"] = role;
  return h;
}

SimulationOptions sim_options(const ExperimentConfig &cfg)
{
  SimulationOptions o;
  o.cfl = cfg.cfl;
  return o;
}

Artifact read_in(const fs::path &dir, const std::string &file)
{
  const fs::path p = dir / file;
  require(fs::exists(p), "missing input " + p.string());
  return read_artifact(p);
}

void write_image(const Image &img, const ExperimentConfig &cfg, const fs::path &out_file)
{
  write_artifact(out_file, image_artifact(img, cfg.meta()));
  fs::path csv = out_file;
  csv.replace_extension(".csv");
  write_image_csv(csv, img);
}

} // namespace

nlohmann::json ExperimentConfig::to_json() const
{
  nlohmann::json pts = nlohmann::json::array();
  for (const auto &p : scan_points)
    pts.push_back({p.x, p.z});
  nlohmann::json sc;
  romimg::to_json(sc, scenario);
  return {{"scenario", sc},
          {"noise", {{"fraction", noise_fraction}, {"seed", seed}}},
          {"lambda_min", lambda_min},
          {"methods", methods},
          {"range_derivative_sigma", range_sigma},
          {"pixel_scan", {{"points", pts}, {"budget", scan_budget}}},
          {"cfl", cfl},
          {"save_traces", save_traces}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json &j)
{
  require(j.is_object(), "config: expected a JSON object");
  ExperimentConfig c;
  if (j.contains("scenario"))
  {
    const auto &s = j.at("scenario");
    if (s.is_string())
      c.scenario = preset_spec(s.get<std::string>());
    else
      s.get_to(c.scenario);
  }
  if (j.contains("noise"))
  {
    const auto &n = j.at("noise");
    c.noise_fraction = n.value("fraction", 0.0);
    c.seed = n.value("seed", std::uint64_t{1});
  }
  c.lambda_min = j.value("lambda_min", c.lambda_min);
  if (j.contains("methods"))
    c.methods = j.at("methods").get<std::vector<std::string>>();
  c.range_sigma = j.value("range_derivative_sigma", c.range_sigma);
  if (j.contains("pixel_scan"))
  {
    const auto &ps = j.at("pixel_scan");
    for (const auto &p : ps.value("points", nlohmann::json::array()))
    {
      const auto v = p.get<std::vector<double>>();
      require(v.size() == 2, "config: pixel-scan points need two coordinates");
      c.scan_points.push_back({v[0], v[1]});
    }
    c.scan_budget = ps.value("budget", c.scan_budget);
  }
  c.cfl = j.value("cfl", c.cfl);
  c.save_traces = j.value("save_traces", c.save_traces);

  require(c.noise_fraction >= 0.0, "config: noise fraction must be non-negative");
  require(c.lambda_min >= 0.0, "config: lambda_min must be non-negative");
  require(c.range_sigma >= 0.0, "config: range_derivative_sigma must be non-negative");
  require(c.cfl > 0.0 && c.cfl <= 0.7071067811865476, "config: cfl must lie in (0, 1/sqrt(2)]");
  for (const auto &m : c.methods)
    require(std::find(known_methods.begin(), known_methods.end(), m) != known_methods.end(),
            "config: unknown method '" + m + "' (norm, ideal, bp, rtm, ps)");
  return c;
}

nlohmann::json ExperimentConfig::meta() const
{
  return {{"config_hash", hash()}, {"config", to_json()}, {"omega_c", 2.0 * std::numbers::pi}};
}

ExperimentConfig load_config(const fs::path &path)
{
  std::ifstream f(path);
  require(static_cast<bool>(f), "config: cannot open " + path.string());
  try
  {
    return ExperimentConfig::from_json(nlohmann::json::parse(f));
  }
  catch (const nlohmann::json::exception &e)
  {
    throw ConfigError("config: " + std::string(e.what()));
  }
}

ExperimentConfig config_of(const Artifact &a)
{
  require(a.header.contains("config"), "artifact: header carries no config");
  return ExperimentConfig::from_json(a.header.at("config"));
}

void stage_simulate(const ExperimentConfig &cfg, const fs::path &out, const Log &log)
{
  staged("simulate", out, [&] {
    const Scenario sc = cfg.build();
    const auto opts = sim_options(cfg);
    say(log, "simulate: " + std::to_string(sc.array.m()) + " shots, n = " + std::to_string(sc.n) +
               ", " + std::to_string(sc.medium.nx()) + " x " + std::to_string(sc.medium.nz()) +
               " nodes");
    auto shots = simulate_shots(sc.medium, sc.array, sc.pulse, sc.tau, sc.n, opts);
    nlohmann::json meta = cfg.meta();
    if (cfg.noise_fraction > 0.0)
    {
      const NoiseReport r = add_noise(shots, cfg.noise_fraction, cfg.seed);
      meta["noise_sigma"] = r.sigma;
      say(log, "simulate: noise sigma " + sci(r.sigma));
    }
    DataTensor D = compute_data_tensor(shots);
    if (cfg.noise_fraction > 0.0)
      D.symmetrize();
    write_artifact(out / "data.bin", data_artifact(D, tagged(meta, "true")));
    if (cfg.save_traces)
      write_artifact(out / "shots.bin", shots_artifact(shots, tagged(meta, "true")));

    const auto ref = simulate_shots(sc.medium.reference(), sc.array, sc.pulse, sc.tau, sc.n, opts);
    write_artifact(out / "data_ref.bin",
                   data_artifact(compute_data_tensor(ref), tagged(cfg.meta(), "reference")));
    if (cfg.save_traces)
      write_artifact(out / "shots_ref.bin", shots_artifact(ref, tagged(cfg.meta(), "reference")));
  });
}

void stage_build_rom(const fs::path &data_dir, double lambda_min, const fs::path &out,
                     const Log &log)
{
  staged("build-rom", out, [&] {
    const Artifact a = read_in(data_dir, "data.bin");
    const ExperimentConfig cfg = config_of(a);
    const DataTensor D = data_from(a);
    const DataTensor D_ref = data_from(read_in(data_dir, "data_ref.bin"));

    RomFactors rom;
    rom.M = assemble_mass(D);
    rom.S = assemble_stiffness(D);
    rom.lambda_min = lambda_min > 0.0     ? lambda_min
                     : cfg.lambda_min > 0.0 ? cfg.lambda_min
                                            : default_lambda_min(rom.M, cfg.noise_fraction > 0.0);
    say(log, "build-rom: lambda_min " + sci(rom.lambda_min));
    rom.R = block_cholesky(regularize_mass(rom.M, rom.lambda_min));
    rom.P = rom_propagator(rom.R, rom.S);

    // The reference ROM shares the absolute floor.
    RomFactors ref;
    ref.M = assemble_mass(D_ref);
    ref.S = assemble_stiffness(D_ref);
    ref.lambda_min = rom.lambda_min;
    ref.R = block_cholesky(regularize_mass(ref.M, ref.lambda_min));
    ref.P = rom_propagator(ref.R, ref.S);

    // Carry the data forward so later stages only need this directory.
    if (fs::absolute(data_dir) != fs::absolute(out))
    {
      write_artifact(out / "data.bin", a);
      write_artifact(out / "data_ref.bin", read_in(data_dir, "data_ref.bin"));
    }
    write_artifact(out / "rom.bin", rom_artifact(rom, tagged(cfg.meta(), "true")));
    write_artifact(out / "rom_ref.bin", rom_artifact(ref, tagged(cfg.meta(), "reference")));
  });
}

void stage_basis(const fs::path &rom_dir, bool with_true, const fs::path &out, const Log &log)
{
  staged("basis", out, [&] {
    const Artifact a = read_in(rom_dir, "rom_ref.bin");
    const ExperimentConfig cfg = config_of(a);
    const Scenario sc = cfg.build();
    const ImagingGrid grid = sc.imaging_grid();
    const auto opts = sim_options(cfg);
    say(log, "basis: " + std::to_string(grid.count_x()) + " x " + std::to_string(grid.count_z()) +
               " pixels");
    const RomFactors ref = rom_from(a);
    const SnapshotFields U_o =
      simulate_snapshots(sc.medium.reference(), sc.array, sc.pulse, sc.tau, sc.n, grid, opts);
    write_artifact(out / "basis_ref.bin",
                   basis_artifact(orthonormalize(U_o, ref.R), "v_o", tagged(cfg.meta(), "reference")));
    if (with_true)
    {
      const RomFactors rom = rom_from(read_in(rom_dir, "rom.bin"));
      const SnapshotFields U =
        simulate_snapshots(sc.medium, sc.array, sc.pulse, sc.tau, sc.n, grid, opts);
      write_artifact(out / "basis_true.bin",
                     basis_artifact(orthonormalize(U, rom.R), "v", tagged(cfg.meta(), "true")));
    }
  });
}

void stage_image(const std::string &method, const fs::path &dir, const fs::path &basis_dir,
                 const fs::path &out_file, const Log &log)
{
  const fs::path out_dir = out_file.has_parent_path() ? out_file.parent_path() : fs::path(".");
  staged("image-" + method, out_dir, [&] {
    const Artifact rom_a = read_in(dir, "rom.bin");
    const ExperimentConfig cfg = config_of(rom_a);
    const Scenario sc = cfg.build();
    const auto opts = sim_options(cfg);
    const RomFactors rom = rom_from(rom_a);
    const ImageKind kind = image_kind_from_string(method);
    say(log, "image: " + method);
    Image img;
    switch (kind)
    {
    case ImageKind::Norm:
      img = image_norm(rom.R, basis_from(read_in(basis_dir, "basis_ref.bin"), sc.medium));
      break;
    case ImageKind::Ideal:
      img = image_ideal(basis_from(read_in(basis_dir, "basis_true.bin"), sc.medium), rom.R);
      break;
    case ImageKind::Backprojection:
      img = image_backprojection(rom.P, rom_from(read_in(dir, "rom_ref.bin")).P,
                                 basis_from(read_in(basis_dir, "basis_ref.bin"), sc.medium));
      break;
    case ImageKind::RTM:
      img = image_rtm(data_from(read_in(dir, "data.bin")), data_from(read_in(dir, "data_ref.bin")),
                      sc.medium, sc.array, sc.pulse, sc.imaging_grid(), opts);
      break;
    case ImageKind::PixelScan:
    {
      const SnapshotBasis basis = basis_from(read_in(basis_dir, "basis_ref.bin"), sc.medium);
      std::vector<std::size_t> pixels;
      for (const auto &y : cfg.scan_points)
        pixels.push_back(basis.grid.nearest(y));
      img = image_pixel_scan(rom.R, basis, sc.medium, sc.array, pixels, cfg.scan_budget, opts);
      break;
    }
    default:
      throw ConfigError("image: method '" + method + "' is not an imaging method");
    }
    write_image(img, cfg, out_file);
  });
}

void stage_postprocess(const fs::path &image_file, double sigma, const fs::path &out_file)
{
  const fs::path out_dir = out_file.has_parent_path() ? out_file.parent_path() : fs::path(".");
  staged("postprocess", out_dir, [&] {
    const Artifact a = read_artifact(image_file);
    const ExperimentConfig cfg = config_of(a);
    const Scenario sc = cfg.build();
    const Image img = image_from(a, sc.medium);
    Image d = range_derivative(img, sigma);
    d.params["source_method"] = to_string(img.kind);
    write_image(d, cfg, out_file);
  });
}

nlohmann::json run_pipeline(const ExperimentConfig &cfg, const fs::path &out, const Log &log)
{
  fs::create_directories(out);
  {
    std::ofstream f(out / "config.json", std::ios::trunc);
    f << cfg.to_json().dump(2) << '\n';
  }
  const bool ideal = std::find(cfg.methods.begin(), cfg.methods.end(), "ideal") != cfg.methods.end();
  stage_simulate(cfg, out, log);
  stage_build_rom(out, 0.0, out, log);
  stage_basis(out, ideal, out, log);
  for (const auto &m : cfg.methods)
  {
    const fs::path file = out / ("image_" + m + ".bin");
    stage_image(m, out, out, file, log);
    if (cfg.range_sigma > 0.0)
      stage_postprocess(file, cfg.range_sigma, out / ("image_" + m + "_dz.bin"));
  }
  return write_manifest(cfg, out);
}

nlohmann::json write_manifest(const ExperimentConfig &cfg, const fs::path &out)
{
  std::vector<fs::path> files;
  for (const auto &e : fs::directory_iterator(out))
  {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".bin" || ext == ".csv"))
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  nlohmann::json manifest = {{"config_hash", cfg.hash()}, {"config", cfg.to_json()}};
  auto &list = manifest["artifacts"] = nlohmann::json::array();
  for (const auto &p : files)
  {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    const std::string bytes = ss.str();
    nlohmann::json entry = {{"file", p.filename().string()}, {"bytes", bytes.size()},
                            {"hash", fnv1a_hex(bytes)}};
    if (p.extension() == ".bin")
    {
      const Artifact a = parse_artifact(bytes);
      entry["kind"] = a.kind();
      entry["config_hash"] = a.header.value("config_hash", std::string());
    }
    else
      entry["config_hash"] = cfg.hash();
    list.push_back(entry);
  }
  std::ofstream f(out / "manifest.json", std::ios::trunc);
  f << manifest.dump(2) << '\n';
  return manifest;
}

} // namespace romimg
