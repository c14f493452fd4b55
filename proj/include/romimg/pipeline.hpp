// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_PIPELINE_HPP
#define ROMIMG_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "romimg/io.hpp"
#include "romimg/scenario.hpp"

namespace romimg
{

struct ExperimentConfig
{
  ScenarioSpec scenario = preset_spec("waveguide");
  double noise_fraction = 0.0;
  std::uint64_t seed = 1;
  double lambda_min = 0.0; // 0: relative default, noisy or noiseless
  std::vector<std::string> methods = {"norm", "bp", "rtm"};
  double range_sigma = 0.125; // range-derivative smoothing; 0 skips the variants
  std::vector<Point> scan_points; // pixel-scan locations, empty: every pixel
  std::size_t scan_budget = 256;
  double cfl = 0.5;
  bool save_traces = false;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json &j);
  std::string hash() const { return config_hash(to_json()); }
  // Header fields stamped into every artifact.
  nlohmann::json meta() const;
  Scenario build() const { return build_scenario(scenario); }
};

ExperimentConfig load_config(const std::filesystem::path &path);

using Log = std::function<void(const std::string &)>;

// Stages. Each writes into `out`, marks itself with <stage>.partial while running, and
// rethrows failures with the stage name prepended.
void stage_simulate(const ExperimentConfig &cfg, const std::filesystem::path &out,
                    const Log &log = {});
// lambda_min <= 0 uses the config value, or the default relative floor.
void stage_build_rom(const std::filesystem::path &data_dir, double lambda_min,
                     const std::filesystem::path &out, const Log &log = {});
void stage_basis(const std::filesystem::path &rom_dir, bool with_true,
                 const std::filesystem::path &out, const Log &log = {});
// Data and ROM files come from rom_dir, bases from basis_dir.
void stage_image(const std::string &method, const std::filesystem::path &rom_dir,
                 const std::filesystem::path &basis_dir, const std::filesystem::path &out_file,
                 const Log &log = {});
void stage_postprocess(const std::filesystem::path &image_file, double sigma,
                       const std::filesystem::path &out_file);

// simulate -> build-rom -> basis -> image -> postprocess, all in `out`, then manifest.json.
nlohmann::json run_pipeline(const ExperimentConfig &cfg, const std::filesystem::path &out,
                            const Log &log = {});

// Artifact list with per-file payload hashes.
nlohmann::json write_manifest(const ExperimentConfig &cfg, const std::filesystem::path &out);

ExperimentConfig config_of(const Artifact &a);

} // namespace romimg

#endif // ROMIMG_PIPELINE_HPP
