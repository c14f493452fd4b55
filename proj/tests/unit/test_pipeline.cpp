// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "fixtures.hpp"
#include "romimg/error.hpp"
#include "romimg/pipeline.hpp"

using namespace romimg;
namespace fs = std::filesystem;

namespace
{

fs::path scratch(const std::string &name)
{
  const fs::path p = fs::temp_directory_path() / ("romimg-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig tiny()
{
  ExperimentConfig c;
  c.scenario = test::tiny_spec();
  c.methods = {"norm", "bp", "rtm"};
  return c;
}

} // namespace

TEST_CASE("config round trip and validation")
{
  const ExperimentConfig c = tiny();
  const ExperimentConfig d = ExperimentConfig::from_json(c.to_json());
  CHECK(d.to_json() == c.to_json());
  CHECK(d.hash() == c.hash());

  nlohmann::json j = c.to_json();
  j["noise"]["fraction"] = -0.1;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
  j = c.to_json();
  j["scenario"] = "atlantis";
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
  j = c.to_json();
  j["cfl"] = 0.9;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
  j = c.to_json();
  j["methods"] = {"norm", "xray"};
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
  CHECK(ExperimentConfig::from_json({{"scenario", "homogeneous"}}).scenario.reflectors.empty());
}

TEST_CASE("pipeline output is deterministic")
{
  const ExperimentConfig c = tiny();
  const auto a = run_pipeline(c, scratch("a"));
  const auto b = run_pipeline(c, scratch("b"));
  CHECK(a == b);
  CHECK(fs::exists(scratch("a").parent_path() / "romimg-test-b" / "image_norm.csv"));
  CHECK(!fs::exists(scratch("a").parent_path() / "romimg-test-b" / "simulate.partial"));
}

TEST_CASE("pipeline output does not depend on the thread count")
{
  const ExperimentConfig c = tiny();
  ::setenv("ROMIMG_THREADS", "1", 1);
  const auto a = run_pipeline(c, scratch("t1"));
  ::setenv("ROMIMG_THREADS", "4", 1);
  const auto b = run_pipeline(c, scratch("t4"));
  ::unsetenv("ROMIMG_THREADS");
  CHECK(a == b);
}

TEST_CASE("failed stage leaves its marker")
{
  const fs::path out = scratch("fail");
  CHECK_THROWS_AS(stage_build_rom(out / "nowhere", 0.0, out), ConfigError);
  CHECK(fs::exists(out / "build-rom.partial"));
}
