// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>

#include "doctest.h"

#include "fixtures.hpp"
#include "romimg/error.hpp"
#include "romimg/imaging.hpp"
#include "romimg/internal.hpp"
#include "romimg/io.hpp"
#include "romimg/pipeline.hpp"
#include "romimg/rom.hpp"
#include "romimg/solver.hpp"

using namespace romimg;
using romimg::test::Small;

TEST_CASE("FNV-1a reference values")
{
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("artifact bytes round trip")
{
  Artifact a;
  a.header["kind"] = "test";
  a.header["note"] = "x";
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  a.arrays.push_back(to_named("m", m));
  a.arrays.push_back({"cube", {2, 1, 2}, {0.5, -1.0, 1e-300, 7.0}});
  const std::string bytes = serialize_artifact(a);
  CHECK(bytes.substr(0, 8) == "ROMIMG01");
  const Artifact b = parse_artifact(bytes);
  CHECK(b.kind() == "test");
  CHECK(to_matrix(b.array("m")) == m);
  CHECK(b.array("cube").values == a.arrays[1].values);
  CHECK(serialize_artifact(b) == bytes);
  CHECK_THROWS_AS(b.array("missing"), ConfigError);

  std::string broken = bytes;
  broken[0] = 'X';
  CHECK_THROWS(parse_artifact(broken));
  CHECK_THROWS(parse_artifact(bytes.substr(0, bytes.size() - 8)));
}

TEST_CASE("typed artifacts round trip")
{
  Small s;
  const auto shots = simulate_shots(s.medium, s.array, s.pulse, s.tau, s.n);
  const nlohmann::json meta = {{"config_hash", "0"}};

  const auto shots2 = shots_from(parse_artifact(serialize_artifact(shots_artifact(shots, meta))));
  REQUIRE(shots2.size() == shots.size());
  CHECK(shots2[1].traces == shots[1].traces);
  CHECK(shots2[1].k_first == shots[1].k_first);

  const DataTensor D = compute_data_tensor(shots);
  const DataTensor D2 = data_from(parse_artifact(serialize_artifact(data_artifact(D, meta))));
  CHECK(D2.tau == D.tau);
  CHECK(D2.D[3] == D.D[3]);

  RomFactors rom;
  rom.M = assemble_mass(D);
  rom.S = assemble_stiffness(D);
  rom.R = block_cholesky(rom.M);
  rom.P = rom_propagator(rom.R, rom.S);
  rom.lambda_min = 1e-9;
  const RomFactors rom2 = rom_from(parse_artifact(serialize_artifact(rom_artifact(rom, meta))));
  CHECK(rom2.R.data == rom.R.data);
  CHECK(rom2.P.data == rom.P.data);
  CHECK(rom2.lambda_min == rom.lambda_min);

  const auto grid = ImagingGrid::window(s.medium, 0.5, 2.5, 0.25, 2.0, 2, 1);
  const SnapshotBasis b =
    orthonormalize(simulate_snapshots(s.medium, s.array, s.pulse, s.tau, s.n, grid), rom.R);
  const SnapshotBasis b2 =
    basis_from(parse_artifact(serialize_artifact(basis_artifact(b, "v", meta))), s.medium);
  CHECK(b2.grid.same_as(grid));
  CHECK(b2.V == b.V);

  const Image img = image_norm(rom.R, b);
  const Image img2 = image_from(parse_artifact(serialize_artifact(image_artifact(img, meta))), s.medium);
  CHECK(img2.values == img.values);
  CHECK(img2.kind == img.kind);
}

TEST_CASE("config hash ignores key order")
{
  const nlohmann::json a = {{"x", 1}, {"y", {1, 2}}};
  const nlohmann::json b = nlohmann::json::parse(R"({"y":[1,2],"x":1})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash({{"x", 2}, {"y", {1, 2}}}));
}
