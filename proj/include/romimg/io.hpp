// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_IO_HPP
#define ROMIMG_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "romimg/grid.hpp"
#include "romimg/imaging.hpp"
#include "romimg/internal.hpp"
#include "romimg/rom.hpp"
#include "romimg/scenario.hpp"
#include "romimg/solver.hpp"

namespace romimg
{

// File layout:
//   8 bytes   "ROMIMG01"
//   8 bytes   header length L, unsigned little-endian
//   L bytes   JSON header; header["arrays"] lists {name, shape, offset} with byte offsets
//             into the payload
//   payload   little-endian float64 arrays, row-major, back to back
struct NamedArray
{
  std::string name;
  std::vector<std::int64_t> shape;
  std::vector<double> values; // row-major
};

struct Artifact
{
  nlohmann::json header = nlohmann::json::object();
  std::vector<NamedArray> arrays;

  const NamedArray &array(const std::string &name) const;
  std::string kind() const { return header.value("kind", std::string()); }
};

void write_artifact(const std::filesystem::path &path, const Artifact &artifact);
Artifact read_artifact(const std::filesystem::path &path);
// Serialized bytes, exactly as written to disk.
std::string serialize_artifact(const Artifact &artifact);
Artifact parse_artifact(const std::string &bytes);

NamedArray to_named(const std::string &name, const Eigen::MatrixXd &m);
Eigen::MatrixXd to_matrix(const NamedArray &a);

// 64-bit FNV-1a over bytes, as 16 hex digits.
std::string fnv1a_hex(const std::string &bytes);
// Hash of the canonical (sorted-key, compact) dump.
std::string config_hash(const nlohmann::json &config);

// Every header carries kind, config_hash and the scenario spec, so readers can rebuild the
// lattice the arrays refer to.
Artifact shots_artifact(const std::vector<ShotRecord> &shots, const nlohmann::json &meta);
std::vector<ShotRecord> shots_from(const Artifact &a);

Artifact data_artifact(const DataTensor &D, const nlohmann::json &meta);
DataTensor data_from(const Artifact &a);

// ROM file: R, P and the mass/stiffness blocks.
struct RomFactors
{
  BlockMatrix M;
  BlockMatrix S;
  BlockMatrix R;
  BlockMatrix P;
  double lambda_min = 0.0;
};
Artifact rom_artifact(const RomFactors &rom, const nlohmann::json &meta);
RomFactors rom_from(const Artifact &a);

nlohmann::json grid_json(const ImagingGrid &grid);
ImagingGrid grid_from(const nlohmann::json &j, const Medium &medium);

// Basis columns are named prefix[j][s].
Artifact basis_artifact(const SnapshotBasis &basis, const std::string &prefix,
                        const nlohmann::json &meta);
SnapshotBasis basis_from(const Artifact &a, const Medium &medium);

Artifact image_artifact(const Image &img, const nlohmann::json &meta);
Image image_from(const Artifact &a, const Medium &medium);
// x,z,value per pixel, rows in pixel order.
void write_image_csv(const std::filesystem::path &path, const Image &img);

} // namespace romimg

#endif // ROMIMG_IO_HPP
