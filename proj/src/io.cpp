// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include "romimg/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "romimg/error.hpp"

namespace romimg
{

namespace
{

constexpr char magic[8] = {'R', 'O', 'M', 'I', 'M', 'G', '0', '1'};

template <typename T>
void put_le(std::string &out, T value)
{
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes, bytes + sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T get_le(const char *p)
{
  char bytes[sizeof(T)];
  std::memcpy(bytes, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::int64_t element_count(const std::vector<std::int64_t> &shape)
{
  std::int64_t n = 1;
  for (auto s : shape)
  {
    require(s >= 0, "artifact: negative array dimension");
    n *= s;
  }
  return n;
}

nlohmann::json with_kind(const nlohmann::json &meta, const std::string &kind)
{
  nlohmann::json h = meta.is_object() ? meta : nlohmann::json::object();
  h["kind"] = kind;
  return h;
}

void expect_kind(const Artifact &a, const std::string &kind)
{
  require(a.kind() == kind, "artifact: expected kind '" + kind + "', found '" + a.kind() + "'");
}

} // namespace

const NamedArray &Artifact::array(const std::string &name) const
{
  for (const auto &a : arrays)
    if (a.name == name)
      return a;
  throw ConfigError("artifact: no array named '" + name + "'");
}

std::string serialize_artifact(const Artifact &artifact)
{
  nlohmann::json header = artifact.header;
  auto &list = header["arrays"] = nlohmann::json::array();
  std::int64_t offset = 0;
  for (const auto &a : artifact.arrays)
  {
    require(element_count(a.shape) == static_cast<std::int64_t>(a.values.size()),
            "artifact: array '" + a.name + "' does not match its shape");
    list.push_back({{"name", a.name}, {"shape", a.shape}, {"offset", offset}, {"dtype", "<f8"}});
    offset += static_cast<std::int64_t>(a.values.size() * sizeof(double));
  }
  const std::string text = header.dump();
  std::string out(magic, sizeof(magic));
  put_le<std::uint64_t>(out, text.size());
  out += text;
  out.reserve(out.size() + static_cast<std::size_t>(offset));
  for (const auto &a : artifact.arrays)
    for (double v : a.values)
      put_le<double>(out, v);
  return out;
}

Artifact parse_artifact(const std::string &bytes)
{
  require(bytes.size() >= 16 && std::memcmp(bytes.data(), magic, sizeof(magic)) == 0,
          "artifact: not a romimg file");
  const auto len = get_le<std::uint64_t>(bytes.data() + 8);
  require(len <= bytes.size() - 16, "artifact: truncated header");
  Artifact a;
  a.header = nlohmann::json::parse(bytes.substr(16, len));
  const std::size_t base = 16 + len;
  for (const auto &entry : a.header.at("arrays"))
  {
    NamedArray arr;
    arr.name = entry.at("name").get<std::string>();
    arr.shape = entry.at("shape").get<std::vector<std::int64_t>>();
    const auto offset = entry.at("offset").get<std::size_t>();
    const auto count = static_cast<std::size_t>(element_count(arr.shape));
    require(base + offset + count * sizeof(double) <= bytes.size(),
            "artifact: truncated payload for '" + arr.name + "'");
    arr.values.resize(count);
    const char *p = bytes.data() + base + offset;
    for (std::size_t i = 0; i < count; ++i)
      arr.values[i] = get_le<double>(p + i * sizeof(double));
    a.arrays.push_back(std::move(arr));
  }
  a.header.erase("arrays");
  return a;
}

void write_artifact(const std::filesystem::path &path, const Artifact &artifact)
{
  const std::string bytes = serialize_artifact(artifact);
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(f), "artifact: cannot write " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(f), "artifact: write failed for " + path.string());
}

Artifact read_artifact(const std::filesystem::path &path)
{
  std::ifstream f(path, std::ios::binary);
  require(static_cast<bool>(f), "artifact: cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_artifact(ss.str());
}

NamedArray to_named(const std::string &name, const Eigen::MatrixXd &m)
{
  NamedArray a{name, {m.rows(), m.cols()}, {}};
  a.values.resize(static_cast<std::size_t>(m.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
    a.values.data(), m.rows(), m.cols()) = m;
  return a;
}

Eigen::MatrixXd to_matrix(const NamedArray &a)
{
  require(a.shape.size() == 2, "artifact: array '" + a.name + "' is not a matrix");
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
    a.values.data(), a.shape[0], a.shape[1]);
}

std::string fnv1a_hex(const std::string &bytes)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes)
  {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

std::string config_hash(const nlohmann::json &config) { return fnv1a_hex(config.dump()); }

Artifact shots_artifact(const std::vector<ShotRecord> &shots, const nlohmann::json &meta)
{
  require(!shots.empty(), "shots: nothing to write");
  const auto &s0 = shots.front();
  Artifact a;
  a.header = with_kind(meta, "shots");
  a.header["dt"] = s0.dt;
  a.header["tau"] = s0.tau;
  a.header["n"] = s0.n;
  a.header["steps_per_tau"] = s0.steps_per_tau;
  a.header["k_first"] = s0.k_first;
  NamedArray arr{"traces", {static_cast<std::int64_t>(shots.size()), s0.traces.rows(), s0.traces.cols()}, {}};
  for (const auto &s : shots)
  {
    require(s.traces.rows() == s0.traces.rows() && s.traces.cols() == s0.traces.cols() &&
              s.k_first == s0.k_first,
            "shots: records differ in length");
    const NamedArray one = to_named("", s.traces);
    arr.values.insert(arr.values.end(), one.values.begin(), one.values.end());
  }
  a.arrays.push_back(std::move(arr));
  return a;
}

std::vector<ShotRecord> shots_from(const Artifact &a)
{
  expect_kind(a, "shots");
  const auto &arr = a.array("traces");
  require(arr.shape.size() == 3, "shots: traces must be 3-dimensional");
  std::vector<ShotRecord> out(static_cast<std::size_t>(arr.shape[0]));
  const auto K = arr.shape[1], m = arr.shape[2];
  for (std::size_t s = 0; s < out.size(); ++s)
  {
    auto &r = out[s];
    r.source = static_cast<int>(s);
    r.dt = a.header.at("dt").get<double>();
    r.tau = a.header.at("tau").get<double>();
    r.n = a.header.at("n").get<int>();
    r.steps_per_tau = a.header.at("steps_per_tau").get<int>();
    r.k_first = a.header.at("k_first").get<int>();
    r.traces = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      arr.values.data() + s * K * m, K, m);
  }
  return out;
}

Artifact data_artifact(const DataTensor &D, const nlohmann::json &meta)
{
  D.validate();
  Artifact a;
  a.header = with_kind(meta, "data_tensor");
  a.header["n"] = D.n;
  a.header["m"] = D.m;
  a.header["tau"] = D.tau;
  NamedArray arr{"D", {static_cast<std::int64_t>(D.D.size()), D.m, D.m}, {}};
  for (const auto &Dj : D.D)
  {
    const NamedArray one = to_named("", Dj);
    arr.values.insert(arr.values.end(), one.values.begin(), one.values.end());
  }
  a.arrays.push_back(std::move(arr));
  return a;
}

DataTensor data_from(const Artifact &a)
{
  expect_kind(a, "data_tensor");
  DataTensor D;
  D.n = a.header.at("n").get<int>();
  D.m = a.header.at("m").get<int>();
  D.tau = a.header.at("tau").get<double>();
  const auto &arr = a.array("D");
  require(arr.shape.size() == 3 && arr.shape[1] == D.m && arr.shape[2] == D.m,
          "data tensor: payload shape does not match the header");
  const std::size_t mm = static_cast<std::size_t>(D.m) * D.m;
  for (std::int64_t j = 0; j < arr.shape[0]; ++j)
    D.D.push_back(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      arr.values.data() + j * mm, D.m, D.m));
  D.validate();
  return D;
}

Artifact rom_artifact(const RomFactors &rom, const nlohmann::json &meta)
{
  Artifact a;
  a.header = with_kind(meta, "rom");
  a.header["n"] = rom.R.n;
  a.header["m"] = rom.R.m;
  a.header["lambda_min"] = rom.lambda_min;
  a.arrays.push_back(to_named("M", rom.M.data));
  a.arrays.push_back(to_named("S", rom.S.data));
  a.arrays.push_back(to_named("R", rom.R.data));
  a.arrays.push_back(to_named("P", rom.P.data));
  return a;
}

RomFactors rom_from(const Artifact &a)
{
  expect_kind(a, "rom");
  const int n = a.header.at("n").get<int>();
  const int m = a.header.at("m").get<int>();
  auto block = [&](const char *name, Structure s) {
    BlockMatrix B(n, m, s);
    B.data = to_matrix(a.array(name));
    require(B.data.rows() == B.size() && B.data.cols() == B.size(),
            std::string("rom: ") + name + " has the wrong size");
    return B;
  };
  RomFactors rom;
  rom.M = block("M", Structure::SPD);
  rom.S = block("S", Structure::General);
  rom.R = block("R", Structure::BlockUpperTriangular);
  rom.P = block("P", Structure::General);
  rom.lambda_min = a.header.at("lambda_min").get<double>();
  return rom;
}

nlohmann::json grid_json(const ImagingGrid &grid)
{
  return {{"i0", grid.i0()},
          {"k0", grid.k0()},
          {"stride_x", grid.stride_x()},
          {"stride_z", grid.stride_z()},
          {"count_x", grid.count_x()},
          {"count_z", grid.count_z()},
          {"dx", grid.dx()},
          {"dz", grid.dz()},
          {"origin", {grid.origin().x, grid.origin().z}}};
}

ImagingGrid grid_from(const nlohmann::json &j, const Medium &medium)
{
  return ImagingGrid(medium, j.at("i0").get<int>(), j.at("stride_x").get<int>(),
                     j.at("count_x").get<int>(), j.at("k0").get<int>(),
                     j.at("stride_z").get<int>(), j.at("count_z").get<int>());
}

Artifact basis_artifact(const SnapshotBasis &basis, const std::string &prefix,
                        const nlohmann::json &meta)
{
  Artifact a;
  a.header = with_kind(meta, "snapshot_basis");
  a.header["n"] = basis.n;
  a.header["m"] = basis.m;
  a.header["tau"] = basis.tau;
  a.header["grid"] = grid_json(basis.grid);
  auto &fields = a.header["fields"] = nlohmann::json::array();
  for (int j = 0; j < basis.n; ++j)
    for (int s = 0; s < basis.m; ++s)
      fields.push_back(prefix + "[" + std::to_string(j) + "][" + std::to_string(s) + "]");
  a.arrays.push_back(to_named("V", basis.V));
  a.arrays.push_back(to_named("R", basis.R.data));
  if (!basis.data.D.empty())
    for (const auto &arr : data_artifact(basis.data, {}).arrays)
      a.arrays.push_back(arr);
  return a;
}

SnapshotBasis basis_from(const Artifact &a, const Medium &medium)
{
  expect_kind(a, "snapshot_basis");
  SnapshotBasis b;
  b.n = a.header.at("n").get<int>();
  b.m = a.header.at("m").get<int>();
  b.tau = a.header.at("tau").get<double>();
  b.grid = grid_from(a.header.at("grid"), medium);
  b.V = to_matrix(a.array("V"));
  require(b.V.rows() == static_cast<Eigen::Index>(b.grid.size()) &&
            b.V.cols() == static_cast<Eigen::Index>(b.n) * b.m,
          "basis: payload shape does not match the header");
  b.R = BlockMatrix(b.n, b.m, Structure::BlockUpperTriangular);
  b.R.data = to_matrix(a.array("R"));
  for (const auto &arr : a.arrays)
    if (arr.name == "D")
    {
      Artifact d;
      d.header = {{"kind", "data_tensor"}, {"n", b.n}, {"m", b.m}, {"tau", b.tau}};
      d.arrays.push_back(arr);
      b.data = data_from(d);
    }
  return b;
}

Artifact image_artifact(const Image &img, const nlohmann::json &meta)
{
  Artifact a;
  a.header = with_kind(meta, "image");
  a.header["method"] = to_string(img.kind);
  a.header["grid"] = grid_json(img.grid);
  a.header["params"] = img.params;
  NamedArray arr{"values", {img.grid.count_z(), img.grid.count_x()}, {}};
  arr.values.assign(img.values.data(), img.values.data() + img.values.size());
  a.arrays.push_back(std::move(arr));
  return a;
}

Image image_from(const Artifact &a, const Medium &medium)
{
  expect_kind(a, "image");
  Image img;
  img.grid = grid_from(a.header.at("grid"), medium);
  img.kind = image_kind_from_string(a.header.at("method").get<std::string>());
  img.params = a.header.value("params", nlohmann::json::object());
  const auto &arr = a.array("values");
  require(arr.values.size() == img.grid.size(), "image: payload does not match the grid");
  img.values = Eigen::Map<const Eigen::VectorXd>(arr.values.data(),
                                                 static_cast<Eigen::Index>(arr.values.size()));
  return img;
}

void write_image_csv(const std::filesystem::path &path, const Image &img)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::trunc);
  require(static_cast<bool>(f), "image: cannot write " + path.string());
  f << "x,z,value\n" << std::setprecision(17);
  for (std::size_t p = 0; p < img.grid.size(); ++p)
  {
    const Point y = img.grid.position(p);
    f << y.x << ',' << y.z << ',' << img.values(static_cast<Eigen::Index>(p)) << '\n';
  }
}

} // namespace romimg
