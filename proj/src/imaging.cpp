// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#include "romimg/imaging.hpp"

#include <algorithm>
#include <cmath>

#include "romimg/error.hpp"
#include "romimg/parallel.hpp"

namespace romimg
{

namespace
{

constexpr std::array<std::pair<ImageKind, const char *>, 6> kind_names{{
  {ImageKind::Norm, "norm"},
  {ImageKind::Ideal, "ideal"},
  {ImageKind::Backprojection, "bp"},
  {ImageKind::RTM, "rtm"},
  {ImageKind::PixelScan, "ps"},
  {ImageKind::RangeDerivative, "range-derivative"},
}};

constexpr Eigen::Index pixel_chunk = 512;

// Calls fn(first, count) over row chunks of a P-row matrix in parallel.
template <typename Fn>
void for_pixel_chunks(Eigen::Index rows, Fn &&fn)
{
  const auto chunks = static_cast<std::size_t>((rows + pixel_chunk - 1) / pixel_chunk);
  parallel_for(chunks, [&](std::size_t c) {
    const Eigen::Index first = static_cast<Eigen::Index>(c) * pixel_chunk;
    fn(first, std::min(pixel_chunk, rows - first));
  });
}

Image make_image(const SnapshotBasis &basis, ImageKind kind)
{
  Image img;
  img.grid = basis.grid;
  img.kind = kind;
  img.values.setZero(static_cast<Eigen::Index>(basis.grid.size()));
  img.params["tau"] = basis.tau;
  img.params["n"] = basis.n;
  img.params["m"] = basis.m;
  return img;
}

// Row-wise squared norms of V R.
Eigen::VectorXd projected_norms(const Eigen::MatrixXd &V, const BlockMatrix &R)
{
  require(V.cols() == R.size(), "imaging: basis and factor dimensions differ");
  Eigen::VectorXd out(V.rows());
  for_pixel_chunks(V.rows(), [&](Eigen::Index first, Eigen::Index count) {
    const Eigen::MatrixXd g = V.middleRows(first, count) * R.data;
    out.segment(first, count) = g.rowwise().squaredNorm();
  });
  return out;
}

} // namespace

std::string to_string(ImageKind kind)
{
  for (const auto &[k, name] : kind_names)
    if (k == kind)
      return name;
  return "unknown";
}

ImageKind image_kind_from_string(const std::string &name)
{
  for (const auto &[k, n] : kind_names)
    if (name == n)
      return k;
  throw ConfigError("unknown image kind '" + name + "'");
}

Image image_norm(const BlockMatrix &R, const SnapshotBasis &basis_ref)
{
  Image img = make_image(basis_ref, ImageKind::Norm);
  img.values = projected_norms(basis_ref.V, R);
  return img;
}

Image image_norm_explicit(const BlockMatrix &R, const SnapshotBasis &basis_ref)
{
  Image img = make_image(basis_ref, ImageKind::Norm);
  parallel_for(basis_ref.grid.size(), [&](std::size_t p) {
    const Eigen::MatrixXd g = internal_wave(R, basis_ref, basis_ref.grid.position(p));
    double acc = 0.0;
    for (Eigen::Index j = 0; j < g.rows(); ++j)
      for (Eigen::Index r = 0; r < g.cols(); ++r)
        acc += g(j, r) * g(j, r);
    img.values(static_cast<Eigen::Index>(p)) = acc;
  });
  return img;
}

Image image_ideal(const SnapshotBasis &basis_true, const BlockMatrix &R)
{
  Image img = make_image(basis_true, ImageKind::Ideal);
  img.values = projected_norms(basis_true.V, R);
  return img;
}

Image image_backprojection(const BlockMatrix &P, const BlockMatrix &P_ref,
                           const SnapshotBasis &basis_ref)
{
  require(P.size() == P_ref.size() && P.size() == basis_ref.V.cols(),
          "backprojection: dimension mismatch");
  Image img = make_image(basis_ref, ImageKind::Backprojection);
  const Eigen::MatrixXd dP = P.data - P_ref.data;
  for_pixel_chunks(basis_ref.V.rows(), [&](Eigen::Index first, Eigen::Index count) {
    const auto v = basis_ref.V.middleRows(first, count);
    const Eigen::MatrixXd w = v * dP;
    img.values.segment(first, count) = w.cwiseProduct(v).rowwise().sum();
  });
  return img;
}

Image image_rtm(const DataTensor &D, const DataTensor &D_ref, const Medium &medium,
                const ArrayGeometry &array, const Pulse &pulse, const ImagingGrid &grid,
                const SimulationOptions &opts)
{
  D.validate();
  D_ref.validate();
  require(D.m == D_ref.m && D.n == D_ref.n && D.tau == D_ref.tau && D.m == array.m(),
          "rtm: data tensors do not match each other or the array");
  const Medium ref = medium.reference();
  const auto nodes = array.nodes(ref);
  const double tau = D.tau;
  const int n = D.n;
  const double dt = opts.dt > 0.0 ? opts.dt : choose_time_step(ref, tau, opts.cfl);
  const int per_tau = static_cast<int>(std::lround(tau / dt));
  const int K = (2 * n - 1) * per_tau;
  const DiscretePulse dp(pulse, dt);
  const LeapfrogSolver solver(ref, dt);
  const auto P = static_cast<Eigen::Index>(grid.size());

  Image img;
  img.grid = grid;
  img.kind = ImageKind::RTM;
  img.values.setZero(P);
  // Per-source correlations, summed in source order afterwards so the result does not
  // depend on thread scheduling.
  std::vector<Eigen::VectorXd> per_source(nodes.size());

  parallel_for(nodes.size(), [&](std::size_t s) {
    // Source wavefield on the imaging grid for t_k, k = 0..K.
    Eigen::MatrixXd fwd(P, K + 1);
    PointSource src;
    src.node = nodes[s];
    src.k_first = -(dp.full_steps() + 1);
    for (int k = src.k_first; k <= dp.full_steps() + 1; ++k)
      src.amplitude.push_back(dp.full_source(k));
    solver.run(std::span(&src, 1), src.k_first, K, [&](int k, std::span<const double> w) {
      if (k < 0)
        return;
      for (Eigen::Index p = 0; p < P; ++p)
        fwd(p, k) = w[grid.node(static_cast<std::size_t>(p))];
    });

    // Receiver wavefield: scattered traces injected reversed in time, so step k' of this
    // run is time (K - k') dt of the adjoint field.
    std::vector<PointSource> adj(nodes.size());
    for (std::size_t r = 0; r < nodes.size(); ++r)
    {
      auto sample = [&](int j) {
        j = std::abs(j);
        if (j >= 2 * n)
          return 0.0;
        return D.D[j](static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(r)) -
               D_ref.D[j](static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(r));
      };
      adj[r].node = nodes[r];
      adj[r].k_first = 0;
      adj[r].amplitude.resize(K + 1);
      for (int kp = 0; kp <= K; ++kp)
        adj[r].amplitude[kp] = cubic_interpolate(sample, static_cast<double>(K - kp) / per_tau);
    }
    Eigen::VectorXd corr = Eigen::VectorXd::Zero(P);
    solver.run(adj, 0, K, [&](int kp, std::span<const double> q) {
      const int k = K - kp;
      for (Eigen::Index p = 0; p < P; ++p)
        corr(p) += fwd(p, k) * q[grid.node(static_cast<std::size_t>(p))];
    });
    per_source[s] = corr * dt;
  });
  for (const auto &c : per_source)
    img.values += c;

  const double peak = img.values.cwiseAbs().maxCoeff();
  if (peak > 0.0)
    img.values /= peak;
  img.params["tau"] = tau;
  img.params["n"] = n;
  img.params["m"] = D.m;
  img.params["normalization"] = peak;
  return img;
}

PixelScanResult pixel_scan_point(const BlockMatrix &R, const SnapshotBasis &basis_ref,
                                 const Medium &medium_true, const ArrayGeometry &array,
                                 const Point &y, const ImagingGrid *focus_grid,
                                 const SimulationOptions &opts)
{
  require(array.m() == basis_ref.m, "pixel scan: array and basis disagree on m");
  const auto nodes = array.nodes(medium_true);
  const int n = basis_ref.n;
  const int m = basis_ref.m;
  const double tau = basis_ref.tau;
  const double dt = opts.dt > 0.0 ? opts.dt : choose_time_step(medium_true, tau, opts.cfl);
  const int per_tau = static_cast<int>(std::lround(tau / dt));
  require(std::abs(per_tau * dt - tau) < 1e-9 * tau, "pixel scan: dt must divide tau");

  PixelScanResult out;
  out.y = y;
  out.dt = dt;
  out.steps_per_tau = per_tau;
  out.g = internal_wave(R, basis_ref, y);

  // F(t, x_s) = 1_[0, n tau](t) g(n tau - t, x_s); g is even in t and taken as 0 from n tau on.
  const int nS = n * per_tau;
  out.control.setZero(nS + 1, m);
  for (int s = 0; s < m; ++s)
  {
    auto sample = [&](int j) {
      j = std::abs(j);
      return j < n ? out.g(j, s) : 0.0;
    };
    for (int k = 0; k <= nS; ++k)
      out.control(k, s) = cubic_interpolate(sample, static_cast<double>(nS - k) / per_tau);
  }

  // Source d/dt F by centered differences; F vanishes outside [0, n tau].
  std::vector<PointSource> sources(static_cast<std::size_t>(m));
  for (int s = 0; s < m; ++s)
  {
    auto F = [&](int k) { return k >= 0 && k <= nS ? out.control(k, s) : 0.0; };
    sources[s].node = nodes[s];
    sources[s].k_first = -1;
    for (int k = -1; k <= nS + 1; ++k)
      sources[s].amplitude.push_back((F(k + 1) - F(k - 1)) / (2.0 * dt));
  }

  const int K = 2 * nS;
  out.gamma.setZero(K + 1, m);
  if (focus_grid)
    out.focus.setZero(static_cast<Eigen::Index>(focus_grid->size()));
  const LeapfrogSolver solver(medium_true, dt);
  solver.run(sources, -1, K, [&](int k, std::span<const double> w) {
    if (k < 0)
      return;
    for (int r = 0; r < m; ++r)
      out.gamma(k, r) = w[nodes[r]];
    if (focus_grid && k == nS)
      for (std::size_t p = 0; p < focus_grid->size(); ++p)
        out.focus(static_cast<Eigen::Index>(p)) = w[focus_grid->node(p)];
  });

  // I = sum_r int_0^{n tau} gamma(n tau + t) g(t) dt, trapezoid at interval tau, g(n tau) = 0.
  double acc = 0.0;
  for (int r = 0; r < m; ++r)
    for (int j = 0; j < n; ++j)
      acc += (j == 0 ? 0.5 : 1.0) * out.gamma(nS + j * per_tau, r) * out.g(j, r);
  out.value = tau * acc;
  return out;
}

double pixel_scan_superposition_error(const PixelScanResult &result, const Medium &medium_true,
                                      const ArrayGeometry &array)
{
  const auto nodes = array.nodes(medium_true);
  const int m = array.m();
  require(result.control.cols() == m, "superposition: control and array disagree");
  const double dt = result.dt;
  const int K = static_cast<int>(result.gamma.rows()) - 1;
  const int nS = static_cast<int>(result.control.rows()) - 1;
  const LeapfrogSolver solver(medium_true, dt);

  std::vector<Eigen::MatrixXd> parts(static_cast<std::size_t>(m));
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t s) {
    // Response H(k, r) to a unit source amplitude at step 0 only.
    PointSource kick;
    kick.node = nodes[s];
    kick.k_first = 0;
    kick.amplitude = {1.0};
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(K + 2, m);
    solver.run(std::span(&kick, 1), 0, K + 1, [&](int k, std::span<const double> w) {
      for (int r = 0; r < m; ++r)
        H(k, r) = w[nodes[r]];
    });
    auto F = [&](int k) {
      return k >= 0 && k <= nS ? result.control(k, static_cast<Eigen::Index>(s)) : 0.0;
    };
    Eigen::MatrixXd part = Eigen::MatrixXd::Zero(K + 1, m);
    for (int i = -1; i <= nS + 1; ++i)
    {
      const double amp = (F(i + 1) - F(i - 1)) / (2.0 * dt);
      if (amp == 0.0)
        continue;
      for (int k = std::max(i, 0); k <= K; ++k)
        part.row(k) += amp * H.row(k - i);
    }
    parts[s] = std::move(part);
  });
  Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(K + 1, m);
  for (const auto &part : parts)
    rebuilt += part;
  const double norm = result.gamma.norm();
  return norm > 0.0 ? (result.gamma - rebuilt).norm() / norm : (rebuilt.norm() > 0.0 ? 1.0 : 0.0);
}

Image image_pixel_scan(const BlockMatrix &R, const SnapshotBasis &basis_ref,
                       const Medium &medium_true, const ArrayGeometry &array,
                       const std::vector<std::size_t> &pixels, std::size_t max_pixels,
                       const SimulationOptions &opts)
{
  std::vector<std::size_t> list = pixels;
  if (list.empty())
    for (std::size_t p = 0; p < basis_ref.grid.size(); ++p)
      list.push_back(p);
  if (list.size() > max_pixels)
    throw ConfigError("pixel scan: " + std::to_string(list.size()) +
                      " pixels requested, each needs one full forward solve; budget is " +
                      std::to_string(max_pixels) + " (restrict the pixel list)");
  Image img = make_image(basis_ref, ImageKind::PixelScan);
  parallel_for(list.size(), [&](std::size_t i) {
    const std::size_t p = list[i];
    require(p < basis_ref.grid.size(), "pixel scan: pixel outside the grid");
    const PixelScanResult res = pixel_scan_point(R, basis_ref, medium_true, array,
                                                 basis_ref.grid.position(p), nullptr, opts);
    img.values(static_cast<Eigen::Index>(p)) = res.value;
  });
  img.params["pixels"] = list.size();
  return img;
}

Image range_derivative(const Image &img, double sigma)
{
  require(sigma > 0.0, "range derivative: sigma must be positive");
  const ImagingGrid &grid = img.grid;
  const int nx = grid.count_x();
  const int nz = grid.count_z();
  require(nz >= 2, "range derivative: need at least two range samples");
  const double dz = grid.dz();
  Image out;
  out.grid = grid;
  out.kind = ImageKind::RangeDerivative;
  out.params = img.params;
  out.params["source_kind"] = to_string(img.kind);
  out.params["sigma"] = sigma;
  if (dz > sigma)
    out.params["warning"] = "range spacing exceeds the smoothing width";

  const int half = static_cast<int>(std::floor(4.0 * sigma / dz));
  std::vector<double> kernel(2 * half + 1);
  for (int q = -half; q <= half; ++q)
    kernel[q + half] = std::exp(-0.5 * (q * dz / sigma) * (q * dz / sigma));

  Eigen::VectorXd smooth(img.values.size());
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < nz; ++b)
    {
      double acc = 0.0;
      double wsum = 0.0;
      for (int q = -half; q <= half; ++q)
      {
        const int bb = b + q;
        if (bb < 0 || bb >= nz)
          continue;
        acc += kernel[q + half] * img.at(a, bb);
        wsum += kernel[q + half];
      }
      smooth(static_cast<Eigen::Index>(grid.pixel(a, b))) = acc / wsum;
    }

  out.values.resize(img.values.size());
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < nz; ++b)
    {
      const int lo = std::max(b - 1, 0);
      const int hi = std::min(b + 1, nz - 1);
      out.values(static_cast<Eigen::Index>(grid.pixel(a, b))) =
        (smooth(static_cast<Eigen::Index>(grid.pixel(a, hi))) -
         smooth(static_cast<Eigen::Index>(grid.pixel(a, lo)))) /
        ((hi - lo) * dz);
    }
  return out;
}

} // namespace romimg
