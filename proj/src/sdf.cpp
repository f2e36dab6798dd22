#include "qmcsdf/sdf.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "qmcsdf/errors.hpp"
#include "qmcsdf/parallel.hpp"

namespace qmcsdf {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

double signed_distance(const Bvh& bvh, const TriangleMesh& mesh, const Vec3& p) {
  const double d = closest_point(bvh, mesh, p).distance;
  return ray_parity(bvh, mesh, p) ? -d : d;
}

SdfGrid::SdfGrid(const Resolution& resolution, const Box3& box) : resolution_(resolution), box_(box) {
  for (int r : resolution) {
    if (r < 2) throw std::invalid_argument("SdfGrid: resolution must be at least 2 per axis");
  }
  if (!(box.sizes().array() > 0.0).all()) throw std::invalid_argument("SdfGrid: box must have positive extent");
  values_.assign(static_cast<std::size_t>(resolution[0]) * resolution[1] * resolution[2], 0.0);
}

Vec3 SdfGrid::spacing() const {
  return box_.sizes().cwiseQuotient(Vec3(resolution_[0] - 1, resolution_[1] - 1, resolution_[2] - 1));
}

Vec3 SdfGrid::node(int i, int j, int k) const {
  return box_.min() + spacing().cwiseProduct(Vec3(i, j, k));
}

bool SdfGrid::same_lattice(const SdfGrid& other) const {
  return resolution_ == other.resolution_ && box_.min() == other.box_.min() && box_.max() == other.box_.max();
}

SdfGrid bake_function(const std::function<double(const Vec3&)>& field, const SdfGrid::Resolution& resolution,
                      const Box3& box) {
  SdfGrid grid(resolution, box);
  const auto [nx, ny, nz] = resolution;
  parallel_for(static_cast<std::size_t>(nz), [&](std::size_t k0, std::size_t k1) {
    for (int k = static_cast<int>(k0); k < static_cast<int>(k1); ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) grid.at(i, j, k) = field(grid.node(i, j, k));
  });
  return grid;
}

SdfGrid bake_grid(const Bvh& bvh, const TriangleMesh& mesh, const SdfGrid::Resolution& resolution, const Box3& box) {
  if (mesh.empty()) throw EmptyMeshError("bake_grid: empty mesh");
  return bake_function([&](const Vec3& p) { return signed_distance(bvh, mesh, p); }, resolution, box);
}

double trilinear(const SdfGrid& grid, const Vec3& p) {
  const Box3& box = grid.box();
  if (!box.contains(p)) throw OutOfDomainError("trilinear: point outside grid box");
  const Vec3 s = (p - box.min()).cwiseQuotient(grid.spacing());
  const auto& res = grid.resolution();
  int idx[3];
  double frac[3];
  for (int a = 0; a < 3; ++a) {
    idx[a] = std::clamp(static_cast<int>(std::floor(s[a])), 0, res[static_cast<std::size_t>(a)] - 2);
    frac[a] = std::clamp(s[a] - idx[a], 0.0, 1.0);
  }
  const auto [i, j, k] = idx;
  const double c00 = grid.at(i, j, k) * (1 - frac[0]) + grid.at(i + 1, j, k) * frac[0];
  const double c10 = grid.at(i, j + 1, k) * (1 - frac[0]) + grid.at(i + 1, j + 1, k) * frac[0];
  const double c01 = grid.at(i, j, k + 1) * (1 - frac[0]) + grid.at(i + 1, j, k + 1) * frac[0];
  const double c11 = grid.at(i, j + 1, k + 1) * (1 - frac[0]) + grid.at(i + 1, j + 1, k + 1) * frac[0];
  const double c0 = c00 * (1 - frac[1]) + c10 * frac[1];
  const double c1 = c01 * (1 - frac[1]) + c11 * frac[1];
  return c0 * (1 - frac[2]) + c1 * frac[2];
}

namespace {
constexpr char kSdfMagic[4] = {'S', 'D', 'F', 'G'};
constexpr std::uint32_t kSdfVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& in) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw FormatError("SDFG: truncated file");
  return v;
}
}  // namespace

void write_sdfg(const std::filesystem::path& path, const SdfGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kSdfMagic, 4);
  put(out, kSdfVersion);
  for (int r : grid.resolution()) put(out, static_cast<std::uint32_t>(r));
  for (int a = 0; a < 3; ++a) put(out, grid.box().min()[a]);
  for (int a = 0; a < 3; ++a) put(out, grid.box().max()[a]);
  std::vector<float> f(grid.values().begin(), grid.values().end());
  out.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(float)));
  if (!out) throw Error("write failed: " + path.string());
}

SdfGrid read_sdfg(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kSdfMagic, 4) != 0) throw FormatError("SDFG: bad magic");
  if (get<std::uint32_t>(in) != kSdfVersion) throw FormatError("SDFG: unsupported version");
  SdfGrid::Resolution res;
  for (auto& r : res) r = static_cast<int>(get<std::uint32_t>(in));
  Vec3 lo, hi;
  for (int a = 0; a < 3; ++a) lo[a] = get<double>(in);
  for (int a = 0; a < 3; ++a) hi[a] = get<double>(in);
  SdfGrid grid(res, Box3(lo, hi));
  std::vector<float> f(grid.size());
  if (!in.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(float)))) {
    throw FormatError("SDFG: truncated values");
  }
  std::copy(f.begin(), f.end(), grid.values().begin());
  return grid;
}

double sphere_sdf(const Vec3& p, double radius, const Vec3& center) { return (p - center).norm() - radius; }

double box_sdf(const Vec3& p, const Vec3& half_extents) {
  const Vec3 q = p.cwiseAbs() - half_extents;
  return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
}

double torus_sdf(const Vec3& p, double major_radius, double minor_radius) {
  const double ring = std::hypot(p.x(), p.y()) - major_radius;
  return std::hypot(ring, p.z()) - minor_radius;
}

}  // namespace qmcsdf
