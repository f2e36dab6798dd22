#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <vector>

#include "qmcsdf/bvh.hpp"

namespace qmcsdf {

/// Signed distance: closest-point distance, negative where the parity vote
/// says the point is inside.
double signed_distance(const Bvh& bvh, const TriangleMesh& mesh, const Vec3& p);

/// Regular lattice of SDF samples over an axis-aligned box. Nodes include the
/// box corners; values are stored x-fastest.
class SdfGrid {
 public:
  using Resolution = std::array<int, 3>;

  SdfGrid() = default;
  SdfGrid(const Resolution& resolution, const Box3& box);

  const Resolution& resolution() const { return resolution_; }
  const Box3& box() const { return box_; }
  Vec3 spacing() const;
  double cell_diagonal() const { return spacing().norm(); }
  std::size_t size() const { return values_.size(); }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(resolution_[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(resolution_[1]) * static_cast<std::size_t>(k));
  }
  Vec3 node(int i, int j, int k) const;
  double at(int i, int j, int k) const { return values_[index(i, j, k)]; }
  double& at(int i, int j, int k) { return values_[index(i, j, k)]; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool same_lattice(const SdfGrid& other) const;

 private:
  Resolution resolution_{0, 0, 0};
  Box3 box_;
  std::vector<double> values_;
};

inline Box3 default_sdf_box() { return Box3(Vec3::Constant(-1.0), Vec3::Constant(1.0)); }

/// Bakes the mesh SDF at every node; parallel over z-slabs, output independent
/// of the worker count.
SdfGrid bake_grid(const Bvh& bvh, const TriangleMesh& mesh, const SdfGrid::Resolution& resolution,
                  const Box3& box = default_sdf_box());

/// Same lattice, values from an arbitrary field.
SdfGrid bake_function(const std::function<double(const Vec3&)>& field, const SdfGrid::Resolution& resolution,
                      const Box3& box = default_sdf_box());

/// Trilinear blend of the 8 enclosing nodes; throws OutOfDomainError outside the box.
double trilinear(const SdfGrid& grid, const Vec3& p);

/// Binary layout: "SDFG", u32 version, 3 x u32 resolution, 6 x f64 box
/// (min xyz, max xyz), then f32 values, all little-endian, x-fastest.
void write_sdfg(const std::filesystem::path& path, const SdfGrid& grid);
SdfGrid read_sdfg(const std::filesystem::path& path);

// Analytic signed distance fields used as regression targets and oracles.
double sphere_sdf(const Vec3& p, double radius, const Vec3& center = Vec3::Zero());
double box_sdf(const Vec3& p, const Vec3& half_extents);
/// Torus around the z axis.
double torus_sdf(const Vec3& p, double major_radius, double minor_radius);

}  // namespace qmcsdf
