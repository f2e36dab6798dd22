#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace qmcsdf {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Box3 = Eigen::AlignedBox3d;

using VertexMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using FaceMatrix = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Triangle soup with shared vertex indices.
struct TriangleMesh {
  VertexMatrix vertices;
  FaceMatrix triangles;

  Eigen::Index num_vertices() const { return vertices.rows(); }
  Eigen::Index num_triangles() const { return triangles.rows(); }
  bool empty() const { return triangles.rows() == 0; }

  Vec3 vertex(Eigen::Index i) const { return vertices.row(i).transpose(); }
  Vec3 corner(Eigen::Index t, int c) const { return vertex(triangles(t, c)); }
};

/// Parses Wavefront OBJ `v`/`f` records; n-gons are fan triangulated and
/// negative indices resolve relative to the current vertex count.
TriangleMesh parse_obj(std::istream& in);
TriangleMesh load_obj(const std::filesystem::path& path);
void write_obj(std::ostream& out, const TriangleMesh& mesh);
void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

double triangle_area(const TriangleMesh& mesh, Eigen::Index t);
double surface_area(const TriangleMesh& mesh);

/// Area-weighted surface centroid.
Vec3 area_centroid(const TriangleMesh& mesh);

/// Flags triangles whose area is at most `min_area`.
std::vector<bool> degenerate_triangles(const TriangleMesh& mesh, double min_area = 1e-12);

Box3 bounding_box(const TriangleMesh& mesh);

struct Normalization {
  TriangleMesh mesh;
  double scale = 1.0;
  Vec3 offset = Vec3::Zero();  // normalized = scale * (original + offset)
};

/// Moves the area centroid to the origin and scales into the unit sphere.
Normalization normalize_mesh(const TriangleMesh& mesh);

// Procedural test shapes; all are closed and outward oriented.
TriangleMesh make_icosphere(double radius, int subdivisions, const Vec3& center = Vec3::Zero());
TriangleMesh make_box(const Vec3& lo, const Vec3& hi);
TriangleMesh make_torus(double major_radius, double minor_radius, int major_segments, int minor_segments);

}  // namespace qmcsdf
