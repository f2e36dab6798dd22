#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "qmcsdf/mesh.hpp"

namespace qmcsdf {

/// Bounding-volume hierarchy over the triangles of a mesh. Immutable once
/// built; queries take the mesh it was built from.
class Bvh {
 public:
  struct Node {
    Box3 box;
    int left = -1;   // child indices, -1 for leaves
    int right = -1;
    int first = 0;   // leaf range into triangle_order()
    int count = 0;
    bool is_leaf() const { return left < 0; }
  };

  Bvh() = default;
  explicit Bvh(const TriangleMesh& mesh, int leaf_size = 4);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<int>& triangle_order() const { return order_; }
  bool empty() const { return nodes_.empty(); }

 private:
  int build_node(const TriangleMesh& mesh, const std::vector<Box3>& boxes, const std::vector<Vec3>& centers, int first,
                 int count, int leaf_size);

  std::vector<Node> nodes_;
  std::vector<int> order_;
};

struct ClosestPoint {
  double distance = 0.0;
  Vec3 point = Vec3::Zero();
  Eigen::Index triangle = -1;
};

struct RayHit {
  double t = 0.0;
  Eigen::Index triangle = -1;
};

struct RayCrossings {
  int count = 0;
  bool grazing = false;  // some hit landed within tolerance of a triangle edge
};

/// Closest point on the triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

ClosestPoint closest_point(const Bvh& bvh, const TriangleMesh& mesh, const Vec3& p);

/// Nearest intersection with t > t_min along origin + t * dir.
std::optional<RayHit> first_hit(const Bvh& bvh, const TriangleMesh& mesh, const Vec3& origin, const Vec3& dir,
                                 double t_min = 0.0);

/// Number of triangles crossed by the half-line origin + t * dir, t > 0.
RayCrossings count_crossings(const Bvh& bvh, const TriangleMesh& mesh, const Vec3& origin, const Vec3& dir);

/// Five fixed, well-spread unit directions used for inside/outside votes.
std::span<const Vec3> parity_directions();

/// Majority vote of odd-crossing tests over `directions` (odd count required).
/// Rays that graze an edge are shifted by 1e-7 along a fixed tangent and
/// recast up to 3 times; after that they abstain.
bool ray_parity(const Bvh& bvh, const TriangleMesh& mesh, const Vec3& p, std::span<const Vec3> directions);

inline bool ray_parity(const Bvh& bvh, const TriangleMesh& mesh, const Vec3& p) {
  return ray_parity(bvh, mesh, p, parity_directions());
}

}  // namespace qmcsdf
