#include "qmcsdf/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qmcsdf {

namespace {

constexpr double kEdgeTol = 1e-9;

double box_sq_distance(const Box3& box, const Vec3& p) {
  const Vec3 d = (box.min() - p).cwiseMax(p - box.max()).cwiseMax(0.0);
  return d.squaredNorm();
}

// Slab test; returns entry distance or nullopt.
std::optional<double> ray_box(const Box3& box, const Vec3& origin, const Vec3& inv_dir, double t_max) {
  double t0 = 0.0, t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    double lo = (box.min()[a] - origin[a]) * inv_dir[a];
    double hi = (box.max()[a] - origin[a]) * inv_dir[a];
    if (std::isnan(lo) || std::isnan(hi)) {
      // dir component is zero and origin lies on the slab plane
      if (origin[a] < box.min()[a] || origin[a] > box.max()[a]) return std::nullopt;
      continue;
    }
    if (lo > hi) std::swap(lo, hi);
    t0 = std::max(t0, lo);
    t1 = std::min(t1, hi);
    if (t0 > t1 * (1.0 + 1e-12) + 1e-12) return std::nullopt;
  }
  return t0;
}

struct TriHit {
  bool hit = false;
  bool grazing = false;
  double t = 0.0;
};

// Moller-Trumbore with edge-proximity flag.
TriHit intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b, const Vec3& c) {
  TriHit out;
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 pv = dir.cross(e2);
  const double det = e1.dot(pv);
  const double scale = e1.norm() * e2.norm();
  if (std::abs(det) <= 1e-14 * scale) {
    // parallel: coplanar rays through the triangle are ambiguous
    const Vec3 n = e1.cross(e2);
    const double nn = n.norm();
    if (nn > 0.0 && std::abs((origin - a).dot(n)) / nn < kEdgeTol) out.grazing = true;
    return out;
  }
  const double inv = 1.0 / det;
  const Vec3 tv = origin - a;
  const double u = tv.dot(pv) * inv;
  if (u < -kEdgeTol || u > 1.0 + kEdgeTol) return out;
  const Vec3 qv = tv.cross(e1);
  const double v = dir.dot(qv) * inv;
  if (v < -kEdgeTol || u + v > 1.0 + kEdgeTol) return out;
  const double t = e2.dot(qv) * inv;
  if (t <= 0.0) return out;
  out.hit = true;
  out.t = t;
  out.grazing = u < kEdgeTol || v < kEdgeTol || u + v > 1.0 - kEdgeTol;
  return out;
}

}  // namespace

Bvh::Bvh(const TriangleMesh& mesh, int leaf_size) {
  const int n = static_cast<int>(mesh.num_triangles());
  if (n == 0) return;
  std::vector<Box3> boxes(static_cast<std::size_t>(n));
  std::vector<Vec3> centers(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    Box3 b;
    for (int c = 0; c < 3; ++c) b.extend(mesh.corner(t, c));
    boxes[static_cast<std::size_t>(t)] = b;
    centers[static_cast<std::size_t>(t)] = b.center();
  }
  order_.resize(static_cast<std::size_t>(n));
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(static_cast<std::size_t>(2 * n));
  build_node(mesh, boxes, centers, 0, n, std::max(1, leaf_size));
}

int Bvh::build_node(const TriangleMesh& mesh, const std::vector<Box3>& boxes, const std::vector<Vec3>& centers,
                    int first, int count, int leaf_size) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Box3 box, cbox;
  for (int i = first; i < first + count; ++i) {
    const auto t = static_cast<std::size_t>(order_[static_cast<std::size_t>(i)]);
    box.extend(boxes[t]);
    cbox.extend(centers[t]);
  }
  nodes_[static_cast<std::size_t>(id)].box = box;
  if (count <= leaf_size) {
    nodes_[static_cast<std::size_t>(id)].first = first;
    nodes_[static_cast<std::size_t>(id)].count = count;
    return id;
  }
  int axis = 0;
  cbox.sizes().maxCoeff(&axis);
  const int mid = first + count / 2;
  auto begin = order_.begin() + first;
  // stable tie-break on triangle index keeps the tree deterministic
  std::nth_element(begin, order_.begin() + mid, begin + count, [&](int a, int b) {
    const double ca = centers[static_cast<std::size_t>(a)][axis], cb = centers[static_cast<std::size_t>(b)][axis];
    return ca < cb || (ca == cb && a < b);
  });
  const int left = build_node(mesh, boxes, centers, first, mid - first, leaf_size);
  const int right = build_node(mesh, boxes, centers, mid, first + count - mid, leaf_size);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Voronoi-region walk (Ericson, Real-Time Collision Detection 5.1.5)
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const double denom = va + vb + vc;
  if (!(std::abs(denom) > 0.0)) {
    // degenerate triangle: fall back to the closest of its edges
    auto seg = [&](const Vec3& s, const Vec3& e) {
      const Vec3 d = e - s;
      const double len2 = d.squaredNorm();
      const double t = len2 > 0.0 ? std::clamp((p - s).dot(d) / len2, 0.0, 1.0) : 0.0;
      return Vec3(s + t * d);
    };
    Vec3 best = seg(a, b);
    for (const Vec3& q : {seg(b, c), seg(c, a)}) {
      if ((q - p).squaredNorm() < (best - p).squaredNorm()) best = q;
    }
    return best;
  }
  const double v = vb / denom, w = vc / denom;
  return a + ab * v + ac * w;
}

ClosestPoint closest_point(const Bvh& bvh, const TriangleMesh& mesh, const Vec3& p) {
  if (bvh.empty()) throw std::invalid_argument("closest_point: empty mesh");
  ClosestPoint best;
  double best_sq = std::numeric_limits<double>::infinity();
  const auto& nodes = bvh.nodes();
  const auto& order = bvh.triangle_order();
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const auto& node = nodes[static_cast<std::size_t>(stack[--top])];
    if (box_sq_distance(node.box, p) > best_sq) continue;
    if (node.is_leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int t = order[static_cast<std::size_t>(i)];
        const Vec3 q = closest_point_on_triangle(p, mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2));
        const double d = (q - p).squaredNorm();
        if (d < best_sq || (d == best_sq && t < best.triangle)) {
          best_sq = d;
          best.point = q;
          best.triangle = t;
        }
      }
      continue;
    }
    const double dl = box_sq_distance(nodes[static_cast<std::size_t>(node.left)].box, p);
    const double dr = box_sq_distance(nodes[static_cast<std::size_t>(node.right)].box, p);
    // push the farther child first so the nearer one is popped next
    if (dl < dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  best.distance = std::sqrt(best_sq);
  return best;
}

std::optional<RayHit> first_hit(const Bvh& bvh, const TriangleMesh& mesh, const Vec3& origin, const Vec3& dir,
                                double t_min) {
  if (bvh.empty()) return std::nullopt;
  const Vec3 inv_dir = dir.cwiseInverse();
  std::optional<RayHit> best;
  double t_best = std::numeric_limits<double>::infinity();
  const auto& nodes = bvh.nodes();
  const auto& order = bvh.triangle_order();
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const auto& node = nodes[static_cast<std::size_t>(stack[--top])];
    if (!ray_box(node.box, origin, inv_dir, t_best)) continue;
    if (node.is_leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int t = order[static_cast<std::size_t>(i)];
        const TriHit h = intersect_triangle(origin, dir, mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2));
        if (h.hit && h.t > t_min && (h.t < t_best || (h.t == t_best && best && t < best->triangle))) {
          t_best = h.t;
          best = RayHit{h.t, t};
        }
      }
      continue;
    }
    stack[top++] = node.left;
    stack[top++] = node.right;
  }
  return best;
}

RayCrossings count_crossings(const Bvh& bvh, const TriangleMesh& mesh, const Vec3& origin, const Vec3& dir) {
  RayCrossings out;
  if (bvh.empty()) return out;
  const Vec3 inv_dir = dir.cwiseInverse();
  const auto& nodes = bvh.nodes();
  const auto& order = bvh.triangle_order();
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  const double inf = std::numeric_limits<double>::infinity();
  while (top > 0) {
    const auto& node = nodes[static_cast<std::size_t>(stack[--top])];
    if (!ray_box(node.box, origin, inv_dir, inf)) continue;
    if (node.is_leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int t = order[static_cast<std::size_t>(i)];
        const TriHit h = intersect_triangle(origin, dir, mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2));
        if (h.hit) ++out.count;
        out.grazing = out.grazing || h.grazing;
      }
      continue;
    }
    stack[top++] = node.left;
    stack[top++] = node.right;
  }
  return out;
}

std::span<const Vec3> parity_directions() {
  static const std::array<Vec3, 5> dirs = [] {
    std::array<Vec3, 5> d = {Vec3(0.5376671395, 1.8338850145, -2.2588468610), Vec3(0.8621733203, 0.3187652398, -1.3076882963),
                             Vec3(-0.4335920223, 0.3426244665, 3.5783969397), Vec3(2.7694370298, -1.3498869401, 3.0349234663),
                             Vec3(0.7254042249, -0.0630548731, 0.7147429039)};
    for (auto& v : d) v.normalize();
    return d;
  }();
  return dirs;
}

bool ray_parity(const Bvh& bvh, const TriangleMesh& mesh, const Vec3& p, std::span<const Vec3> directions) {
  if (directions.size() % 2 == 0) throw std::invalid_argument("ray_parity: direction count must be odd");
  int inside = 0, outside = 0;
  for (const Vec3& dir : directions) {
    Vec3 helper = std::abs(dir.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 tangent = dir.cross(helper).normalized();
    Vec3 origin = p;
    for (int attempt = 0; attempt <= 3; ++attempt) {
      const RayCrossings c = count_crossings(bvh, mesh, origin, dir);
      if (!c.grazing) {
        (c.count % 2 == 1 ? inside : outside) += 1;
        break;
      }
      origin += 1e-7 * tangent;
    }
  }
  // ties (every ray abstained, or an even split of survivors) resolve to outside
  return inside > outside;
}

}  // namespace qmcsdf
