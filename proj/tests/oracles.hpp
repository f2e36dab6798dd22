#pragma once

// Slow reference implementations used to check the library.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qmcsdf/mesh.hpp"
#include "qmcsdf/samplers.hpp"

namespace oracle {

using qmcsdf::PointMatrix;
using qmcsdf::TriangleMesh;
using qmcsdf::Vec3;

inline Vec3 closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

// Plane projection when it falls inside, otherwise the best of the three edges.
inline double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a);
  const double n2 = n.squaredNorm();
  if (n2 > 0.0) {
    const Vec3 proj = p - n * ((p - a).dot(n) / n2);
    const bool s0 = (b - a).cross(proj - a).dot(n) >= 0.0;
    const bool s1 = (c - b).cross(proj - b).dot(n) >= 0.0;
    const bool s2 = (a - c).cross(proj - c).dot(n) >= 0.0;
    if (s0 && s1 && s2) return (p - proj).norm();
  }
  return std::min({(p - closest_on_segment(p, a, b)).norm(), (p - closest_on_segment(p, b, c)).norm(),
                   (p - closest_on_segment(p, c, a)).norm()});
}

inline double mesh_distance(const TriangleMesh& m, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < m.num_triangles(); ++t)
    best = std::min(best, point_triangle_distance(p, m.corner(t, 0), m.corner(t, 1), m.corner(t, 2)));
  return best;
}

// Plane intersection followed by an inside test on the hit point.
inline std::optional<double> ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a);
  const double denom = n.dot(d);
  if (std::abs(denom) < 1e-300) return std::nullopt;
  const double t = n.dot(a - o) / denom;
  if (!(t > 0.0)) return std::nullopt;
  const Vec3 x = o + t * d;
  const bool s0 = (b - a).cross(x - a).dot(n) >= 0.0;
  const bool s1 = (c - b).cross(x - b).dot(n) >= 0.0;
  const bool s2 = (a - c).cross(x - c).dot(n) >= 0.0;
  if (s0 && s1 && s2) return t;
  return std::nullopt;
}

inline std::optional<double> mesh_first_hit(const TriangleMesh& m, const Vec3& o, const Vec3& d) {
  std::optional<double> best;
  for (Eigen::Index t = 0; t < m.num_triangles(); ++t)
    if (auto h = ray_triangle(o, d, m.corner(t, 0), m.corner(t, 1), m.corner(t, 2)); h && (!best || *h < *best))
      best = h;
  return best;
}

// Largest gap between a generated sphere and its facets.
inline double facet_deviation(const TriangleMesh& m, const Vec3& center, double radius) {
  double dev = 0.0;
  for (Eigen::Index t = 0; t < m.num_triangles(); ++t)
    dev = std::max(dev, radius - point_triangle_distance(center, m.corner(t, 0), m.corner(t, 1), m.corner(t, 2)));
  return dev;
}

// Naive counting at every critical corner, open and closed boxes.
inline double star_discrepancy_brute(const PointMatrix& p) {
  const Eigen::Index n = p.rows();
  std::vector<double> xs{1.0}, ys{1.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    xs.push_back(p(i, 0));
    ys.push_back(p(i, 1));
  }
  double d = 0.0;
  for (double u : xs)
    for (double v : ys) {
      int open = 0, closed = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (p(i, 0) < u && p(i, 1) < v) ++open;
        if (p(i, 0) <= u && p(i, 1) <= v) ++closed;
      }
      const double vol = u * v;
      d = std::max({d, vol - static_cast<double>(open) / n, static_cast<double>(closed) / n - vol});
    }
  return d;
}

// Farthest point sampling recomputing every distance from scratch.
inline std::vector<Eigen::Index> fps_naive(const PointMatrix& c, Eigen::Index k, Eigen::Index first) {
  std::vector<Eigen::Index> chosen{first};
  while (static_cast<Eigen::Index>(chosen.size()) < k) {
    double best = -1.0;
    Eigen::Index arg = -1;
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      double dmin = std::numeric_limits<double>::infinity();
      for (Eigen::Index j : chosen) dmin = std::min(dmin, (c.row(i) - c.row(j)).norm());
      if (dmin > best) {
        best = dmin;
        arg = i;
      }
    }
    chosen.push_back(arg);
  }
  return chosen;
}

// Edge -> incident triangle count over an indexed mesh.
inline bool every_edge_shared_twice(const TriangleMesh& m) {
  std::vector<std::pair<std::pair<int, int>, int>> edges;
  for (Eigen::Index t = 0; t < m.num_triangles(); ++t)
    for (int e = 0; e < 3; ++e) {
      int a = m.triangles(t, e), b = m.triangles(t, (e + 1) % 3);
      edges.push_back({{std::min(a, b), std::max(a, b)}, 1});
    }
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j].first == edges[i].first) ++j;
    if (j - i != 2) return false;
    i = j;
  }
  return true;
}

inline long euler_characteristic(const TriangleMesh& m) {
  std::vector<std::pair<int, int>> edges;
  std::vector<int> used;
  for (Eigen::Index t = 0; t < m.num_triangles(); ++t)
    for (int e = 0; e < 3; ++e) {
      int a = m.triangles(t, e), b = m.triangles(t, (e + 1) % 3);
      edges.push_back({std::min(a, b), std::max(a, b)});
      used.push_back(a);
    }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  return static_cast<long>(used.size()) - static_cast<long>(edges.size()) + m.num_triangles();
}

inline double signed_volume(const TriangleMesh& m) {
  double v = 0.0;
  for (Eigen::Index t = 0; t < m.num_triangles(); ++t) v += m.corner(t, 0).dot(m.corner(t, 1).cross(m.corner(t, 2)));
  return v / 6.0;
}

inline std::filesystem::path temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "qmcsdf_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace oracle
