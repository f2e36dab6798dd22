#include "qmcsdf/mesh.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include <Eigen/Geometry>

#include "qmcsdf/errors.hpp"

namespace qmcsdf {

namespace {

int resolve_index(const std::string& token, long vertex_count, std::size_t line) {
  const std::string head = token.substr(0, token.find('/'));
  long idx = 0;
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
  if (ec != std::errc() || ptr != head.data() + head.size()) {
    throw ParseError("bad face index '" + token + "'", line);
  }
  if (idx == 0) throw ParseError("face index 0 (OBJ indices are 1-based)", line);
  const long resolved = idx > 0 ? idx - 1 : vertex_count + idx;
  if (resolved < 0 || resolved >= vertex_count) {
    throw ParseError("face index " + head + " out of range", line);
  }
  return static_cast<int>(resolved);
}

}  // namespace

TriangleMesh parse_obj(std::istream& in) {
  std::vector<Vec3> verts;
  std::vector<Eigen::Vector3i> faces;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x() >> v.y() >> v.z())) throw ParseError("vertex needs 3 coordinates", line_no);
      if (!v.allFinite()) throw ParseError("non-finite vertex", line_no);
      verts.push_back(v);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string tok;
      while (ls >> tok) poly.push_back(resolve_index(tok, static_cast<long>(verts.size()), line_no));
      if (poly.size() < 3) throw ParseError("face needs at least 3 vertices", line_no);
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) faces.emplace_back(poly[0], poly[i], poly[i + 1]);
    }
    // vn, vt, o, g, usemtl, mtllib, s: ignored
  }
  if (faces.empty()) throw EmptyMeshError("OBJ contains no faces");

  TriangleMesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(static_cast<Eigen::Index>(i)) = verts[i].transpose();
  mesh.triangles.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (std::size_t i = 0; i < faces.size(); ++i) mesh.triangles.row(static_cast<Eigen::Index>(i)) = faces[i].transpose();
  return mesh;
}

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_obj(in);
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
    out << "v " << mesh.vertices(i, 0) << ' ' << mesh.vertices(i, 1) << ' ' << mesh.vertices(i, 2) << '\n';
  }
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    out << "f " << mesh.triangles(t, 0) + 1 << ' ' << mesh.triangles(t, 1) + 1 << ' ' << mesh.triangles(t, 2) + 1 << '\n';
  }
}

void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_obj(out, mesh);
}

double triangle_area(const TriangleMesh& mesh, Eigen::Index t) {
  const Vec3 a = mesh.corner(t, 0);
  return 0.5 * (mesh.corner(t, 1) - a).cross(mesh.corner(t, 2) - a).norm();
}

double surface_area(const TriangleMesh& mesh) {
  double total = 0.0;
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) total += triangle_area(mesh, t);
  return total;
}

Vec3 area_centroid(const TriangleMesh& mesh) {
  Vec3 acc = Vec3::Zero();
  double total = 0.0;
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    const double a = triangle_area(mesh, t);
    acc += a * (mesh.corner(t, 0) + mesh.corner(t, 1) + mesh.corner(t, 2)) / 3.0;
    total += a;
  }
  if (!(total > 0.0)) throw DegenerateMeshError("mesh has zero surface area");
  return acc / total;
}

std::vector<bool> degenerate_triangles(const TriangleMesh& mesh, double min_area) {
  std::vector<bool> flags(static_cast<std::size_t>(mesh.num_triangles()));
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) flags[static_cast<std::size_t>(t)] = triangle_area(mesh, t) <= min_area;
  return flags;
}

Box3 bounding_box(const TriangleMesh& mesh) {
  Box3 box;
  for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) box.extend(mesh.vertex(i));
  return box;
}

Normalization normalize_mesh(const TriangleMesh& mesh) {
  if (mesh.empty()) throw EmptyMeshError("cannot normalize an empty mesh");
  const Vec3 centroid = area_centroid(mesh);
  double max_norm = 0.0;
  for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) max_norm = std::max(max_norm, (mesh.vertex(i) - centroid).norm());
  if (!(max_norm > 0.0)) throw DegenerateMeshError("all vertices coincide with the centroid");

  Normalization out;
  out.scale = 1.0 / max_norm;
  out.offset = -centroid;
  out.mesh.triangles = mesh.triangles;
  out.mesh.vertices = (mesh.vertices.rowwise() + out.offset.transpose()) * out.scale;
  return out;
}

TriangleMesh make_icosphere(double radius, int subdivisions, const Vec3& center) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
                             {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1},  {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<Eigen::Vector3i> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
                                        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
                                        {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back((verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)]).normalized());
      const int id = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Eigen::Vector3i> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.emplace_back(f[0], ab, ca);
      next.emplace_back(f[1], bc, ab);
      next.emplace_back(f[2], ca, bc);
      next.emplace_back(ab, bc, ca);
    }
    faces = std::move(next);
  }
  TriangleMesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(static_cast<Eigen::Index>(i)) = (center + radius * verts[i]).transpose();
  mesh.triangles.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (std::size_t i = 0; i < faces.size(); ++i) mesh.triangles.row(static_cast<Eigen::Index>(i)) = faces[i].transpose();
  return mesh;
}

TriangleMesh make_box(const Vec3& lo, const Vec3& hi) {
  TriangleMesh mesh;
  mesh.vertices.resize(8, 3);
  for (int i = 0; i < 8; ++i) {
    mesh.vertices.row(i) << ((i & 1) ? hi.x() : lo.x()), ((i & 2) ? hi.y() : lo.y()), ((i & 4) ? hi.z() : lo.z());
  }
  mesh.triangles.resize(12, 3);
  mesh.triangles << 0, 2, 3, 0, 3, 1,  // z = lo
      4, 5, 7, 4, 7, 6,                // z = hi
      0, 1, 5, 0, 5, 4,                // y = lo
      2, 6, 7, 2, 7, 3,                // y = hi
      0, 4, 6, 0, 6, 2,                // x = lo
      1, 3, 7, 1, 7, 5;                // x = hi
  return mesh;
}

TriangleMesh make_torus(double major_radius, double minor_radius, int major_segments, int minor_segments) {
  TriangleMesh mesh;
  mesh.vertices.resize(major_segments * minor_segments, 3);
  mesh.triangles.resize(2 * major_segments * minor_segments, 3);
  const double two_pi = 2.0 * M_PI;
  for (int i = 0; i < major_segments; ++i) {
    const double u = two_pi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double v = two_pi * j / minor_segments;
      const double ring = major_radius + minor_radius * std::cos(v);
      mesh.vertices.row(i * minor_segments + j) << ring * std::cos(u), ring * std::sin(u), minor_radius * std::sin(v);
    }
  }
  int t = 0;
  for (int i = 0; i < major_segments; ++i) {
    const int i1 = (i + 1) % major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const int j1 = (j + 1) % minor_segments;
      const int a = i * minor_segments + j, b = i1 * minor_segments + j;
      const int c = i1 * minor_segments + j1, d = i * minor_segments + j1;
      mesh.triangles.row(t++) << a, b, c;
      mesh.triangles.row(t++) << a, c, d;
    }
  }
  return mesh;
}

}  // namespace qmcsdf
