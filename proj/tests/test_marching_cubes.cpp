#include <doctest.h>

#include "oracles.hpp"
#include "qmcsdf/marching_cubes.hpp"
#include "qmcsdf/parallel.hpp"

using namespace qmcsdf;

TEST_CASE("constant fields give nothing") {
  CHECK(marching_cubes(bake_function([](const Vec3&) { return 1.0; }, {8, 8, 8})).empty());
  CHECK(marching_cubes(bake_function([](const Vec3&) { return -1.0; }, {8, 8, 8})).empty());
  CHECK_THROWS(marching_cubes([](const Vec3&) { return 1.0; }, {1, 4, 4}));
}

TEST_CASE("single negative node") {
  SdfGrid g({3, 3, 3}, default_sdf_box());
  std::fill(g.values().begin(), g.values().end(), 1.0);
  g.at(1, 1, 1) = -1.0;
  const TriangleMesh m = marching_cubes(g);
  CHECK(m.num_triangles() == 8);
  CHECK(m.num_vertices() == 6);
  CHECK(oracle::euler_characteristic(m) == 2);
  CHECK(oracle::every_edge_shared_twice(m));
  CHECK(oracle::signed_volume(m) > 0.0);
  for (Eigen::Index v = 0; v < m.num_vertices(); ++v) CHECK(m.vertex(v).norm() == doctest::Approx(0.5));

  // flipping the field flips the orientation
  for (double& v : g.values()) v = -v;
  CHECK(oracle::signed_volume(marching_cubes(g)) < 0.0);
}

TEST_CASE("sphere extraction") {
  const SdfGrid g = bake_function([](const Vec3& p) { return sphere_sdf(p, 0.5); }, {64, 64, 64});
  const TriangleMesh m = marching_cubes(g);
  REQUIRE_FALSE(m.empty());
  const double cell = g.cell_diagonal();
  for (Eigen::Index v = 0; v < m.num_vertices(); ++v) {
    CHECK(std::abs(m.vertex(v).norm() - 0.5) <= cell);
    CHECK(std::abs(trilinear(g, m.vertex(v))) <= g.spacing().maxCoeff() * 1e-6);
  }
  CHECK(oracle::every_edge_shared_twice(m));
  CHECK(oracle::euler_characteristic(m) == 2);
  CHECK(oracle::signed_volume(m) == doctest::Approx(4.0 / 3.0 * M_PI * 0.125).epsilon(0.01));
}

TEST_CASE("watertight across resolutions") {
  for (int res : {32, 57, 96, 128}) {
    const SdfGrid s = bake_function([](const Vec3& p) { return sphere_sdf(p, 0.6, Vec3(0.05, -0.1, 0.02)); }, {res, res, res});
    const SdfGrid t = bake_function([](const Vec3& p) { return torus_sdf(p, 0.5, 0.2); }, {res, res, res});
    const TriangleMesh ms = marching_cubes(s), mt = marching_cubes(t);
    CHECK(oracle::every_edge_shared_twice(ms));
    CHECK(oracle::every_edge_shared_twice(mt));
    CHECK(oracle::euler_characteristic(ms) == 2);
    CHECK(oracle::euler_characteristic(mt) == 0);
    CHECK(oracle::signed_volume(mt) > 0.0);
  }
}

TEST_CASE("exact zeros and iso offsets") {
  // a plane through lattice nodes hits the nudge path
  const SdfGrid g = bake_function([](const Vec3& p) { return p.x(); }, {5, 5, 5});
  const TriangleMesh m = marching_cubes(g);
  for (Eigen::Index t = 0; t < m.num_triangles(); ++t) CHECK(triangle_area(m, t) > 0.0);
  const TriangleMesh shifted = marching_cubes(bake_function([](const Vec3& p) { return sphere_sdf(p, 0.5); }, {40, 40, 40}), 0.2);
  for (Eigen::Index v = 0; v < shifted.num_vertices(); ++v) CHECK(std::abs(shifted.vertex(v).norm() - 0.7) < 0.06);
}

TEST_CASE("streamed field matches the stored grid") {
  auto field = [](const Vec3& p) { return torus_sdf(p, 0.5, 0.2); };
  const Box3 box(Vec3(-0.8, -0.9, -0.4), Vec3(0.8, 0.7, 0.5));
  const SdfGrid g = bake_function(field, {30, 27, 19}, box);
  const TriangleMesh a = marching_cubes(g);
  const TriangleMesh b = marching_cubes(field, {30, 27, 19}, box);
  CHECK(a.vertices == b.vertices);
  CHECK(a.triangles == b.triangles);

  const int saved = worker_count();
  set_worker_count(3);
  const TriangleMesh c = marching_cubes(g);
  set_worker_count(saved);
  CHECK(c.vertices == a.vertices);
  CHECK(c.triangles == a.triangles);
}

TEST_CASE("welding") {
  TriangleMesh soup;
  soup.vertices.resize(6, 3);
  soup.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 1e-12;
  soup.triangles.resize(2, 3);
  soup.triangles << 0, 1, 2, 3, 4, 5;
  const TriangleMesh w = weld_vertices(soup);
  CHECK(w.num_vertices() == 4);
  CHECK(w.num_triangles() == 2);
  CHECK(w.triangles(1, 0) == 1);
  CHECK(w.triangles(1, 2) == 2);

  TriangleMesh collapsing = soup;
  collapsing.vertices.row(2) << 1e-13, 0, 0;
  CHECK(weld_vertices(collapsing).num_triangles() == 1);

  const TriangleMesh sphere = marching_cubes(bake_function([](const Vec3& p) { return sphere_sdf(p, 0.5); }, {20, 20, 20}));
  CHECK(weld_vertices(sphere).num_vertices() == sphere.num_vertices());
}
