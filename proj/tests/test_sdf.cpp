#include <doctest.h>

#include "oracles.hpp"
#include "qmcsdf/errors.hpp"
#include "qmcsdf/parallel.hpp"
#include "qmcsdf/rng.hpp"
#include "qmcsdf/sdf.hpp"

using namespace qmcsdf;

namespace {

Vec3 random_in_box(Rng& rng, const Box3& box) {
  return box.min() + Vec3(uniform01(rng), uniform01(rng), uniform01(rng)).cwiseProduct(box.sizes());
}

}  // namespace

TEST_CASE("signed distance of an icosphere") {
  const TriangleMesh ico = make_icosphere(0.9, 4);
  const Bvh bvh(ico);
  const double tol = oracle::facet_deviation(ico, Vec3::Zero(), 0.9) + 1e-12;
  CHECK(std::abs(signed_distance(bvh, ico, Vec3::Zero()) + 0.9) <= tol);
  CHECK(std::abs(signed_distance(bvh, ico, Vec3(0.95, 0, 0)) - 0.05) <= tol);
  CHECK(std::abs(signed_distance(bvh, ico, ico.vertex(3))) < 1e-9);

  Rng rng(2);
  for (int i = 0; i < 300; ++i) {
    const Vec3 p = random_in_box(rng, default_sdf_box());
    CHECK(std::abs(signed_distance(bvh, ico, p) - sphere_sdf(p, 0.9)) <= tol);
  }
}

TEST_CASE("bake: corners and sign pattern") {
  const TriangleMesh ico = make_icosphere(0.9, 4);
  const Bvh bvh(ico);
  const SdfGrid g2 = bake_grid(bvh, ico, {2, 2, 2});
  REQUIRE(g2.size() == 8);
  const double tol = oracle::facet_deviation(ico, Vec3::Zero(), 0.9) + 1e-12;
  for (double v : g2.values()) CHECK(std::abs(v - (std::sqrt(3.0) - 0.9)) <= tol);
  CHECK((g2.node(1, 0, 1) - Vec3(1, -1, 1)).norm() < 1e-15);

  const TriangleMesh small = make_icosphere(0.5, 4);
  const Bvh sb(small);
  const SdfGrid g = bake_grid(sb, small, {16, 16, 16});
  const double cell = g.cell_diagonal();
  const double diag = default_sdf_box().diagonal().norm();
  for (int k = 0; k < 16; ++k)
    for (int j = 0; j < 16; ++j)
      for (int i = 0; i < 16; ++i) {
        const double r = g.node(i, j, k).norm();
        const double v = g.at(i, j, k);
        CHECK(std::isfinite(v));
        CHECK(std::abs(v) <= diag);
        if (r < 0.5 - cell) CHECK(v < 0.0);
        if (r > 0.5 + cell) CHECK(v > 0.0);
      }
}

TEST_CASE("bake is deterministic across worker counts") {
  const TriangleMesh torus = make_torus(0.5, 0.2, 32, 16);
  const Bvh bvh(torus);
  const int saved = worker_count();
  set_worker_count(1);
  const SdfGrid a = bake_grid(bvh, torus, {20, 17, 9});
  set_worker_count(4);
  const SdfGrid b = bake_grid(bvh, torus, {20, 17, 9});
  const SdfGrid c = bake_grid(bvh, torus, {20, 17, 9});
  set_worker_count(saved);
  CHECK(a.values() == b.values());
  CHECK(b.values() == c.values());
}

TEST_CASE("trilinear interpolation") {
  const Box3 box(Vec3(-1, -0.5, 0), Vec3(2, 1, 3));
  auto affine = [](const Vec3& p) { return 2 * p.x() + 3 * p.y() - p.z() + 1; };
  const SdfGrid g = bake_function(affine, {7, 5, 11}, box);
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = random_in_box(rng, box);
    CHECK(std::abs(trilinear(g, p) - affine(p)) < 1e-9);
  }
  CHECK(trilinear(g, box.max()) == doctest::Approx(affine(box.max())));

  auto bumpy = [](const Vec3& p) { return std::sin(3 * p.x()) * std::cos(2 * p.y()) + p.z() * p.z(); };
  const SdfGrid h = bake_function(bumpy, {6, 6, 6});
  CHECK(std::abs(trilinear(h, h.node(2, 3, 4)) - h.at(2, 3, 4)) < 1e-14);
  const Vec3 center = 0.5 * (h.node(1, 1, 1) + h.node(2, 2, 2));
  double mean = 0.0;
  for (int dk = 1; dk <= 2; ++dk)
    for (int dj = 1; dj <= 2; ++dj)
      for (int di = 1; di <= 2; ++di) mean += h.at(di, dj, dk) / 8.0;
  CHECK(trilinear(h, center) == doctest::Approx(mean).epsilon(1e-14));
  CHECK_THROWS_AS(trilinear(h, Vec3(1.01, 0, 0)), OutOfDomainError);
}

TEST_CASE("sdf is 1-Lipschitz and the grid keeps its sign") {
  const TriangleMesh torus = normalize_mesh(make_torus(0.5, 0.2, 48, 24)).mesh;
  const Bvh bvh(torus);
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = random_in_box(rng, default_sdf_box());
    const Vec3 q = random_in_box(rng, default_sdf_box());
    CHECK(std::abs(signed_distance(bvh, torus, p) - signed_distance(bvh, torus, q)) <= (p - q).norm() + 1e-9);
  }

  const SdfGrid g = bake_grid(bvh, torus, {48, 48, 48});
  int eligible = 0, agree = 0;
  while (eligible < 10000) {
    const Vec3 p = random_in_box(rng, default_sdf_box());
    const double s = signed_distance(bvh, torus, p);
    if (std::abs(s) <= 2.0 * g.cell_diagonal()) continue;
    ++eligible;
    if ((trilinear(g, p) < 0.0) == (s < 0.0)) ++agree;
  }
  CHECK(agree >= 9990);
}

TEST_CASE("sdfg file round trip") {
  const SdfGrid g = bake_function([](const Vec3& p) { return torus_sdf(p, 0.5, 0.2); }, {9, 8, 7});
  const auto path = oracle::temp_path("g.sdfg");
  write_sdfg(path, g);
  const SdfGrid r = read_sdfg(path);
  CHECK(r.same_lattice(g));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(r.values()[i] == static_cast<double>(static_cast<float>(g.values()[i])));
  CHECK(std::filesystem::file_size(path) == 4 + 4 + 12 + 48 + 4 * g.size());
}

TEST_CASE("analytic fields") {
  CHECK(sphere_sdf(Vec3(0, 0, 2), 0.5, Vec3(0, 0, 1)) == doctest::Approx(0.5));
  CHECK(box_sdf(Vec3(2, 0, 0), Vec3(1, 1, 1)) == doctest::Approx(1.0));
  CHECK(box_sdf(Vec3(2, 2, 1), Vec3(1, 1, 1)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(box_sdf(Vec3::Zero(), Vec3(0.4, 0.3, 0.5)) == doctest::Approx(-0.3));
  CHECK(torus_sdf(Vec3(0.5, 0, 0), 0.5, 0.2) == doctest::Approx(-0.2));
  CHECK(torus_sdf(Vec3::Zero(), 0.5, 0.2) == doctest::Approx(0.3));
}
