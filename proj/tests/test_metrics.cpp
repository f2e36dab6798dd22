#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "qmcsdf/errors.hpp"
#include "qmcsdf/metrics.hpp"
#include "qmcsdf/rng.hpp"

using namespace qmcsdf;

namespace {

PointMatrix cloud(Rng& rng, Eigen::Index n) {
  PointMatrix p(n, 3);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = uniform01(rng);
  return p;
}

double emd_by_permutation(const PointMatrix& a, const PointMatrix& b) {
  std::vector<int> perm(static_cast<std::size_t>(a.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) c += (a.row(i) - b.row(perm[static_cast<std::size_t>(i)])).norm();
    best = std::min(best, c / static_cast<double>(a.rows()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("surface sampling") {
  TriangleMesh tri;
  tri.vertices.resize(3, 3);
  tri.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  tri.triangles.resize(1, 3);
  tri.triangles << 0, 1, 2;
  const PointMatrix p = sample_surface(tri, 2000, 1);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    CHECK(p(i, 0) >= 0.0);
    CHECK(p(i, 1) >= 0.0);
    CHECK(p(i, 0) + p(i, 1) <= 1.0 + 1e-15);
    CHECK(p(i, 2) == 0.0);
  }
  CHECK(sample_surface(tri, 100, 1) == p.topRows(100));

  TriangleMesh two;
  two.vertices.resize(6, 3);
  two.vertices << 0, 0, 0, 1, 0, 0, 0, 2, 0, 5, 0, 0, 8, 0, 0, 5, 2, 0;
  two.triangles.resize(2, 3);
  two.triangles << 0, 1, 2, 3, 4, 5;
  const PointMatrix q = sample_surface(two, 10000, 2);
  const double share = (q.col(0).array() >= 5.0).cast<double>().mean();
  CHECK(std::abs(share - 0.75) <= 0.03);

  const TriangleMesh ball = make_icosphere(1.0, 4);
  const double dev = oracle::facet_deviation(ball, Vec3::Zero(), 1.0);
  const PointMatrix s = sample_surface(ball, 10000, 3);
  CHECK(s.rowwise().norm().mean() <= 1.0);
  CHECK(s.rowwise().norm().mean() >= 1.0 - dev);
  CHECK(s.colwise().mean().norm() < 0.03);

  CHECK_THROWS_AS(sample_surface(TriangleMesh{}, 10, 1), EmptyMeshError);
  TriangleMesh flat = tri;
  flat.vertices.row(2) << 2, 0, 0;
  CHECK_THROWS_AS(sample_surface(flat, 10, 1), DegenerateMeshError);
}

TEST_CASE("chamfer") {
  PointMatrix a(1, 3), b(1, 3);
  a << 0, 0, 0;
  b << 1, 0, 0;
  CHECK(chamfer(a, b) == 2.0);
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const PointMatrix x = cloud(rng, 128), y = cloud(rng, 97 + t);
    CHECK(std::abs(chamfer(x, y) - chamfer_brute_force(x, y)) < 1e-9);
    CHECK(std::abs(chamfer(x, y) - chamfer(y, x)) < 1e-9);
    const Eigen::RowVector3d shift(3.0, -1.5, 0.25);
    CHECK(std::abs(chamfer(x.rowwise() + shift, y.rowwise() + shift) - chamfer(x, y)) < 1e-9);
    CHECK(chamfer(x, x) == 0.0);
  }
  // duplicates and clustered points stress the tree splits
  PointMatrix dup(50, 3);
  for (int i = 0; i < 50; ++i) dup.row(i) << (i % 3) * 0.5, 0.0, (i % 2);
  const PointMatrix probe = cloud(rng, 64);
  CHECK(std::abs(chamfer(dup, probe) - chamfer_brute_force(dup, probe)) < 1e-9);
  CHECK_THROWS(chamfer(PointMatrix(0, 3), probe));

  const KdTree tree(probe);
  for (int i = 0; i < 100; ++i) {
    const Vec3 q(uniform01(rng), uniform01(rng), uniform01(rng));
    double best = 1e9;
    for (Eigen::Index j = 0; j < probe.rows(); ++j) best = std::min(best, (probe.row(j).transpose() - q).squaredNorm());
    CHECK(tree.nearest(q).first == best);
  }
}

TEST_CASE("exact emd") {
  Rng rng(6);
  const PointMatrix x = cloud(rng, 30);
  CHECK(emd_exact(x, x) == 0.0);

  PointMatrix a(2, 3), b(2, 3);
  a << 0, 0, 0, 1, 0, 0;
  b << 2, 0, 0, 3, 0, 0;
  CHECK(emd_exact(a, b) == doctest::Approx(2.0));
  b << 0, 1, 0, 1, 1, 0;
  CHECK(emd_exact(a, b) == doctest::Approx(1.0));

  for (int t = 0; t < 5; ++t) {
    const PointMatrix p = cloud(rng, 8), q = cloud(rng, 8);
    CHECK(std::abs(emd_exact(p, q) - emd_by_permutation(p, q)) < 1e-9);
  }
  for (int t = 0; t < 50; ++t) {
    const PointMatrix p = cloud(rng, 16), q = cloud(rng, 16), r = cloud(rng, 16);
    CHECK(emd_exact(p, r) <= emd_exact(p, q) + emd_exact(q, r) + 1e-12);
    CHECK(std::abs(emd_exact(p, q) - emd_exact(q, p)) < 1e-12);
  }
  CHECK_THROWS(emd_exact(cloud(rng, 4), cloud(rng, 5)));
  CHECK_THROWS(emd_exact(cloud(rng, 513), cloud(rng, 513)));

  Eigen::MatrixXd cost(3, 3);
  cost << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const auto assign = optimal_assignment(cost);
  double total = 0.0;
  for (Eigen::Index i = 0; i < 3; ++i) total += cost(i, assign[static_cast<std::size_t>(i)]);
  CHECK(total == 5.0);
}

TEST_CASE("entropic emd") {
  Rng rng(7);
  const PointMatrix p = cloud(rng, 64), q = cloud(rng, 64);
  const double exact = emd_exact(p, q);
  const EntropicResult r = emd_entropic(p, q);
  CHECK(r.converged);
  CHECK(std::abs(r.value - exact) / exact < 0.05);
  CHECK(r.value >= exact - 1e-3);
  const EntropicResult swapped = emd_entropic(q, p);
  CHECK(std::abs(r.value - swapped.value) < 1e-9);

  const PointMatrix x = cloud(rng, 32);
  for (double reg : {1e-1, 1e-2, 1e-3}) CHECK(emd_entropic(x, x, reg).value <= reg * std::log(32.0));

  const EntropicResult capped = emd_entropic(p, q, 1e-3, 3, 1e-12);
  CHECK_FALSE(capped.converged);
  CHECK(capped.marginal_error > 1e-12);
  CHECK_THROWS(emd_entropic(p, q, 0.0));
  CHECK_THROWS(emd_entropic(p, cloud(rng, 63)));
}

TEST_CASE("iou") {
  const SdfGrid a = bake_function([](const Vec3& p) { return sphere_sdf(p, 0.5); }, {64, 64, 64});
  const SdfGrid b = bake_function([](const Vec3& p) { return sphere_sdf(p, 0.4); }, {64, 64, 64});
  CHECK(iou(a, a) == 1.0);
  CHECK(std::abs(iou(a, b) - 0.512) <= 0.05 * 0.512);
  const SdfGrid left = bake_function([](const Vec3& p) { return sphere_sdf(p, 0.3, Vec3(-0.5, 0, 0)); }, {64, 64, 64});
  const SdfGrid right = bake_function([](const Vec3& p) { return sphere_sdf(p, 0.3, Vec3(0.5, 0, 0)); }, {64, 64, 64});
  CHECK(iou(left, right) == 0.0);
  const SdfGrid empty = bake_function([](const Vec3&) { return 1.0; }, {64, 64, 64});
  CHECK(iou(empty, empty) == 1.0);
  CHECK(iou(a, empty) == 0.0);
  CHECK_THROWS(iou(a, bake_function([](const Vec3&) { return 1.0; }, {32, 32, 32})));
}
