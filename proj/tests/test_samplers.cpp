#include <doctest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "qmcsdf/samplers.hpp"

using namespace qmcsdf;

namespace {

bool rows_distinct(const PointMatrix& p) {
  std::set<std::vector<double>> seen;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index c = 0; c < p.cols(); ++c) row.push_back(p(i, c));
    if (!seen.insert(row).second) return false;
  }
  return true;
}

bool in_unit_cube(const PointMatrix& p) { return (p.array() >= 0.0).all() && (p.array() < 1.0).all(); }

}  // namespace

TEST_CASE("random sampler") {
  CHECK_THROWS(gen_random(0, 2, 1));
  const PointSet a = gen_random(500, 3, 42);
  const PointSet b = gen_random(500, 3, 42);
  const PointSet c = gen_random(500, 3, 43);
  CHECK(a.points == b.points);
  CHECK(a.points != c.points);
  CHECK(in_unit_cube(a.points));
  const PointSet big = gen_random(1000000, 3, 9);
  for (int d = 0; d < 3; ++d) CHECK(std::abs(big.points.col(d).mean() - 0.5) < 0.002);
}

TEST_CASE("grid sampler") {
  const PointSet g = gen_grid(2, 2);
  PointMatrix expected(4, 2);
  expected << 0.25, 0.25, 0.75, 0.25, 0.25, 0.75, 0.75, 0.75;
  CHECK(g.points == expected);
  CHECK(gen_grid(256, 2).size() == 65536);
  CHECK_THROWS(gen_grid(1, 2));

  const PointSet g3 = gen_grid(7, 3);
  CHECK(g3.size() == 343);
  double min_d = 1e9;
  for (Eigen::Index i = 0; i < g3.size(); ++i)
    for (Eigen::Index j = i + 1; j < g3.size(); ++j) min_d = std::min(min_d, (g3.points.row(i) - g3.points.row(j)).norm());
  CHECK(min_d == doctest::Approx(1.0 / 7.0));
  CHECK(rows_distinct(gen_grid(1024, 2).points));
}

TEST_CASE("jitter sampler") {
  CHECK(gen_jitter(16, 2, 0.0, 1).points == gen_grid(16, 2).points);
  const PointSet j = gen_jitter(256, 2, 0.01, 7);
  const PointSet g = gen_grid(256, 2);
  CHECK(in_unit_cube(j.points));
  CHECK(j.points.maxCoeff() <= 1.0 - 1e-9);
  std::vector<double> d;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    for (int c = 0; c < 2; ++c) {
      const double x = g.points(i, c);
      if (x > 0.1 && x < 0.9) d.push_back(j.points(i, c) - x);
    }
  double mean = 0.0, sq = 0.0;
  for (double v : d) mean += v;
  mean /= static_cast<double>(d.size());
  for (double v : d) sq += (v - mean) * (v - mean);
  const double sd = std::sqrt(sq / static_cast<double>(d.size() - 1));
  CHECK(std::abs(sd - 0.01) < 0.0005);

  const PointSet wide = gen_jitter(8, 3, 0.5, 3);
  CHECK(wide.points.minCoeff() >= 0.0);
  CHECK(wide.points.maxCoeff() <= 1.0 - 1e-9);
  CHECK(gen_jitter(8, 3, 0.5, 3).points == wide.points);
}

TEST_CASE("sobol sampler") {
  const PointSet s = gen_sobol(4, 2);
  PointMatrix expected(4, 2);
  expected << 0, 0, 0.5, 0.5, 0.75, 0.25, 0.25, 0.75;
  CHECK(s.points == expected);
  CHECK(gen_sobol(1, 3).points.isZero());

  const PointSet net = gen_sobol(1024, 2);
  for (int a = 0; a <= 10; ++a) {
    const int nx = 1 << a, ny = 1 << (10 - a);
    std::vector<int> count(static_cast<std::size_t>(nx * ny), 0);
    for (Eigen::Index i = 0; i < net.size(); ++i) {
      const int cx = static_cast<int>(net.points(i, 0) * nx);
      const int cy = static_cast<int>(net.points(i, 1) * ny);
      ++count[static_cast<std::size_t>(cy * nx + cx)];
    }
    CHECK(std::all_of(count.begin(), count.end(), [](int c) { return c == 1; }));
  }
  const PointSet s3 = gen_sobol(1 << 16, 3);
  CHECK(in_unit_cube(s3.points));
  CHECK(rows_distinct(s3.points));
  CHECK(gen_sobol(64, 3).points == s3.points.topRows(64));
}

TEST_CASE("halton sampler") {
  const PointSet h = gen_halton(3, 2);
  CHECK(h.points(0, 0) == doctest::Approx(0.5));
  CHECK(h.points(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(h.points(1, 0) == doctest::Approx(0.25));
  CHECK(h.points(1, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(h.points(2, 0) == doctest::Approx(0.75));
  CHECK(h.points(2, 1) == doctest::Approx(1.0 / 9.0));
  CHECK(gen_halton(5, 1).points(4, 0) == doctest::Approx(0.625));
  CHECK(radical_inverse(5, 2) == doctest::Approx(0.625));
  CHECK(radical_inverse(7, 5) == doctest::Approx(2.0 / 5.0 + 1.0 / 25.0));
  const PointSet big = gen_halton(100000, 3);
  CHECK((big.points.array() > 0.0).all());
  CHECK((big.points.array() < 1.0).all());
  CHECK(rows_distinct(big.points));
}

TEST_CASE("map to box") {
  const PointSet u = gen_random(20, 3, 1);
  CHECK(map_to_box(u.points, Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones()) == u.points);
  PointMatrix c(1, 3);
  c << 0.5, 0.5, 0.5;
  CHECK(map_to_box(c, Eigen::Vector3d::Constant(-1), Eigen::Vector3d::Constant(1)).norm() < 1e-15);
  const double below_one = std::nextafter(1.0, 0.0);
  c << 0.25, 0.0, below_one;
  const PointMatrix m = map_to_box(c, Eigen::Vector3d::Zero(), Eigen::Vector3d(4, 2, 2));
  CHECK(m(0, 0) == doctest::Approx(1.0));
  CHECK(m(0, 1) == 0.0);
  CHECK(m(0, 2) < 2.0);
  CHECK(m(0, 2) == doctest::Approx(2.0));
  CHECK_THROWS(map_to_box(c, Eigen::Vector2d::Zero(), Eigen::Vector2d::Ones()));
}

TEST_CASE("pset file round trip") {
  const PointSet s = gen_jitter(9, 3, 0.05, 12);
  const auto path = oracle::temp_path("p.pset");
  write_pset(path, s.points);
  CHECK(read_pset(path) == s.points);
  CHECK(std::filesystem::file_size(path) == 4 + 4 + 8 + 8 * static_cast<std::uintmax_t>(s.points.size()));
  std::ostringstream csv;
  write_points_csv(csv, gen_grid(2, 2).points);
  CHECK(csv.str().find("0.75") != std::string::npos);
}
