#include <doctest.h>

#include <numeric>
#include <set>

#include "oracles.hpp"
#include "qmcsdf/errors.hpp"
#include "qmcsdf/rng.hpp"
#include "qmcsdf/subset.hpp"

using namespace qmcsdf;

namespace {

std::uint64_t seed_with_first(Eigen::Index n, Eigen::Index first) {
  for (std::uint64_t s = 0;; ++s)
    if (fps_first_index(n, s) == first) return s;
}

}  // namespace

TEST_CASE("fps: unit square corners") {
  PointMatrix c(4, 2);
  c << 0, 0, 0, 1, 1, 0, 1, 1;
  const IndexList order = fps_select(c, 4, seed_with_first(4, 0));
  CHECK(order == IndexList{0, 3, 1, 2});
}

TEST_CASE("fps: points on a line") {
  PointMatrix c(4, 3);
  c.setZero();
  c.col(0) << 0, 0.1, 0.5, 1;
  const FpsResult r = fps_select_from(c, 4, 0);
  CHECK(r.indices == IndexList{0, 3, 2, 1});
  CHECK(std::isinf(r.insertion_radius[0]));
  CHECK(r.insertion_radius[1] == doctest::Approx(1.0));
  CHECK(r.insertion_radius[2] == doctest::Approx(0.5));
  CHECK(r.insertion_radius[3] == doctest::Approx(0.1));
}

TEST_CASE("fps: permutation, radii and naive agreement") {
  for (int dim : {2, 3, 5}) {
    Rng rng(10 + dim);
    PointMatrix cand(300, dim);
    for (Eigen::Index i = 0; i < cand.size(); ++i) cand.data()[i] = uniform01(rng);
    const FpsResult full = fps_select_from(cand, cand.rows(), 17);
    std::vector<Eigen::Index> sorted = full.indices;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Eigen::Index> all(static_cast<std::size_t>(cand.rows()));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    CHECK(sorted == all);
    for (std::size_t i = 2; i < full.insertion_radius.size(); ++i)
      CHECK(full.insertion_radius[i] <= full.insertion_radius[i - 1]);
    CHECK(fps_select_from(cand, 60, 17).indices == oracle::fps_naive(cand, 60, 17));
  }
}

TEST_CASE("fps: covering radius bound") {
  const PointMatrix c = gen_random(500, 2, 3).points;
  const FpsResult r = fps_select_from(c, 40, 5);
  const std::set<Eigen::Index> chosen(r.indices.begin(), r.indices.end());
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    if (chosen.count(i)) continue;
    double d = 1e9;
    for (Eigen::Index j : r.indices) d = std::min(d, (c.row(i) - c.row(j)).norm());
    CHECK(d <= r.insertion_radius.back() + 1e-15);
  }
}

TEST_CASE("fps: seed only picks the first index") {
  const PointMatrix c = gen_grid(16, 2).points;
  for (std::uint64_t s : {1u, 2u, 99u}) {
    const IndexList a = fps_select(c, 50, s);
    CHECK(a == fps_select_from(c, 50, fps_first_index(c.rows(), s)).indices);
    CHECK(a == fps_select(c, 50, s));
  }
  CHECK_THROWS(fps_select(c, 0, 1));
  CHECK_THROWS(fps_select(c, c.rows() + 1, 1));
  CHECK_THROWS(fps_select_from(c, 3, c.rows()));
}

TEST_CASE("random selection") {
  IndexList all = random_select(25, 25, 4);
  std::sort(all.begin(), all.end());
  for (Eigen::Index i = 0; i < 25; ++i) CHECK(all[static_cast<std::size_t>(i)] == i);
  CHECK(random_select(1000, 50, 8) == random_select(1000, 50, 8));
  const IndexList some = random_select(1000, 50, 8);
  CHECK(std::set<Eigen::Index>(some.begin(), some.end()).size() == 50);
  CHECK_THROWS(random_select(10, 11, 1));

  std::vector<int> freq(10, 0);
  for (std::uint64_t s = 0; s < 10000; ++s) ++freq[static_cast<std::size_t>(random_select(10, 1, derive_seed(1, "draw", s))[0])];
  for (int f : freq) CHECK(std::abs(f / 10000.0 - 0.1) <= 0.01);
}

TEST_CASE("band spec") {
  const BandSpec s = BandSpec::near_surface();
  CHECK_NOTHROW(s.validate());
  CHECK(s.band_of(-0.10) == 0);
  CHECK(s.band_of(-0.03) == 1);
  CHECK(s.band_of(0.0) == 2);
  CHECK(s.band_of(0.03) == 3);
  CHECK(s.band_of(0.10) == 3);
  CHECK(s.band_of(0.1000001) == -1);
  CHECK(s.band_of(-0.2) == -1);
  BandSpec bad = s;
  bad.fractions[0] = 0.3;
  CHECK_THROWS(bad.validate());
  bad = s;
  bad.bands[1].first = -0.05;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("band selection") {
  const BandSpec spec = BandSpec::near_surface();
  Rng rng(1);
  Eigen::VectorXd sdf(100000);
  for (Eigen::Index i = 0; i < sdf.size(); ++i) sdf[i] = -0.12 + 0.24 * uniform01(rng);

  SUBCASE("quarter per band") {
    const BandSelection sel = band_select(sdf, spec, 32768, 5);
    REQUIRE(sel.indices.size() == 32768);
    for (auto c : sel.per_band) CHECK(c == 8192);
    CHECK(sel.warnings.empty());
    CHECK(std::set<Eigen::Index>(sel.indices.begin(), sel.indices.end()).size() == 32768);
    for (std::size_t i = 0; i < sel.indices.size(); ++i) {
      const double v = sdf[sel.indices[i]];
      const auto [lo, hi] = spec.bands[static_cast<std::size_t>(sel.band[i])];
      CHECK(v >= lo);
      if (sel.band[i] == 3) CHECK(v <= hi);
      else CHECK(v < hi);
    }
    CHECK(band_select(sdf, spec, 32768, 5).indices == sel.indices);
  }

  SUBCASE("remainder goes to the first bands") {
    const BandSelection sel = band_select(sdf, spec, 10, 5);
    CHECK(sel.per_band == std::vector<Eigen::Index>{3, 3, 2, 2});
  }

  SUBCASE("empty band is redistributed") {
    Eigen::VectorXd s = sdf;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s[i] >= -0.03 && s[i] < 0.0) s[i] = 0.5;
    const BandSelection sel = band_select(s, spec, 4000, 2);
    CHECK(sel.indices.size() == 4000);
    CHECK(sel.per_band[1] == 0);
    CHECK_FALSE(sel.warnings.empty());
    for (Eigen::Index i : sel.indices) CHECK(spec.band_of(s[i]) >= 0);
  }

  SUBCASE("exact band content is taken whole") {
    Eigen::VectorXd s(400);
    const double centers[] = {-0.06, -0.01, 0.01, 0.06};
    for (Eigen::Index i = 0; i < 400; ++i) s[i] = centers[i % 4];
    const BandSelection sel = band_select(s, spec, 400, 9);
    IndexList sorted = sel.indices;
    std::sort(sorted.begin(), sorted.end());
    for (Eigen::Index i = 0; i < 400; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
  }

  SUBCASE("all bands empty") {
    Eigen::VectorXd far = Eigen::VectorXd::Constant(50, 0.7);
    CHECK_THROWS_AS(band_select(far, spec, 10, 1), Error);
  }
}

TEST_CASE("index list file") {
  const IndexList idx{5, 0, 17, 3};
  const auto path = oracle::temp_path("i.idxl");
  write_index_list(path, idx);
  CHECK(read_index_list(path) == idx);
  PointMatrix p(20, 2);
  for (int i = 0; i < 20; ++i) p.row(i) << i, -i;
  const PointMatrix g = gather_rows(p, idx);
  CHECK(g(2, 0) == 17);
  CHECK(g(2, 1) == -17);
}
