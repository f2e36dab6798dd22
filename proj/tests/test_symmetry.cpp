#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "qmcsdf/errors.hpp"
#include "qmcsdf/rng.hpp"
#include "qmcsdf/sdf.hpp"
#include "qmcsdf/symmetry.hpp"

using namespace qmcsdf;

namespace {

CameraModel axis_camera(int size) {
  CameraModel cam;
  cam.focal = {size, size};
  cam.principal = {(size - 1) / 2.0, (size - 1) / 2.0};
  cam.width = cam.height = size;
  return cam;
}

}  // namespace

TEST_CASE("depth rendering") {
  const TriangleMesh sphere = make_icosphere(1.0, 4, Vec3(0, 0, 3));
  const Bvh bvh(sphere);
  const CameraModel cam = axis_camera(33);
  const DepthImage d = render_depth(bvh, sphere, cam);
  const double tol = oracle::facet_deviation(sphere, Vec3(0, 0, 3), 1.0);
  CHECK(std::abs(d.at(16, 16, 0) - 2.0) <= tol);
  CHECK(std::isinf(d.at(0, 0, 0)));
  for (double v : d.values) CHECK((std::isinf(v) || v > 0.0));

  const TriangleMesh behind = make_icosphere(1.0, 2, Vec3(0, 0, -3));
  const Bvh bb(behind);
  for (double v : render_depth(bb, behind, cam).values) CHECK(std::isinf(v));

  // rows mirror each other when the camera sits on the symmetry plane
  for (const TriangleMesh& m : {make_torus(0.5, 0.2, 48, 24), make_box(Vec3(-0.4, -0.3, -0.5), Vec3(0.4, 0.3, 0.5))}) {
    const Bvh mb(m);
    const CameraModel side = look_at_camera(Vec3(2.5, 0.7, 0), Vec3::Zero(), Vec3::UnitZ(), 40, 41, 40);
    const DepthImage img = render_depth(mb, m, side);
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        const double a = img.at(x, y, 0), b = img.at(x, img.height - 1 - y, 0);
        if (std::isinf(a) || std::isinf(b)) CHECK(std::isinf(a) == std::isinf(b));
        else CHECK(std::abs(a - b) < 1e-9);
      }
  }
}

TEST_CASE("feature rendering") {
  const TriangleMesh box = make_box(Vec3(-0.5, -0.5, 2.5), Vec3(0.5, 0.5, 3.5));
  const Bvh bvh(box);
  const FeatureImage f = render_features(bvh, box, axis_camera(21));
  CHECK(f.channels == 4);
  CHECK(f.at(10, 10, 0) == doctest::Approx(2.5));
  CHECK(f.at(10, 10, 3) == doctest::Approx(-1.0));
  for (int c = 0; c < 4; ++c) CHECK(f.at(0, 0, c) == 0.0);
}

TEST_CASE("pixel features") {
  FeatureImage img(3, 2, 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 3; ++x) {
      img.at(x, y, 0) = x + 10 * y;
      img.at(x, y, 1) = -x;
    }
  CHECK(pixel_feature(img, Vec2(2, 1))[0] == 12.0);
  CHECK(pixel_feature(img, Vec2(0.5, 0))[0] == doctest::Approx(0.5));
  CHECK(pixel_feature(img, Vec2(1, 0.5))[0] == doctest::Approx(6.0));
  CHECK(pixel_feature(img, Vec2(1.5, 0.5))[1] == doctest::Approx(-1.5));
  CHECK_THROWS_AS(pixel_feature(img, Vec2(2.01, 0)), OutOfDomainError);
  CHECK_THROWS_AS(pixel_feature(img, Vec2(-0.01, 0)), OutOfDomainError);

  const FeatureImage flat(5, 4, 3, 0.25);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd v = pixel_feature(flat, Vec2(4 * uniform01(rng), 3 * uniform01(rng)));
    CHECK((v.array() - 0.25).abs().maxCoeff() < 1e-15);
  }

  DepthImage d(2, 1, 1);
  d.at(0, 0, 0) = 1.0;
  d.at(1, 0, 0) = std::numeric_limits<double>::infinity();
  CHECK(pixel_feature(d, Vec2(0, 0))[0] == 1.0);
  CHECK(std::isinf(pixel_feature(d, Vec2(0.5, 0))[0]));
}

TEST_CASE("fusion modes") {
  Eigen::VectorXd fp(3), fq(3);
  fp << 1, 2, 3;
  fq << -1, 0, 5;
  CHECK(fuse(FusionMode::Base, fp, fq, 1.0, 0.5) == fp);
  CHECK(fuse(FusionMode::Avg, fp, fp, 1.0, 0.5) == fp);
  CHECK(fuse(FusionMode::Avg, fp, fq, 1.0, 0.5) == Eigen::Vector3d(0, 1, 4));
  CHECK(fuse(FusionMode::Near, fp, fq, 1.0, 0.5) == fq);
  CHECK(fuse(FusionMode::Near, fp, fq, 0.5, 1.0) == fp);
  CHECK(fuse(FusionMode::Near, fp, fq, 0.7, 0.7) == fp);
  const Eigen::VectorXd cat = fuse(FusionMode::Concat, fp, fq, 1.0, 0.5);
  REQUIRE(cat.size() == 6);
  CHECK(cat.head(3) == fp);
  CHECK(cat.tail(3) == fq);
  CHECK_THROWS(fuse(FusionMode::Avg, fp, Eigen::VectorXd(2), 1, 1));
  for (const char* name : {"base", "near", "avg", "concat"}) CHECK(to_string(parse_fusion_mode(name)) == name);
  CHECK_THROWS(parse_fusion_mode("max"));
}

TEST_CASE("visibility") {
  const Vec3 center(0, 0, 3);
  const TriangleMesh sphere = make_icosphere(1.0, 4, center);
  const Bvh bvh(sphere);
  const CameraModel cam = axis_camera(65);
  const DepthImage d = render_depth(bvh, sphere, cam);
  Rng rng(3);
  int front_visible = 0, back_hidden = 0, total = 0;
  for (int i = 0; i < 200; ++i) {
    Vec3 n(uniform01(rng) - 0.5, uniform01(rng) - 0.5, -1.0);
    n.normalize();
    if (n.z() > -0.5) continue;
    const ClosestPoint front = closest_point(bvh, sphere, center + n);
    const ClosestPoint back = closest_point(bvh, sphere, center - n);
    ++total;
    if (visibility(cam, d, front.point).visible) ++front_visible;
    const Visibility vb = visibility(cam, d, back.point);
    CHECK(vb.in_view);
    if (!vb.visible) ++back_hidden;
    for (double e : {1e-4, 1e-3, 1e-2, 0.1, 1.0})
      if (visibility(cam, d, back.point, e).visible) CHECK(visibility(cam, d, back.point, e * 2).visible);
  }
  CHECK(front_visible == total);
  CHECK(back_hidden == total);
  CHECK_FALSE(visibility(cam, d, Vec3(0, 0, -1)).in_view);
  CHECK_FALSE(visibility(cam, d, Vec3(100, 0, 1)).in_view);
}

TEST_CASE("symmetric pairs") {
  const TriangleMesh torus = make_torus(0.5, 0.2, 48, 24);
  const Bvh bvh(torus);
  const CameraModel cam = look_at_camera(Vec3(2, 1, 1.6), Vec3::Zero(), Vec3::UnitZ(), 60, 64, 64);
  const DepthImage depth = render_depth(bvh, torus, cam);
  const FeatureImage feat = render_features(bvh, torus, cam);
  const SymmetricPair s = symmetric_pair(cam, depth, feat, Vec3(0.5, 0.1, 0.2), FusionMode::Concat);
  CHECK((s.q - Vec3(0.5, 0.1, -0.2)).norm() < 1e-12);
  CHECK(s.fused.size() == 8);
  CHECK(s.fused.head(4) == pixel_feature(feat, s.pixel_p));
  const SymmetricPair near = symmetric_pair(cam, depth, feat, Vec3(0.5, 0.1, 0.2), FusionMode::Near);
  CHECK(near.fused == (s.depth_q < s.depth_p ? s.fused.tail(4) : s.fused.head(4)).eval());
  CHECK_THROWS_AS(symmetric_pair(cam, depth, feat, Vec3(0, 0, 40), FusionMode::Base), OutOfDomainError);
  std::ostringstream csv;
  write_pairs_csv(csv, {s}, FusionMode::Concat);
  CHECK(csv.str().find(",f7") != std::string::npos);
}

TEST_CASE("sdf is mirror symmetric") {
  for (const TriangleMesh& m : {make_torus(0.5, 0.2, 48, 24), make_box(Vec3(-0.4, -0.3, -0.5), Vec3(0.4, 0.3, 0.5))}) {
    const Bvh bvh(m);
    Rng rng(12);
    const RigidTransform pose = RigidTransform::from_quaternion(0.9, 0.1, -0.3, 0.2, Vec3(0.1, -0.2, 2.0));
    for (int i = 0; i < 1000; ++i) {
      const Vec3 v(2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1);
      const Vec3 p = pose.apply(v);
      const Vec3 q = pose.apply_inverse(symmetric_point(pose, p));
      CHECK(std::abs(signed_distance(bvh, m, v) - signed_distance(bvh, m, q)) < 1e-9);
    }
  }
}

TEST_CASE("pfm round trip") {
  FeatureImage img(5, 3, 3);
  for (std::size_t i = 0; i < img.values.size(); ++i) img.values[i] = 0.125 * static_cast<double>(i) - 2.0;
  const auto path = oracle::temp_path("i.pfm");
  write_pfm(path, img);
  const FeatureImage r = read_pfm(path);
  CHECK(r.width == 5);
  CHECK(r.height == 3);
  CHECK(r.channels == 3);
  CHECK(r.values == img.values);
  const FeatureImage one = extract_channels(img, 1, 1);
  CHECK(one.at(4, 2, 0) == img.at(4, 2, 1));
  write_pfm(path, one);
  CHECK(read_pfm(path).values == one.values);
  CHECK_THROWS(write_pfm(path, FeatureImage(2, 2, 4)));
  CHECK_THROWS(extract_channels(img, 2, 2));
}
