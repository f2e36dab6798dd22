#include "qmcsdf/camera.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "qmcsdf/config.hpp"
#include "qmcsdf/errors.hpp"

namespace qmcsdf {

RigidTransform RigidTransform::from_quaternion(double w, double x, double y, double z, const Vec3& translation) {
  Eigen::Quaterniond q(w, x, y, z);
  if (!(q.norm() > 0.0)) throw Error("zero quaternion");
  q.normalize();
  return RigidTransform{q.toRotationMatrix(), translation};
}

RigidTransform RigidTransform::inverse() const {
  const Mat3 rt = rotation.transpose();
  return RigidTransform{rt, -rt * translation};
}

bool RigidTransform::is_valid(double tol) const {
  return (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(rotation.determinant() - 1.0) <= tol && translation.allFinite();
}

void CameraModel::validate() const {
  if (!transform.is_valid()) throw Error("camera rotation is not a proper rotation");
  if (!(focal.x() > 0.0 && focal.y() > 0.0)) throw Error("camera focal lengths must be positive");
  if (width < 1 || height < 1) throw Error("camera image size must be at least 1x1");
}

Projection project(const CameraModel& camera, const Vec3& p) {
  const Vec3 c = camera.transform.apply(p);
  if (!(c.z() > 0.0)) throw BehindCameraError("point is behind the camera");
  Projection out;
  out.pixel = camera.focal.cwiseProduct(Vec2(c.x() / c.z(), c.y() / c.z())) + camera.principal;
  out.depth = c.z();
  return out;
}

Vec3 unproject(const CameraModel& camera, const Vec2& pixel, double depth) {
  const Vec2 xy = (pixel - camera.principal).cwiseQuotient(camera.focal) * depth;
  return camera.transform.apply_inverse(Vec3(xy.x(), xy.y(), depth));
}

Ray pixel_ray(const CameraModel& camera, const Vec2& pixel) {
  const Vec2 xy = (pixel - camera.principal).cwiseQuotient(camera.focal);
  const Vec3 dir_cam = Vec3(xy.x(), xy.y(), 1.0).normalized();
  return Ray{camera.transform.apply_inverse(Vec3::Zero()), camera.transform.rotation.transpose() * dir_cam};
}

Vec3 symmetric_point(const RigidTransform& transform, const Vec3& p) {
  Vec3 v = transform.apply_inverse(p);
  v.z() = -v.z();
  return transform.apply(v);
}

CameraModel load_camera(const std::filesystem::path& path) {
  const KeyValueConfig cfg = KeyValueConfig::load(path);
  const auto q = cfg.get_reals("rotation", 4);
  const auto t = cfg.get_reals("translation", 3);
  const auto f = cfg.get_reals("focal", 2);
  const auto c = cfg.get_reals("principal", 2);
  const auto size = cfg.get_reals("image_size", 2);
  CameraModel cam;
  cam.transform = RigidTransform::from_quaternion(q[0], q[1], q[2], q[3], Vec3(t[0], t[1], t[2]));
  cam.focal = Vec2(f[0], f[1]);
  cam.principal = Vec2(c[0], c[1]);
  cam.width = static_cast<int>(size[0]);
  cam.height = static_cast<int>(size[1]);
  cam.validate();
  return cam;
}

CameraModel look_at_camera(const Vec3& eye, const Vec3& target, const Vec3& up, double focal, int width, int height) {
  const Vec3 z = (target - eye).normalized();
  const Vec3 x = up.cross(z).normalized();
  const Vec3 y = z.cross(x);
  CameraModel cam;
  cam.transform.rotation.row(0) = x.transpose();
  cam.transform.rotation.row(1) = y.transpose();
  cam.transform.rotation.row(2) = z.transpose();
  cam.transform.translation = -cam.transform.rotation * eye;
  cam.focal = Vec2(focal, focal);
  cam.principal = Vec2((width - 1) / 2.0, (height - 1) / 2.0);
  cam.width = width;
  cam.height = height;
  return cam;
}

}  // namespace qmcsdf
