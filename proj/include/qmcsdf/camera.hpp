#pragma once

#include <filesystem>

#include "qmcsdf/mesh.hpp"

namespace qmcsdf {

/// Rotation followed by translation: x -> R x + t.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  /// Quaternion (w, x, y, z); normalized before conversion.
  static RigidTransform from_quaternion(double w, double x, double y, double z, const Vec3& translation);

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_inverse(const Vec3& p) const { return rotation.transpose() * (p - translation); }
  RigidTransform inverse() const;

  /// Orthonormal with determinant +1, within `tol`.
  bool is_valid(double tol = 1e-9) const;
};

/// Pinhole camera; `transform` maps object frame to camera frame, the camera
/// looks down +z and integer pixel coordinates are pixel centers.
struct CameraModel {
  RigidTransform transform;
  Vec2 focal{1.0, 1.0};
  Vec2 principal{0.0, 0.0};
  int width = 1;
  int height = 1;

  void validate() const;
};

struct Projection {
  Vec2 pixel;
  double depth = 0.0;
};

/// Object-frame point to pixel plus camera-space depth; throws BehindCameraError
/// when depth <= 0.
Projection project(const CameraModel& camera, const Vec3& p);

/// Inverse of project for a known depth.
Vec3 unproject(const CameraModel& camera, const Vec2& pixel, double depth);

/// Object-frame origin and unit direction of the ray through `pixel`.
struct Ray {
  Vec3 origin;
  Vec3 direction;
};
Ray pixel_ray(const CameraModel& camera, const Vec2& pixel);

/// Mirror image of p across the object-frame plane z = 0, where p is given in
/// the frame reached through `transform`.
Vec3 symmetric_point(const RigidTransform& transform, const Vec3& p);

/// Keys: rotation (w x y z), translation, focal, principal, image_size.
CameraModel load_camera(const std::filesystem::path& path);

/// Camera at `eye` looking at `target`, principal point at the image center.
CameraModel look_at_camera(const Vec3& eye, const Vec3& target, const Vec3& up, double focal, int width, int height);

}  // namespace qmcsdf
