#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qmcsdf/bvh.hpp"
#include "qmcsdf/camera.hpp"

namespace qmcsdf {

/// Row-major, channel-interleaved image: value(x, y, c) = values[(y*w + x)*c + c].
struct FeatureImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> values;

  FeatureImage() = default;
  FeatureImage(int w, int h, int c, double fill = 0.0);

  double& at(int x, int y, int c) { return values[offset(x, y) + static_cast<std::size_t>(c)]; }
  double at(int x, int y, int c) const { return values[offset(x, y) + static_cast<std::size_t>(c)]; }
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) *
           static_cast<std::size_t>(channels);
  }
};

/// Camera-space z of the nearest hit per pixel; +inf where the ray misses.
using DepthImage = FeatureImage;

DepthImage render_depth(const Bvh& bvh, const TriangleMesh& mesh, const CameraModel& camera);

/// Four channels per pixel: depth, then the camera-frame unit face normal of the
/// hit. Background pixels are all zero.
FeatureImage render_features(const Bvh& bvh, const TriangleMesh& mesh, const CameraModel& camera);

/// Bilinear lookup with pixel centers at integer coordinates; throws
/// OutOfDomainError unless 0 <= x <= w-1 and 0 <= y <= h-1. An infinite
/// neighbor with nonzero weight makes the result infinite.
Eigen::VectorXd pixel_feature(const FeatureImage& img, const Vec2& pixel);

enum class FusionMode { Base, Near, Avg, Concat };

FusionMode parse_fusion_mode(const std::string& name);
std::string to_string(FusionMode mode);

/// Base keeps fp, Near keeps the shallower of the two (fp on ties), Avg is the
/// mean and Concat appends fq to fp.
Eigen::VectorXd fuse(FusionMode mode, const Eigen::VectorXd& fp, const Eigen::VectorXd& fq, double depth_p,
                     double depth_q);

struct Visibility {
  bool visible = false;
  bool in_view = false;
};

/// p is visible when its camera depth is at most the rendered depth at its
/// projection plus eps.
Visibility visibility(const CameraModel& camera, const DepthImage& depth, const Vec3& p, double eps = 1e-3);

/// Feature retrieval for p and its mirror partner q (object frame, plane z = 0).
struct SymmetricPair {
  Vec3 p;
  Vec3 q;
  Vec2 pixel_p;
  Vec2 pixel_q;
  double depth_p = 0.0;
  double depth_q = 0.0;
  Visibility vis_p;
  Visibility vis_q;
  Eigen::VectorXd fused;
};

SymmetricPair symmetric_pair(const CameraModel& camera, const DepthImage& depth, const FeatureImage& features,
                             const Vec3& p, FusionMode mode, double eps = 1e-3);

void write_pairs_csv(std::ostream& out, const std::vector<SymmetricPair>& pairs, FusionMode mode);

/// Portable float map; one ("Pf") or three ("PF") channels, little-endian,
/// rows stored bottom to top.
void write_pfm(const std::filesystem::path& path, const FeatureImage& img);
FeatureImage read_pfm(const std::filesystem::path& path);

/// Channel subset [first, first + count) of an image.
FeatureImage extract_channels(const FeatureImage& img, int first, int count);

}  // namespace qmcsdf
