#include "qmcsdf/symmetry.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qmcsdf/errors.hpp"
#include "qmcsdf/parallel.hpp"

namespace qmcsdf {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

FeatureImage::FeatureImage(int w, int h, int c, double fill) : width(w), height(h), channels(c) {
  if (w < 1 || h < 1 || c < 1) throw std::invalid_argument("image dimensions must be positive");
  values.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c), fill);
}

namespace {

template <typename PerPixel>
void render_rows(const CameraModel& camera, PerPixel&& per_pixel) {
  camera.validate();
  parallel_for(static_cast<std::size_t>(camera.height), [&](std::size_t begin, std::size_t end) {
    for (std::size_t y = begin; y < end; ++y)
      for (int x = 0; x < camera.width; ++x) per_pixel(x, static_cast<int>(y));
  });
}

}  // namespace

DepthImage render_depth(const Bvh& bvh, const TriangleMesh& mesh, const CameraModel& camera) {
  DepthImage img(camera.width, camera.height, 1, std::numeric_limits<double>::infinity());
  render_rows(camera, [&](int x, int y) {
    const Ray ray = pixel_ray(camera, Vec2(x, y));
    if (const auto hit = first_hit(bvh, mesh, ray.origin, ray.direction)) {
      const double z = camera.transform.apply(ray.origin + hit->t * ray.direction).z();
      if (z > 0.0) img.at(x, y, 0) = z;
    }
  });
  return img;
}

FeatureImage render_features(const Bvh& bvh, const TriangleMesh& mesh, const CameraModel& camera) {
  FeatureImage img(camera.width, camera.height, 4, 0.0);
  render_rows(camera, [&](int x, int y) {
    const Ray ray = pixel_ray(camera, Vec2(x, y));
    const auto hit = first_hit(bvh, mesh, ray.origin, ray.direction);
    if (!hit) return;
    const double z = camera.transform.apply(ray.origin + hit->t * ray.direction).z();
    if (!(z > 0.0)) return;
    const Vec3 a = mesh.corner(hit->triangle, 0);
    const Vec3 n = camera.transform.rotation * (mesh.corner(hit->triangle, 1) - a).cross(mesh.corner(hit->triangle, 2) - a);
    const double len = n.norm();
    img.at(x, y, 0) = z;
    if (len > 0.0)
      for (int c = 0; c < 3; ++c) img.at(x, y, c + 1) = n[c] / len;
  });
  return img;
}

Eigen::VectorXd pixel_feature(const FeatureImage& img, const Vec2& pixel) {
  const double px = pixel.x();
  const double py = pixel.y();
  if (!(px >= 0.0 && py >= 0.0 && px <= img.width - 1 && py <= img.height - 1))
    throw OutOfDomainError("pixel outside the image");
  const int x0 = std::min(static_cast<int>(std::floor(px)), std::max(img.width - 2, 0));
  const int y0 = std::min(static_cast<int>(std::floor(py)), std::max(img.height - 2, 0));
  const double fx = px - x0;
  const double fy = py - y0;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(img.channels);
  const int xs[2] = {x0, std::min(x0 + 1, img.width - 1)};
  const int ys[2] = {y0, std::min(y0 + 1, img.height - 1)};
  const double wx[2] = {1.0 - fx, fx};
  const double wy[2] = {1.0 - fy, fy};
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a) {
      const double w = wx[a] * wy[b];
      if (w == 0.0) continue;
      for (int c = 0; c < img.channels; ++c) out[c] += w * img.at(xs[a], ys[b], c);
    }
  return out;
}

FusionMode parse_fusion_mode(const std::string& name) {
  if (name == "base") return FusionMode::Base;
  if (name == "near") return FusionMode::Near;
  if (name == "avg") return FusionMode::Avg;
  if (name == "concat") return FusionMode::Concat;
  throw std::invalid_argument("unknown fusion mode '" + name + "'");
}

std::string to_string(FusionMode mode) {
  switch (mode) {
    case FusionMode::Base: return "base";
    case FusionMode::Near: return "near";
    case FusionMode::Avg: return "avg";
    case FusionMode::Concat: return "concat";
  }
  return "?";
}

Eigen::VectorXd fuse(FusionMode mode, const Eigen::VectorXd& fp, const Eigen::VectorXd& fq, double depth_p,
                     double depth_q) {
  if (fp.size() != fq.size()) throw std::invalid_argument("fuse: feature lengths differ");
  switch (mode) {
    case FusionMode::Base: return fp;
    case FusionMode::Near: return depth_q < depth_p ? fq : fp;
    case FusionMode::Avg: return (fp + fq) / 2.0;
    case FusionMode::Concat: {
      Eigen::VectorXd out(fp.size() * 2);
      out << fp, fq;
      return out;
    }
  }
  return fp;
}

Visibility visibility(const CameraModel& camera, const DepthImage& depth, const Vec3& p, double eps) {
  Visibility v;
  const Vec3 c = camera.transform.apply(p);
  if (!(c.z() > 0.0)) return v;
  const Projection pr = project(camera, p);
  const double px = pr.pixel.x();
  const double py = pr.pixel.y();
  if (!(px >= 0.0 && py >= 0.0 && px <= depth.width - 1 && py <= depth.height - 1)) return v;
  v.in_view = true;
  v.visible = pr.depth <= pixel_feature(depth, pr.pixel)[0] + eps;
  return v;
}

SymmetricPair symmetric_pair(const CameraModel& camera, const DepthImage& depth, const FeatureImage& features,
                             const Vec3& p, FusionMode mode, double eps) {
  SymmetricPair s;
  s.p = p;
  // mirror in the object frame, expressed through the camera transform
  s.q = camera.transform.apply_inverse(symmetric_point(camera.transform, camera.transform.apply(p)));
  s.vis_p = visibility(camera, depth, s.p, eps);
  s.vis_q = visibility(camera, depth, s.q, eps);
  if (!s.vis_p.in_view || !s.vis_q.in_view) throw OutOfDomainError("symmetric pair leaves the image");
  const Projection pp = project(camera, s.p);
  const Projection pq = project(camera, s.q);
  s.pixel_p = pp.pixel;
  s.pixel_q = pq.pixel;
  s.depth_p = pp.depth;
  s.depth_q = pq.depth;
  s.fused = fuse(mode, pixel_feature(features, pp.pixel), pixel_feature(features, pq.pixel), pp.depth, pq.depth);
  return s;
}

void write_pairs_csv(std::ostream& out, const std::vector<SymmetricPair>& pairs, FusionMode mode) {
  out << "px,py,pz,qx,qy,qz,depth_p,depth_q,visible_p,visible_q,mode";
  if (!pairs.empty())
    for (Eigen::Index i = 0; i < pairs.front().fused.size(); ++i) out << ",f" << i;
  out << '\n' << std::setprecision(17);
  for (const auto& s : pairs) {
    out << s.p.x() << ',' << s.p.y() << ',' << s.p.z() << ',' << s.q.x() << ',' << s.q.y() << ',' << s.q.z() << ','
        << s.depth_p << ',' << s.depth_q << ',' << s.vis_p.visible << ',' << s.vis_q.visible << ',' << to_string(mode);
    for (Eigen::Index i = 0; i < s.fused.size(); ++i) out << ',' << s.fused[i];
    out << '\n';
  }
}

void write_pfm(const std::filesystem::path& path, const FeatureImage& img) {
  if (img.channels != 1 && img.channels != 3) throw std::invalid_argument("PFM holds one or three channels");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << (img.channels == 3 ? "PF" : "Pf") << '\n' << img.width << ' ' << img.height << '\n' << "-1.0\n";
  std::vector<float> row(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.channels));
  for (int y = img.height - 1; y >= 0; --y) {
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = static_cast<float>(img.values[img.offset(0, y) + i]);
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw Error("write failed: " + path.string());
}

FeatureImage read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string magic;
  int w = 0;
  int h = 0;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  in.get();
  if (!in || (magic != "PF" && magic != "Pf") || w < 1 || h < 1 || scale == 0.0)
    throw FormatError("not a PFM file: " + path.string());
  const int c = magic == "PF" ? 3 : 1;
  if (scale > 0.0) throw FormatError("big-endian PFM is not supported: " + path.string());
  FeatureImage img(w, h, c);
  std::vector<float> row(static_cast<std::size_t>(w) * static_cast<std::size_t>(c));
  for (int y = h - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) throw FormatError("truncated PFM file: " + path.string());
    for (std::size_t i = 0; i < row.size(); ++i) img.values[img.offset(0, y) + i] = row[i];
  }
  return img;
}

FeatureImage extract_channels(const FeatureImage& img, int first, int count) {
  if (first < 0 || count < 1 || first + count > img.channels) throw std::invalid_argument("channel range out of bounds");
  FeatureImage out(img.width, img.height, count);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < count; ++c) out.at(x, y, c) = img.at(x, y, first + c);
  return out;
}

}  // namespace qmcsdf
