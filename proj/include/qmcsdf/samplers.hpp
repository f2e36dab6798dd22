#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include <Eigen/Core>

namespace qmcsdf {

/// Rows are points, columns are coordinates.
using PointMatrix = Eigen::MatrixXd;

/// Ordered points in the unit cube [0,1)^dim together with how they were made.
struct PointSet {
  int dim = 0;
  PointMatrix points;
  std::string sampler;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> params;

  Eigen::Index size() const { return points.rows(); }
};

PointSet gen_random(Eigen::Index n, int dim, std::uint64_t seed);

/// Cell centers (i + 0.5) / res, x fastest.
PointSet gen_grid(int res_per_axis, int dim);

/// Grid plus i.i.d. N(0, sigma^2) per coordinate, clamped to [0, 1 - 1e-9].
PointSet gen_jitter(int res_per_axis, int dim, double sigma, std::uint64_t seed);

/// Unscrambled Sobol points 0..n-1 in Gray-code order, Joe-Kuo direction numbers.
PointSet gen_sobol(Eigen::Index n, int dim);

/// Halton points 1..n, radical inverses in bases 2, 3, 5.
PointSet gen_halton(Eigen::Index n, int dim);

double radical_inverse(std::uint64_t index, int base);

/// Affine map of unit-cube points onto [lo, hi].
PointMatrix map_to_box(const PointMatrix& unit_points, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

/// Binary layout: "PSET", u32 dim, u64 count, f64 coordinates interleaved.
void write_pset(const std::filesystem::path& path, const PointMatrix& points);
PointMatrix read_pset(const std::filesystem::path& path);

void write_points_csv(std::ostream& out, const PointMatrix& points);

}  // namespace qmcsdf
