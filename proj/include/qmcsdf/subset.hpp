#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "qmcsdf/samplers.hpp"

namespace qmcsdf {

using IndexList = std::vector<Eigen::Index>;

struct FpsResult {
  IndexList indices;
  /// insertion_radius[i] is the distance from indices[i] to the earlier picks
  /// at the time it was chosen; +inf for the first pick.
  std::vector<double> insertion_radius;
};

/// Farthest point sampling from a fixed first index. Each step picks the
/// candidate maximizing its distance to the chosen set, smallest index on
/// ties. O(k N) with a running nearest-distance array.
FpsResult fps_select_from(const PointMatrix& candidates, Eigen::Index k, Eigen::Index first);

/// As above with the first index drawn uniformly from `seed`.
IndexList fps_select(const PointMatrix& candidates, Eigen::Index k, std::uint64_t seed);
Eigen::Index fps_first_index(Eigen::Index n, std::uint64_t seed);

/// k distinct indices, uniform without replacement.
IndexList random_select(Eigen::Index n, Eigen::Index k, std::uint64_t seed);

/// SDF value ranges with selection fractions. Bands are half-open on the
/// right except the last, which is closed.
struct BandSpec {
  std::vector<std::pair<double, double>> bands;
  std::vector<double> fractions;

  /// Four equal bands over [-0.10, -0.03, 0, 0.03, 0.10].
  static BandSpec near_surface();
  void validate() const;
  /// Index of the band containing `value`, or -1.
  int band_of(double value) const;
};

struct BandSelection {
  IndexList indices;
  std::vector<Eigen::Index> per_band;  // picks per band
  std::vector<int> band;               // band id of each pick, parallel to indices
  std::vector<std::string> warnings;
};

/// Stratified selection: floor(k * fraction) per band with the remainder
/// handed to bands in listed order, uniform within a band. Deficits from
/// short bands are redistributed proportionally to bands with spare capacity.
BandSelection band_select(const Eigen::VectorXd& sdf, const BandSpec& spec, Eigen::Index k, std::uint64_t seed);

/// Binary u64 index list: "IDXL", u64 count, u64 indices.
void write_index_list(const std::filesystem::path& path, const IndexList& indices);
IndexList read_index_list(const std::filesystem::path& path);

PointMatrix gather_rows(const PointMatrix& points, const IndexList& indices);
Eigen::VectorXd gather(const Eigen::VectorXd& values, const IndexList& indices);

}  // namespace qmcsdf
