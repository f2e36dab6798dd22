#pragma once

#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "qmcsdf/samplers.hpp"

namespace qmcsdf {

/// Averaged periodogram |sum_j exp(-2 pi i k.x_j)|^2 on integer frequencies
/// k in [-extent, extent]^2. values(r, c) holds k = (c - extent, r - extent).
struct SpectrumGrid {
  int extent = 0;
  Eigen::MatrixXd values;
  int realizations = 0;
  Eigen::Index points_per_set = 0;

  double at(int kx, int ky) const { return values(ky + extent, kx + extent); }
};

/// Direct evaluation over all points and frequencies; every set must hold the
/// same number of 2D points.
SpectrumGrid power_spectrum(const std::vector<PointMatrix>& sets, int freq_extent);

struct RadialBin {
  double radius = 0.0;  // bin center
  double mean_power = 0.0;
  Eigen::Index count = 0;
};

/// Annular means over 0 < |k| <= extent, DC excluded.
std::vector<RadialBin> radial_average(const SpectrumGrid& spectrum, int n_bins);

void write_spectrum_csv(std::ostream& out, const SpectrumGrid& spectrum);
/// 8-bit binary PGM of log(1 + power), scaled to the maximum.
void write_spectrum_pgm(const std::filesystem::path& path, const SpectrumGrid& spectrum);

}  // namespace qmcsdf
