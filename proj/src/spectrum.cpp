#include "qmcsdf/spectrum.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "qmcsdf/errors.hpp"
#include "qmcsdf/parallel.hpp"

namespace qmcsdf {

namespace {

// e^{-2 pi i k x} for k = -extent..extent as an (n x (2 extent + 1)) matrix.
Eigen::MatrixXcd phase_table(const Eigen::VectorXd& coord, int extent) {
  const Eigen::Index n = coord.size();
  Eigen::MatrixXcd table(n, 2 * extent + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (int k = -extent; k <= extent; ++k) {
      // reduce k x mod 1 before scaling so large k keep full precision
      const double t = static_cast<double>(k) * coord[j];
      const double angle = -2.0 * M_PI * (t - std::floor(t));
      table(j, k + extent) = std::polar(1.0, angle);
    }
  }
  return table;
}

}  // namespace

SpectrumGrid power_spectrum(const std::vector<PointMatrix>& sets, int freq_extent) {
  if (freq_extent < 1) throw std::invalid_argument("power_spectrum: freq_extent must be >= 1");
  if (sets.empty()) throw std::invalid_argument("power_spectrum: no point sets");
  const Eigen::Index n = sets.front().rows();
  for (const auto& s : sets) {
    if (s.rows() != n) throw std::invalid_argument("power_spectrum: all sets must have the same size");
    if (s.cols() != 2) throw std::invalid_argument("power_spectrum: sets must be 2D");
  }
  const int width = 2 * freq_extent + 1;
  std::vector<Eigen::MatrixXd> partial(sets.size(), Eigen::MatrixXd::Zero(width, width));
  parallel_for(sets.size(), [&](std::size_t s0, std::size_t s1) {
    for (std::size_t s = s0; s < s1; ++s) {
      const Eigen::MatrixXcd ex = phase_table(sets[s].col(0), freq_extent);
      const Eigen::MatrixXcd ey = phase_table(sets[s].col(1), freq_extent);
      // F(ky, kx) = sum_j ey(j, ky) ex(j, kx)
      const Eigen::MatrixXcd f = ey.transpose() * ex;
      partial[s] = f.cwiseAbs2();
    }
  });
  SpectrumGrid out;
  out.extent = freq_extent;
  out.realizations = static_cast<int>(sets.size());
  out.points_per_set = n;
  out.values = Eigen::MatrixXd::Zero(width, width);
  for (const auto& p : partial) out.values += p;  // fixed order
  out.values /= static_cast<double>(sets.size());
  return out;
}

std::vector<RadialBin> radial_average(const SpectrumGrid& spectrum, int n_bins) {
  if (n_bins < 1) throw std::invalid_argument("radial_average: n_bins must be >= 1");
  const int e = spectrum.extent;
  const double width = static_cast<double>(e) / n_bins;
  std::vector<RadialBin> bins(static_cast<std::size_t>(n_bins));
  std::vector<double> sums(static_cast<std::size_t>(n_bins), 0.0);
  for (int ky = -e; ky <= e; ++ky) {
    for (int kx = -e; kx <= e; ++kx) {
      if (kx == 0 && ky == 0) continue;
      const double r = std::hypot(kx, ky);
      if (r > e) continue;
      const int b = std::min(n_bins - 1, static_cast<int>(std::ceil(r / width)) - 1);
      sums[static_cast<std::size_t>(b)] += spectrum.at(kx, ky);
      ++bins[static_cast<std::size_t>(b)].count;
    }
  }
  for (int b = 0; b < n_bins; ++b) {
    auto& bin = bins[static_cast<std::size_t>(b)];
    bin.radius = (b + 0.5) * width;
    bin.mean_power = bin.count > 0 ? sums[static_cast<std::size_t>(b)] / static_cast<double>(bin.count) : 0.0;
  }
  return bins;
}

void write_spectrum_csv(std::ostream& out, const SpectrumGrid& spectrum) {
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < spectrum.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < spectrum.values.cols(); ++c) out << (c ? "," : "") << spectrum.values(r, c);
    out << '\n';
  }
}

void write_spectrum_pgm(const std::filesystem::path& path, const SpectrumGrid& spectrum) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const Eigen::MatrixXd logv = (spectrum.values.array() + 1.0).log();
  const double hi = logv.maxCoeff();
  const auto w = spectrum.values.cols(), h = spectrum.values.rows();
  out << "P5\n" << w << ' ' << h << "\n255\n";
  // top row is the highest ky
  for (Eigen::Index r = h - 1; r >= 0; --r) {
    for (Eigen::Index c = 0; c < w; ++c) {
      const double v = hi > 0.0 ? logv(r, c) / hi : 0.0;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v))));
    }
  }
}

}  // namespace qmcsdf
