#include "qmcsdf/samplers.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qmcsdf/errors.hpp"
#include "qmcsdf/rng.hpp"

namespace qmcsdf {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("sampler dimension must be 1, 2 or 3");
}

std::string fmt_real(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

// Direction numbers for the first three Sobol dimensions (new-joe-kuo-6.21201):
// dimension 1 is van der Corput; d=2: s=1 a=0 m={1}; d=3: s=2 a=1 m={1,3}.
struct SobolDim {
  int s;
  unsigned a;
  std::array<std::uint32_t, 2> m;
};
constexpr std::array<SobolDim, 2> kJoeKuo = {{{1, 0, {1, 0}}, {2, 1, {1, 3}}}};

std::array<std::uint32_t, 32> direction_numbers(int d) {
  std::array<std::uint32_t, 32> v{};
  if (d == 0) {
    for (int i = 0; i < 32; ++i) v[static_cast<std::size_t>(i)] = 1u << (31 - i);
    return v;
  }
  const SobolDim& sd = kJoeKuo[static_cast<std::size_t>(d - 1)];
  const int s = sd.s;
  for (int i = 0; i < s; ++i) v[static_cast<std::size_t>(i)] = sd.m[static_cast<std::size_t>(i)] << (31 - i);
  for (int i = s; i < 32; ++i) {
    std::uint32_t x = v[static_cast<std::size_t>(i - s)] ^ (v[static_cast<std::size_t>(i - s)] >> s);
    for (int k = 1; k < s; ++k) {
      if ((sd.a >> (s - 1 - k)) & 1u) x ^= v[static_cast<std::size_t>(i - k)];
    }
    v[static_cast<std::size_t>(i)] = x;
  }
  return v;
}

}  // namespace

PointSet gen_random(Eigen::Index n, int dim, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_random: n must be >= 1");
  check_dim(dim);
  PointSet ps{dim, PointMatrix(n, dim), "random", seed, {{"n", std::to_string(n)}}};
  Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int a = 0; a < dim; ++a) ps.points(i, a) = uniform01(rng);
  return ps;
}

PointSet gen_grid(int res, int dim) {
  if (res < 2) throw std::invalid_argument("gen_grid: resolution must be >= 2");
  check_dim(dim);
  Eigen::Index n = 1;
  for (int a = 0; a < dim; ++a) n *= res;
  PointSet ps{dim, PointMatrix(n, dim), "grid", 0, {{"res", std::to_string(res)}}};
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index rem = i;
    for (int a = 0; a < dim; ++a) {
      ps.points(i, a) = (static_cast<double>(rem % res) + 0.5) / res;
      rem /= res;
    }
  }
  return ps;
}

PointSet gen_jitter(int res, int dim, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("gen_jitter: sigma must be >= 0");
  PointSet ps = gen_grid(res, dim);
  ps.sampler = "jitter";
  ps.seed = seed;
  ps.params["sigma"] = fmt_real(sigma);
  if (sigma == 0.0) return ps;
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  constexpr double kUpper = 1.0 - 1e-9;
  for (Eigen::Index i = 0; i < ps.size(); ++i)
    for (int a = 0; a < dim; ++a) ps.points(i, a) = std::clamp(ps.points(i, a) + noise(rng), 0.0, kUpper);
  return ps;
}

PointSet gen_sobol(Eigen::Index n, int dim) {
  if (n < 1) throw std::invalid_argument("gen_sobol: n must be >= 1");
  check_dim(dim);
  if (n > (Eigen::Index{1} << 32)) throw std::invalid_argument("gen_sobol: n exceeds 2^32");
  PointSet ps{dim, PointMatrix(n, dim), "sobol", 0, {{"n", std::to_string(n)}}};
  std::array<std::array<std::uint32_t, 32>, 3> v;
  for (int a = 0; a < dim; ++a) v[static_cast<std::size_t>(a)] = direction_numbers(a);
  std::array<std::uint32_t, 3> x{0, 0, 0};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) {
      const int c = std::countr_zero(static_cast<std::uint64_t>(i));
      for (int a = 0; a < dim; ++a) x[static_cast<std::size_t>(a)] ^= v[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)];
    }
    for (int a = 0; a < dim; ++a) ps.points(i, a) = static_cast<double>(x[static_cast<std::size_t>(a)]) * 0x1.0p-32;
  }
  return ps;
}

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double inv = 1.0 / base, f = inv;
  while (index > 0) {
    result += static_cast<double>(index % static_cast<std::uint64_t>(base)) * f;
    index /= static_cast<std::uint64_t>(base);
    f *= inv;
  }
  return result;
}

PointSet gen_halton(Eigen::Index n, int dim) {
  if (n < 1) throw std::invalid_argument("gen_halton: n must be >= 1");
  check_dim(dim);
  constexpr int kBases[3] = {2, 3, 5};
  PointSet ps{dim, PointMatrix(n, dim), "halton", 0, {{"n", std::to_string(n)}}};
  for (Eigen::Index i = 0; i < n; ++i)
    for (int a = 0; a < dim; ++a) ps.points(i, a) = radical_inverse(static_cast<std::uint64_t>(i + 1), kBases[a]);
  return ps;
}

PointMatrix map_to_box(const PointMatrix& unit_points, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  if (lo.size() != unit_points.cols() || hi.size() != unit_points.cols()) {
    throw std::invalid_argument("map_to_box: box dimension mismatch");
  }
  const Eigen::RowVectorXd extent = (hi - lo).transpose();
  return (unit_points.array().rowwise() * extent.array()).rowwise() + lo.transpose().array();
}

namespace {
constexpr char kPsetMagic[4] = {'P', 'S', 'E', 'T'};
}

void write_pset(const std::filesystem::path& path, const PointMatrix& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kPsetMagic, 4);
  const auto dim = static_cast<std::uint32_t>(points.cols());
  const auto count = static_cast<std::uint64_t>(points.rows());
  out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> interleaved = points;
  out.write(reinterpret_cast<const char*>(interleaved.data()), static_cast<std::streamsize>(interleaved.size() * sizeof(double)));
  if (!out) throw Error("write failed: " + path.string());
}

PointMatrix read_pset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[4];
  std::uint32_t dim = 0;
  std::uint64_t count = 0;
  if (!in.read(magic, 4) || std::memcmp(magic, kPsetMagic, 4) != 0) throw FormatError("PSET: bad magic");
  if (!in.read(reinterpret_cast<char*>(&dim), sizeof dim) || !in.read(reinterpret_cast<char*>(&count), sizeof count)) {
    throw FormatError("PSET: truncated header");
  }
  if (dim < 1 || dim > 16) throw FormatError("PSET: implausible dimension");
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> interleaved(static_cast<Eigen::Index>(count), dim);
  if (!in.read(reinterpret_cast<char*>(interleaved.data()), static_cast<std::streamsize>(interleaved.size() * sizeof(double)))) {
    throw FormatError("PSET: truncated coordinates");
  }
  return interleaved;
}

void write_points_csv(std::ostream& out, const PointMatrix& points) {
  static constexpr const char* kNames[] = {"x", "y", "z"};
  for (Eigen::Index a = 0; a < points.cols(); ++a) out << (a ? "," : "") << (a < 3 ? std::string(kNames[a]) : "c" + std::to_string(a));
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index a = 0; a < points.cols(); ++a) out << (a ? "," : "") << points(i, a);
    out << '\n';
  }
}

}  // namespace qmcsdf
