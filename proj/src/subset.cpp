#include "qmcsdf/subset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qmcsdf/errors.hpp"
#include "qmcsdf/rng.hpp"

namespace qmcsdf {

namespace {
void check_k(Eigen::Index n, Eigen::Index k, const char* who) {
  if (k < 1 || k > n) throw std::invalid_argument(std::string(who) + ": k must be in [1, number of candidates]");
}
}  // namespace

namespace {
template <int Dim>
FpsResult fps_kernel(const PointMatrix& candidates, Eigen::Index k, Eigen::Index first) {
  const Eigen::Index n = candidates.rows();
  const Eigen::Index dim = Dim > 0 ? Dim : candidates.cols();
  FpsResult out;
  out.indices.reserve(static_cast<std::size_t>(k));
  out.insertion_radius.reserve(static_cast<std::size_t>(k));
  // squared distance to the chosen set; chosen entries hold -1
  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  double* md = nearest.data();
  std::vector<const double*> cols(static_cast<std::size_t>(dim));
  for (Eigen::Index a = 0; a < dim; ++a) cols[static_cast<std::size_t>(a)] = candidates.col(a).data();

  Eigen::Index current = first;
  double radius_sq = std::numeric_limits<double>::infinity();
  for (Eigen::Index step = 0;; ++step) {
    out.indices.push_back(current);
    out.insertion_radius.push_back(std::sqrt(radius_sq));
    md[current] = -1.0;
    if (step + 1 == k) break;

    double c[Dim > 0 ? Dim : 1];
    std::vector<double> cdyn(Dim > 0 ? 0 : static_cast<std::size_t>(dim));
    double* cp = Dim > 0 ? c : cdyn.data();
    for (Eigen::Index a = 0; a < dim; ++a) cp[a] = candidates(current, a);

    Eigen::Index best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      double d2 = 0.0;
      for (Eigen::Index a = 0; a < dim; ++a) {
        const double d = cols[static_cast<std::size_t>(a)][i] - cp[a];
        d2 += d * d;
      }
      const double m = std::min(md[i], d2);
      md[i] = m;
      // strict comparison keeps the smallest index among ties
      if (m > best_value) {
        best_value = m;
        best = i;
      }
    }
    current = best;
    radius_sq = best_value;
  }
  return out;
}
}  // namespace

FpsResult fps_select_from(const PointMatrix& candidates, Eigen::Index k, Eigen::Index first) {
  const Eigen::Index n = candidates.rows();
  check_k(n, k, "fps_select");
  if (first < 0 || first >= n) throw std::invalid_argument("fps_select: first index out of range");
  switch (candidates.cols()) {
    case 2: return fps_kernel<2>(candidates, k, first);
    case 3: return fps_kernel<3>(candidates, k, first);
    default: return fps_kernel<0>(candidates, k, first);
  }
}

Eigen::Index fps_first_index(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("fps_select: no candidates");
  Rng rng(seed);
  return std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
}

IndexList fps_select(const PointMatrix& candidates, Eigen::Index k, std::uint64_t seed) {
  check_k(candidates.rows(), k, "fps_select");
  return fps_select_from(candidates, k, fps_first_index(candidates.rows(), seed)).indices;
}

IndexList random_select(Eigen::Index n, Eigen::Index k, std::uint64_t seed) {
  check_k(n, k, "random_select");
  IndexList pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Eigen::Index{0});
  Rng rng(seed);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index j = std::uniform_int_distribution<Eigen::Index>(i, n - 1)(rng);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

BandSpec BandSpec::near_surface() {
  return BandSpec{{{-0.10, -0.03}, {-0.03, 0.0}, {0.0, 0.03}, {0.03, 0.10}}, {0.25, 0.25, 0.25, 0.25}};
}

void BandSpec::validate() const {
  if (bands.empty() || bands.size() != fractions.size()) throw std::invalid_argument("BandSpec: need one fraction per band");
  double sum = 0.0;
  for (std::size_t b = 0; b < bands.size(); ++b) {
    if (!(bands[b].first < bands[b].second)) throw std::invalid_argument("BandSpec: empty interval");
    if (b > 0 && bands[b].first < bands[b - 1].second) throw std::invalid_argument("BandSpec: intervals overlap or are unordered");
    if (!(fractions[b] >= 0.0)) throw std::invalid_argument("BandSpec: negative fraction");
    sum += fractions[b];
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("BandSpec: fractions must sum to 1");
}

int BandSpec::band_of(double value) const {
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const bool last = b + 1 == bands.size();
    if (value >= bands[b].first && (value < bands[b].second || (last && value == bands[b].second))) return static_cast<int>(b);
  }
  return -1;
}

namespace {

// Splits `amount` over bands proportionally to `weights`, floor first and then
// one extra per band in listed order.
std::vector<Eigen::Index> apportion(Eigen::Index amount, const std::vector<double>& weights) {
  std::vector<Eigen::Index> share(weights.size(), 0);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0) || amount <= 0) return share;
  Eigen::Index given = 0;
  for (std::size_t b = 0; b < weights.size(); ++b) {
    share[b] = static_cast<Eigen::Index>(std::floor(static_cast<double>(amount) * weights[b] / total));
    given += share[b];
  }
  for (std::size_t b = 0; given < amount; b = (b + 1) % weights.size()) {
    if (weights[b] > 0.0) {
      ++share[b];
      ++given;
    }
  }
  return share;
}

}  // namespace

BandSelection band_select(const Eigen::VectorXd& sdf, const BandSpec& spec, Eigen::Index k, std::uint64_t seed) {
  spec.validate();
  if (k < 1) throw std::invalid_argument("band_select: k must be >= 1");
  const std::size_t nb = spec.bands.size();
  std::vector<IndexList> members(nb);
  for (Eigen::Index i = 0; i < sdf.size(); ++i) {
    const int b = spec.band_of(sdf[i]);
    if (b >= 0) members[static_cast<std::size_t>(b)].push_back(i);
  }
  Eigen::Index available = 0;
  for (const auto& m : members) available += static_cast<Eigen::Index>(m.size());
  if (available == 0) throw Error("band_select: every band is empty");

  BandSelection out;
  std::vector<Eigen::Index> quota = apportion(k, spec.fractions);
  std::vector<bool> full(nb, false);
  for (;;) {
    Eigen::Index deficit = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      const auto cap = static_cast<Eigen::Index>(members[b].size());
      if (quota[b] >= cap && !full[b]) {
        full[b] = true;
        if (quota[b] > cap) {
          out.warnings.push_back("band " + std::to_string(b) + " holds " + std::to_string(cap) + " candidates, quota " +
                                 std::to_string(quota[b]) + "; deficit redistributed");
          deficit += quota[b] - cap;
          quota[b] = cap;
        }
      }
    }
    if (deficit == 0) break;
    std::vector<double> weights(nb, 0.0);
    bool any_open = false;
    for (std::size_t b = 0; b < nb; ++b) {
      if (!full[b]) {
        weights[b] = spec.fractions[b];
        any_open = true;
      }
    }
    if (!any_open) {
      out.warnings.push_back("only " + std::to_string(available) + " candidates in range; selecting all of them");
      break;
    }
    // open bands with zero fraction still absorb overflow, evenly
    if (std::accumulate(weights.begin(), weights.end(), 0.0) == 0.0) {
      for (std::size_t b = 0; b < nb; ++b) weights[b] = full[b] ? 0.0 : 1.0;
    }
    const auto extra = apportion(deficit, weights);
    for (std::size_t b = 0; b < nb; ++b) quota[b] += extra[b];
  }

  out.per_band.assign(nb, 0);
  for (std::size_t b = 0; b < nb; ++b) {
    if (quota[b] == 0) continue;
    const auto n = static_cast<Eigen::Index>(members[b].size());
    for (Eigen::Index local : random_select(n, quota[b], derive_seed(seed, "band", b))) {
      out.indices.push_back(members[b][static_cast<std::size_t>(local)]);
      out.band.push_back(static_cast<int>(b));
    }
    out.per_band[b] = quota[b];
  }
  return out;
}

namespace {
constexpr char kIndexMagic[4] = {'I', 'D', 'X', 'L'};
}

void write_index_list(const std::filesystem::path& path, const IndexList& indices) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kIndexMagic, 4);
  const auto count = static_cast<std::uint64_t>(indices.size());
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  for (Eigen::Index i : indices) {
    const auto v = static_cast<std::uint64_t>(i);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  if (!out) throw Error("write failed: " + path.string());
}

IndexList read_index_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[4];
  std::uint64_t count = 0;
  if (!in.read(magic, 4) || std::memcmp(magic, kIndexMagic, 4) != 0) throw FormatError("index list: bad magic");
  if (!in.read(reinterpret_cast<char*>(&count), sizeof count)) throw FormatError("index list: truncated header");
  IndexList out(static_cast<std::size_t>(count));
  for (auto& i : out) {
    std::uint64_t v;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("index list: truncated body");
    i = static_cast<Eigen::Index>(v);
  }
  return out;
}

PointMatrix gather_rows(const PointMatrix& points, const IndexList& indices) {
  PointMatrix out(static_cast<Eigen::Index>(indices.size()), points.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = points.row(indices[r]);
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& values, const IndexList& indices) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t r = 0; r < indices.size(); ++r) out[static_cast<Eigen::Index>(r)] = values[indices[r]];
  return out;
}

}  // namespace qmcsdf
