#include "qmcsdf/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qmcsdf/parallel.hpp"
#include "qmcsdf/rng.hpp"
#include "qmcsdf/subset.hpp"

namespace qmcsdf {

double star_discrepancy_2d_exact(const PointMatrix& points) {
  const Eigen::Index n = points.rows();
  if (n < 1) throw std::invalid_argument("star discrepancy of an empty set");
  if (points.cols() != 2) throw std::invalid_argument("star_discrepancy_2d_exact: points must be 2D");
  if (n > kExactDiscrepancyLimit) throw std::invalid_argument("star_discrepancy_2d_exact: set too large for exact mode");

  std::vector<double> ys(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ys[static_cast<std::size_t>(i)] = points(i, 1);
  ys.push_back(1.0);
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  const std::size_t m = ys.size();

  // points ordered by x, each with the rank of its y in ys
  std::vector<std::pair<double, std::size_t>> by_x(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto rank = static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), points(i, 1)) - ys.begin());
    by_x[static_cast<std::size_t>(i)] = {points(i, 0), rank};
  }
  std::sort(by_x.begin(), by_x.end());

  // column c covers points [starts[c], starts[c+1]) sharing one x value; the
  // final column is u = 1 with no points of its own
  std::vector<double> us;
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < by_x.size(); ++i) {
    if (i == 0 || by_x[i].first != by_x[i - 1].first) {
      us.push_back(by_x[i].first);
      starts.push_back(i);
    }
  }
  if (us.empty() || us.back() < 1.0) {
    us.push_back(1.0);
    starts.push_back(by_x.size());
  }
  starts.push_back(by_x.size());
  const std::size_t columns = us.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  const std::size_t chunks = std::min<std::size_t>(columns, static_cast<std::size_t>(worker_count()));
  std::vector<double> chunk_max(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c0, std::size_t c1) {
    for (std::size_t chunk = c0; chunk < c1; ++chunk) {
      const std::size_t col_begin = chunk * columns / chunks, col_end = (chunk + 1) * columns / chunks;
      std::vector<int> count(m, 0);
      for (std::size_t i = 0; i < starts[col_begin]; ++i) ++count[by_x[i].second];
      double best = 0.0;
      for (std::size_t c = col_begin; c < col_end; ++c) {
        const double u = us[c];
        // open box [0,u) x [0,v): points strictly left, y strictly below
        int below = 0;
        for (std::size_t j = 0; j < m; ++j) {
          best = std::max(best, u * ys[j] - below * inv_n);
          below += count[j];
        }
        for (std::size_t i = starts[c]; i < starts[c + 1]; ++i) ++count[by_x[i].second];
        // closed box [0,u] x [0,v]
        int upto = 0;
        for (std::size_t j = 0; j < m; ++j) {
          upto += count[j];
          best = std::max(best, upto * inv_n - u * ys[j]);
        }
      }
      chunk_max[chunk] = best;
    }
  });
  return *std::max_element(chunk_max.begin(), chunk_max.end());
}

double star_discrepancy_estimate(const PointMatrix& points, Eigen::Index n_probes, std::uint64_t seed) {
  if (n_probes < 1) throw std::invalid_argument("star_discrepancy_estimate: n_probes must be >= 1");
  const Eigen::Index n = points.rows(), d = points.cols();
  if (n < 1) throw std::invalid_argument("star discrepancy of an empty set");
  Rng rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Eigen::VectorXd corner(d);
  double best = 0.0;
  for (Eigen::Index probe = 0; probe < n_probes; ++probe) {
    for (Eigen::Index a = 0; a < d; ++a) {
      const bool from_point = (rng() >> 63) != 0;
      const Eigen::Index row = pick(rng);
      const double r = uniform01(rng);
      corner[a] = from_point ? points(row, a) : r;
    }
    Eigen::Index open = 0, closed = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      bool in_open = true, in_closed = true;
      for (Eigen::Index a = 0; a < d; ++a) {
        in_open = in_open && points(i, a) < corner[a];
        in_closed = in_closed && points(i, a) <= corner[a];
      }
      open += in_open;
      closed += in_closed;
    }
    const double volume = corner.prod();
    best = std::max({best, volume - static_cast<double>(open) / n, static_cast<double>(closed) / n - volume});
  }
  return best;
}

std::uint64_t trial_seed(std::uint64_t root, int trial) { return derive_seed(root, "trial", static_cast<std::uint64_t>(trial)); }

PointSet make_initial_set(const std::string& sampler, int side, double jitter_sigma, std::uint64_t seed) {
  const Eigen::Index n = static_cast<Eigen::Index>(side) * side;
  if (sampler == "grid") return gen_grid(side, 2);
  if (sampler == "jitter") return gen_jitter(side, 2, jitter_sigma, derive_seed(seed, "jitter"));
  if (sampler == "sobol") return gen_sobol(n, 2);
  if (sampler == "halton") return gen_halton(n, 2);
  if (sampler == "random") return gen_random(n, 2, derive_seed(seed, "random"));
  throw std::invalid_argument("unknown sampler '" + sampler + "'");
}

std::string experiment_label(const std::string& sampler, const std::string& selector) {
  auto cap = [](std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
  };
  return cap(sampler) + "+" + (selector == "fps" ? std::string("FPS") : cap(selector));
}

std::vector<DiscrepancyReport> run_discrepancy_experiment(const DiscrepancyExperiment& ex) {
  if (ex.selector != "fps" && ex.selector != "random") throw std::invalid_argument("unknown selector '" + ex.selector + "'");
  if (ex.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (ex.subset_sizes.empty()) throw std::invalid_argument("no subset sizes");
  make_initial_set(ex.sampler, 2, ex.jitter_sigma, 0);  // validates the sampler name early

  const Eigen::Index max_k = *std::max_element(ex.subset_sizes.begin(), ex.subset_sizes.end());
  const std::size_t sizes = ex.subset_sizes.size();
  std::vector<std::vector<double>> values(sizes, std::vector<double>(static_cast<std::size_t>(ex.trials)));
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(ex.trials));

  parallel_for(static_cast<std::size_t>(ex.trials), [&](std::size_t t0, std::size_t t1) {
    for (std::size_t t = t0; t < t1; ++t) {
      const std::uint64_t seed = trial_seed(ex.seed, static_cast<int>(t));
      seeds[t] = seed;
      const PointSet initial = make_initial_set(ex.sampler, ex.initial_side, ex.jitter_sigma, seed);
      if (max_k > initial.size()) throw std::invalid_argument("subset size exceeds initial set size");
      const std::uint64_t select_seed = derive_seed(seed, "select");
      IndexList picks = ex.selector == "fps" ? fps_select(initial.points, max_k, select_seed)
                                             : random_select(initial.size(), max_k, select_seed);
      for (std::size_t s = 0; s < sizes; ++s) {
        // FPS prefixes are FPS runs of the smaller size; random prefixes are uniform subsets
        IndexList prefix(picks.begin(), picks.begin() + ex.subset_sizes[s]);
        values[s][t] = star_discrepancy_2d_exact(gather_rows(initial.points, prefix));
      }
    }
  });

  std::vector<DiscrepancyReport> reports;
  for (std::size_t s = 0; s < sizes; ++s) {
    DiscrepancyReport r;
    r.label = experiment_label(ex.sampler, ex.selector);
    r.initial_size = static_cast<Eigen::Index>(ex.initial_side) * ex.initial_side;
    r.subset_size = ex.subset_sizes[s];
    r.trials = ex.trials;
    r.values = values[s];
    r.seeds = seeds;
    const double n = static_cast<double>(r.values.size());
    r.mean = std::accumulate(r.values.begin(), r.values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : r.values) ss += (v - r.mean) * (v - r.mean);
    r.stddev = r.values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace qmcsdf
