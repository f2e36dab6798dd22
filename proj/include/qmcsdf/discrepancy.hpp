#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmcsdf/samplers.hpp"

namespace qmcsdf {

/// Largest set accepted by the exact 2D computation.
inline constexpr Eigen::Index kExactDiscrepancyLimit = 10000;

/// Exact star discrepancy of a 2D set in [0,1)^2. Every critical corner
/// (x-coordinates and 1) x (y-coordinates and 1) is checked with both the
/// open and the closed anchored box. O(N^2) column sweep.
double star_discrepancy_2d_exact(const PointMatrix& points);

/// Lower bound on the star discrepancy in any dimension from `n_probes`
/// corners; each corner coordinate is either a point coordinate or uniform.
/// Probe sets for the same seed are nested in n_probes.
double star_discrepancy_estimate(const PointMatrix& points, Eigen::Index n_probes, std::uint64_t seed);

struct DiscrepancyExperiment {
  std::string sampler = "grid";  // grid | jitter | sobol | random | halton
  int initial_side = 256;        // initial set has side^2 points
  double jitter_sigma = 0.01;
  std::string selector = "fps";  // fps | random
  std::vector<Eigen::Index> subset_sizes{1024, 2048, 4096};
  int trials = 10;
  std::uint64_t seed = 0;
};

struct DiscrepancyReport {
  std::string label;  // e.g. "Grid+FPS"
  Eigen::Index initial_size = 0;
  Eigen::Index subset_size = 0;
  int trials = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
};

/// Seed of trial t; shared across samplers/selectors so runs pair up.
std::uint64_t trial_seed(std::uint64_t root, int trial);

/// Initial 2D set of a named sampler for one trial.
PointSet make_initial_set(const std::string& sampler, int side, double jitter_sigma, std::uint64_t trial_seed);

/// One report per subset size. Trials run in parallel.
std::vector<DiscrepancyReport> run_discrepancy_experiment(const DiscrepancyExperiment& experiment);

std::string experiment_label(const std::string& sampler, const std::string& selector);

}  // namespace qmcsdf
