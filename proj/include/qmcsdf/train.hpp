#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qmcsdf/mlp.hpp"
#include "qmcsdf/sdf.hpp"
#include "qmcsdf/subset.hpp"

namespace qmcsdf {

/// Points (rows) with their target SDF values.
struct TrainingData {
  PointMatrix points;
  Eigen::VectorXd sdf;

  Eigen::Index size() const { return points.rows(); }
};

/// Target values for `points` by trilinear lookup in `grid`.
TrainingData attach_sdf(const SdfGrid& grid, const PointMatrix& points);

inline constexpr const char* kAccuracyDefinition =
    "banded sign agreement: sign(prediction) == sign(target), or |target| <= band and |prediction| <= band";

/// Fraction of points whose predicted sign matches the target; near-surface
/// targets (|target| <= band) also count when |prediction| <= band.
double accuracy(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets, double band = 0.01);
double accuracy(const MlpRegressor& net, const TrainingData& data, double band = 0.01);

struct DatasetConfig {
  std::string sampler = "grid";  // grid | jitter | sobol | random
  int resolution = 64;           // initial set has resolution^3 points over the grid box
  double jitter_sigma = 0.02;    // in unit-cube coordinates
  double near_band = 0.10;       // |sdf| cutoff before band selection
  Eigen::Index train_size = 8192;
  Eigen::Index validation_size = 4096;
  BandSpec bands = BandSpec::near_surface();
  std::uint64_t seed = 0;
};

struct Dataset {
  TrainingData initial;     // near-surface part of the initial set
  TrainingData train;       // band-selected training pool
  TrainingData validation;  // grid + FPS hold-out
  std::vector<std::string> warnings;
};

/// Initial set -> |sdf| <= near_band -> band selection. The validation set is
/// drawn by FPS from the near-surface grid nodes and removed from the pool.
Dataset build_dataset(const SdfGrid& grid, const DatasetConfig& config);

struct TrainConfig {
  std::string selector = "fps";  // fps | random
  int epochs = 30;
  Eigen::Index epoch_points = 2048;
  Eigen::Index step_batch = 64;
  AdamParams adam;
  std::vector<int> widths{3, 64, 64, 1};
  double accuracy_band = 0.01;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;      // MSE on the epoch set after the epoch's updates
  double accuracy = 0.0;  // on the validation set
  double seconds = 0.0;
};

struct TrainRun {
  std::uint64_t seed = 0;
  std::string selector;
  double initial_accuracy = 0.0;
  std::vector<EpochRecord> history;
  MlpRegressor net;
  std::string accuracy_definition = kAccuracyDefinition;
};

/// Each epoch selects `epoch_points` from the pool (epoch-derived seed), then
/// runs Adam over shuffled mini-batches. The network initialization depends
/// only on the seed, so runs that differ in selector start identically.
TrainRun train(const TrainingData& pool, const TrainingData& validation, const TrainConfig& config);

void write_train_csv(std::ostream& out, const TrainRun& run);

}  // namespace qmcsdf
