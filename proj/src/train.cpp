#include "qmcsdf/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "qmcsdf/discrepancy.hpp"
#include "qmcsdf/rng.hpp"

namespace qmcsdf {

TrainingData attach_sdf(const SdfGrid& grid, const PointMatrix& points) {
  if (points.cols() != 3) throw std::invalid_argument("attach_sdf: points must be 3D");
  TrainingData out{points, Eigen::VectorXd(points.rows())};
  for (Eigen::Index i = 0; i < points.rows(); ++i) out.sdf[i] = trilinear(grid, points.row(i).transpose());
  return out;
}

double accuracy(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets, double band) {
  if (predictions.size() != targets.size() || targets.size() == 0) throw std::invalid_argument("accuracy: size mismatch");
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    const bool same_sign = (predictions[i] < 0.0) == (targets[i] < 0.0);
    const bool both_near = std::abs(targets[i]) <= band && std::abs(predictions[i]) <= band;
    correct += (same_sign || both_near) ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(targets.size());
}

double accuracy(const MlpRegressor& net, const TrainingData& data, double band) {
  return accuracy(net.forward_batch(data.points), data.sdf, band);
}

namespace {

PointSet initial_unit_set(const DatasetConfig& c) {
  const Eigen::Index n = static_cast<Eigen::Index>(c.resolution) * c.resolution * c.resolution;
  if (c.sampler == "grid") return gen_grid(c.resolution, 3);
  if (c.sampler == "jitter") return gen_jitter(c.resolution, 3, c.jitter_sigma, derive_seed(c.seed, "jitter"));
  if (c.sampler == "sobol") return gen_sobol(n, 3);
  if (c.sampler == "random") return gen_random(n, 3, derive_seed(c.seed, "initial"));
  throw std::invalid_argument("unknown sampler '" + c.sampler + "'");
}

TrainingData near_surface(const SdfGrid& grid, const PointMatrix& unit_points, double cutoff) {
  const Eigen::VectorXd lo = grid.box().min(), hi = grid.box().max();
  const TrainingData all = attach_sdf(grid, map_to_box(unit_points, lo, hi));
  IndexList keep;
  for (Eigen::Index i = 0; i < all.size(); ++i)
    if (std::abs(all.sdf[i]) <= cutoff) keep.push_back(i);
  return {gather_rows(all.points, keep), gather(all.sdf, keep)};
}

}  // namespace

Dataset build_dataset(const SdfGrid& grid, const DatasetConfig& c) {
  Dataset ds;
  const TrainingData grid_near = near_surface(grid, gen_grid(c.resolution, 3).points, c.near_band);
  if (grid_near.size() < c.validation_size) throw std::invalid_argument("build_dataset: too few near-surface grid nodes for validation");
  const IndexList val_idx = fps_select(grid_near.points, c.validation_size, derive_seed(c.seed, "validation"));
  ds.validation = {gather_rows(grid_near.points, val_idx), gather(grid_near.sdf, val_idx)};

  if (c.sampler == "grid") {
    std::vector<bool> held(static_cast<std::size_t>(grid_near.size()), false);
    for (Eigen::Index i : val_idx) held[static_cast<std::size_t>(i)] = true;
    IndexList rest;
    for (Eigen::Index i = 0; i < grid_near.size(); ++i)
      if (!held[static_cast<std::size_t>(i)]) rest.push_back(i);
    ds.initial = {gather_rows(grid_near.points, rest), gather(grid_near.sdf, rest)};
  } else {
    ds.initial = near_surface(grid, initial_unit_set(c).points, c.near_band);
  }

  const Eigen::Index k = std::min(c.train_size, ds.initial.size());
  if (k < c.train_size) ds.warnings.push_back("initial set holds fewer near-surface points than the requested pool size");
  BandSelection sel = band_select(ds.initial.sdf, c.bands, k, derive_seed(c.seed, "bands"));
  ds.warnings.insert(ds.warnings.end(), sel.warnings.begin(), sel.warnings.end());
  ds.train = {gather_rows(ds.initial.points, sel.indices), gather(ds.initial.sdf, sel.indices)};
  return ds;
}

TrainRun train(const TrainingData& pool, const TrainingData& validation, const TrainConfig& c) {
  if (c.selector != "fps" && c.selector != "random") throw std::invalid_argument("unknown selector '" + c.selector + "'");
  if (c.epochs < 0 || c.step_batch < 1) throw std::invalid_argument("train: bad epoch or batch configuration");
  if (pool.size() < c.epoch_points) throw std::invalid_argument("train: pool smaller than the epoch set");

  TrainRun run{c.seed, c.selector, 0.0, {}, MlpRegressor(c.widths), kAccuracyDefinition};
  run.net.initialize(derive_seed(c.seed, "init"));
  run.initial_accuracy = accuracy(run.net, validation, c.accuracy_band);

  for (int epoch = 1; epoch <= c.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t epoch_seed = derive_seed(c.seed, "epoch", static_cast<std::uint64_t>(epoch));
    const IndexList chosen = c.selector == "fps" ? fps_select(pool.points, c.epoch_points, epoch_seed)
                                                 : random_select(pool.size(), c.epoch_points, epoch_seed);
    IndexList order = chosen;
    Rng shuffle_rng(derive_seed(epoch_seed, "shuffle"));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(c.step_batch)) {
      const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(c.step_batch));
      const IndexList batch(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(end));
      const LossAndGrad lg = loss_and_grad(run.net, gather_rows(pool.points, batch), gather(pool.sdf, batch));
      adam_step(run.net, lg.gradient, c.adam);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = mse_loss(run.net, gather_rows(pool.points, chosen), gather(pool.sdf, chosen));
    rec.accuracy = accuracy(run.net, validation, c.accuracy_band);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    run.history.push_back(rec);
  }
  return run;
}

void write_train_csv(std::ostream& out, const TrainRun& run) {
  out << "# selector=" << run.selector << " seed=" << run.seed << " accuracy=" << run.accuracy_definition << '\n';
  out << "epoch,loss,accuracy,seconds\n" << std::setprecision(17);
  out << 0 << ",," << run.initial_accuracy << ",0\n";
  for (const auto& r : run.history) out << r.epoch << ',' << r.loss << ',' << r.accuracy << ',' << r.seconds << '\n';
}

}  // namespace qmcsdf
