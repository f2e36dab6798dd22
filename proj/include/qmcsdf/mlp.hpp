#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "qmcsdf/mesh.hpp"
#include "qmcsdf/samplers.hpp"

namespace qmcsdf {

struct AdamParams {
  double lr = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Fully connected field regressor with leaky-rectifier hidden layers and a
/// linear output. All parameters live in one flat vector; layer l stores its
/// (out x in) column-major weight block followed by its bias.
class MlpRegressor {
 public:
  explicit MlpRegressor(std::vector<int> widths = {3, 64, 64, 1}, double leak = 0.01);

  /// He-uniform weights, zero biases.
  void initialize(std::uint64_t seed);

  const std::vector<int>& widths() const { return widths_; }
  int num_layers() const { return static_cast<int>(widths_.size()) - 1; }
  double leak() const { return leak_; }
  Eigen::Index num_params() const { return params_.size(); }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<Eigen::MatrixXd> weight(int layer);
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
  Eigen::Map<Eigen::VectorXd> bias(int layer);
  Eigen::Index weight_offset(int layer) const { return offsets_[static_cast<std::size_t>(layer)]; }

  /// Predictions for each row of `points`.
  Eigen::VectorXd forward_batch(const PointMatrix& points) const;

  // Adam state
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  long step_count = 0;

 private:
  std::vector<int> widths_;
  std::vector<Eigen::Index> offsets_;
  double leak_;
  Eigen::VectorXd params_;
};

double mlp_forward(const MlpRegressor& net, const Vec3& p);

struct LossAndGrad {
  double loss = 0.0;
  Eigen::VectorXd gradient;
};

/// Mean squared error over the batch and its gradient by reverse accumulation.
LossAndGrad loss_and_grad(const MlpRegressor& net, const PointMatrix& points, const Eigen::VectorXd& targets);

double mse_loss(const MlpRegressor& net, const PointMatrix& points, const Eigen::VectorXd& targets);

/// Bias-corrected Adam update; increments the step count.
void adam_step(MlpRegressor& net, const Eigen::VectorXd& gradient, const AdamParams& adam = {});

/// "MLPW", u32 layer-width count, u32 widths, f64 leak, f64 parameters.
void write_checkpoint(const std::filesystem::path& path, const MlpRegressor& net);
MlpRegressor read_checkpoint(const std::filesystem::path& path);

}  // namespace qmcsdf
