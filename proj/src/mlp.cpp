#include "qmcsdf/mlp.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "qmcsdf/errors.hpp"
#include "qmcsdf/rng.hpp"

namespace qmcsdf {

MlpRegressor::MlpRegressor(std::vector<int> widths, double leak) : widths_(std::move(widths)), leak_(leak) {
  if (widths_.size() < 2) throw std::invalid_argument("MlpRegressor: need at least input and output widths");
  Eigen::Index total = 0;
  for (int l = 0; l + 1 < static_cast<int>(widths_.size()); ++l) {
    if (widths_[static_cast<std::size_t>(l)] < 1 || widths_[static_cast<std::size_t>(l) + 1] < 1) {
      throw std::invalid_argument("MlpRegressor: widths must be positive");
    }
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(widths_[static_cast<std::size_t>(l)] + 1) * widths_[static_cast<std::size_t>(l) + 1];
  }
  params_ = Eigen::VectorXd::Zero(total);
  first_moment = Eigen::VectorXd::Zero(total);
  second_moment = Eigen::VectorXd::Zero(total);
}

void MlpRegressor::initialize(std::uint64_t seed) {
  Rng rng(seed);
  for (int l = 0; l < num_layers(); ++l) {
    const double bound = std::sqrt(6.0 / widths_[static_cast<std::size_t>(l)]);
    auto w = weight(l);
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = bound * (2.0 * uniform01(rng) - 1.0);
    bias(l).setZero();
  }
  first_moment.setZero();
  second_moment.setZero();
  step_count = 0;
}

Eigen::Map<const Eigen::MatrixXd> MlpRegressor::weight(int l) const {
  const auto in = widths_[static_cast<std::size_t>(l)], out = widths_[static_cast<std::size_t>(l) + 1];
  return {params_.data() + offsets_[static_cast<std::size_t>(l)], out, in};
}
Eigen::Map<Eigen::MatrixXd> MlpRegressor::weight(int l) {
  const auto in = widths_[static_cast<std::size_t>(l)], out = widths_[static_cast<std::size_t>(l) + 1];
  return {params_.data() + offsets_[static_cast<std::size_t>(l)], out, in};
}
Eigen::Map<const Eigen::VectorXd> MlpRegressor::bias(int l) const {
  const auto in = widths_[static_cast<std::size_t>(l)], out = widths_[static_cast<std::size_t>(l) + 1];
  return {params_.data() + offsets_[static_cast<std::size_t>(l)] + static_cast<Eigen::Index>(in) * out, out};
}
Eigen::Map<Eigen::VectorXd> MlpRegressor::bias(int l) {
  const auto in = widths_[static_cast<std::size_t>(l)], out = widths_[static_cast<std::size_t>(l) + 1];
  return {params_.data() + offsets_[static_cast<std::size_t>(l)] + static_cast<Eigen::Index>(in) * out, out};
}

namespace {

struct Activations {
  std::vector<Eigen::MatrixXd> pre;   // z_l, one column per sample
  std::vector<Eigen::MatrixXd> post;  // h_l; post[0] is the input
};

Activations forward_all(const MlpRegressor& net, const PointMatrix& points) {
  if (points.cols() != net.widths().front()) throw std::invalid_argument("mlp: input width mismatch");
  Activations a;
  a.post.push_back(points.transpose());
  const double leak = net.leak();
  for (int l = 0; l < net.num_layers(); ++l) {
    Eigen::MatrixXd z = net.weight(l) * a.post.back();
    z.colwise() += net.bias(l);
    a.pre.push_back(z);
    if (l + 1 < net.num_layers()) {
      a.post.push_back(z.unaryExpr([leak](double v) { return v > 0.0 ? v : leak * v; }));
    } else {
      a.post.push_back(z);
    }
  }
  return a;
}

}  // namespace

Eigen::VectorXd MlpRegressor::forward_batch(const PointMatrix& points) const {
  return forward_all(*this, points).post.back().row(0).transpose();
}

double mlp_forward(const MlpRegressor& net, const Vec3& p) {
  PointMatrix row(1, 3);
  row.row(0) = p.transpose();
  return net.forward_batch(row)[0];
}

double mse_loss(const MlpRegressor& net, const PointMatrix& points, const Eigen::VectorXd& targets) {
  if (points.rows() == 0 || points.rows() != targets.size()) throw std::invalid_argument("mse_loss: bad batch");
  return (net.forward_batch(points) - targets).squaredNorm() / static_cast<double>(targets.size());
}

LossAndGrad loss_and_grad(const MlpRegressor& net, const PointMatrix& points, const Eigen::VectorXd& targets) {
  const Eigen::Index batch = points.rows();
  if (batch == 0 || batch != targets.size()) throw std::invalid_argument("loss_and_grad: bad batch");
  const Activations a = forward_all(net, points);
  const Eigen::RowVectorXd residual = a.post.back().row(0) - targets.transpose();

  LossAndGrad out;
  out.loss = residual.squaredNorm() / static_cast<double>(batch);
  out.gradient = Eigen::VectorXd::Zero(net.num_params());

  Eigen::MatrixXd delta = (2.0 / static_cast<double>(batch)) * residual;
  const double leak = net.leak();
  for (int l = net.num_layers() - 1; l >= 0; --l) {
    const auto in = net.widths()[static_cast<std::size_t>(l)], outw = net.widths()[static_cast<std::size_t>(l) + 1];
    double* g = out.gradient.data() + net.weight_offset(l);
    Eigen::Map<Eigen::MatrixXd>(g, outw, in) = delta * a.post[static_cast<std::size_t>(l)].transpose();
    Eigen::Map<Eigen::VectorXd>(g + static_cast<Eigen::Index>(in) * outw, outw) = delta.rowwise().sum();
    if (l > 0) {
      const Eigen::MatrixXd slope = a.pre[static_cast<std::size_t>(l) - 1].unaryExpr([leak](double v) { return v > 0.0 ? 1.0 : leak; });
      delta = (net.weight(l).transpose() * delta).cwiseProduct(slope);
    }
  }
  return out;
}

void adam_step(MlpRegressor& net, const Eigen::VectorXd& gradient, const AdamParams& adam) {
  if (gradient.size() != net.num_params()) throw std::invalid_argument("adam_step: gradient shape mismatch");
  ++net.step_count;
  net.first_moment = adam.beta1 * net.first_moment + (1.0 - adam.beta1) * gradient;
  net.second_moment = adam.beta2 * net.second_moment + (1.0 - adam.beta2) * gradient.cwiseAbs2();
  const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(net.step_count));
  const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(net.step_count));
  net.params().array() -= adam.lr * (net.first_moment.array() / c1) / ((net.second_moment.array() / c2).sqrt() + adam.eps);
}

namespace {
constexpr char kMlpMagic[4] = {'M', 'L', 'P', 'W'};
}

void write_checkpoint(const std::filesystem::path& path, const MlpRegressor& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kMlpMagic, 4);
  const auto count = static_cast<std::uint32_t>(net.widths().size());
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  for (int w : net.widths()) {
    const auto v = static_cast<std::uint32_t>(w);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  const double leak = net.leak();
  out.write(reinterpret_cast<const char*>(&leak), sizeof leak);
  out.write(reinterpret_cast<const char*>(net.params().data()), static_cast<std::streamsize>(net.num_params() * sizeof(double)));
  if (!out) throw Error("write failed: " + path.string());
}

MlpRegressor read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[4];
  std::uint32_t count = 0;
  if (!in.read(magic, 4) || std::memcmp(magic, kMlpMagic, 4) != 0) throw FormatError("checkpoint: bad magic");
  if (!in.read(reinterpret_cast<char*>(&count), sizeof count) || count < 2 || count > 64) throw FormatError("checkpoint: bad header");
  std::vector<int> widths(count);
  for (auto& w : widths) {
    std::uint32_t v;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("checkpoint: truncated widths");
    w = static_cast<int>(v);
  }
  double leak = 0.0;
  if (!in.read(reinterpret_cast<char*>(&leak), sizeof leak)) throw FormatError("checkpoint: truncated header");
  MlpRegressor net(widths, leak);
  if (!in.read(reinterpret_cast<char*>(net.params().data()), static_cast<std::streamsize>(net.num_params() * sizeof(double)))) {
    throw FormatError("checkpoint: truncated parameters");
  }
  return net;
}

}  // namespace qmcsdf
