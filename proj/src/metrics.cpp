#include "qmcsdf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qmcsdf/errors.hpp"
#include "qmcsdf/parallel.hpp"
#include "qmcsdf/rng.hpp"

namespace qmcsdf {

PointMatrix sample_surface(const TriangleMesh& mesh, Eigen::Index n, std::uint64_t seed) {
  if (mesh.empty()) throw EmptyMeshError("sample_surface: empty mesh");
  if (n < 0) throw std::invalid_argument("sample_surface: negative count");
  std::vector<double> cdf(static_cast<std::size_t>(mesh.num_triangles()));
  double total = 0.0;
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    total += triangle_area(mesh, t);
    cdf[static_cast<std::size_t>(t)] = total;
  }
  if (!(total > 0.0)) throw DegenerateMeshError("sample_surface: mesh has zero area");

  Rng rng(seed);
  PointMatrix out(n, 3);
  for (Eigen::Index s = 0; s < n; ++s) {
    const double u = uniform01(rng) * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const Eigen::Index t = std::min<Eigen::Index>(it - cdf.begin(), mesh.num_triangles() - 1);
    const double r1 = std::sqrt(uniform01(rng));
    const double r2 = uniform01(rng);
    const Vec3 p = (1.0 - r1) * mesh.corner(t, 0) + r1 * (1.0 - r2) * mesh.corner(t, 1) + r1 * r2 * mesh.corner(t, 2);
    out.row(s) = p.transpose();
  }
  return out;
}

KdTree::KdTree(const PointMatrix& points) : points_(points) {
  if (points.cols() != 3) throw std::invalid_argument("KdTree: points must be 3D");
  if (points.rows() == 0) throw std::invalid_argument("KdTree: empty point set");
  order_.resize(static_cast<std::size_t>(points.rows()));
  std::iota(order_.begin(), order_.end(), 0);
  build(0, static_cast<int>(order_.size()));
}

int KdTree::build(int first, int count) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});
  nodes_.back().first = first;
  nodes_.back().count = count;
  if (count <= 8) return id;

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (int i = first; i < first + count; ++i) {
    const Vec3 p = points_.row(order_[static_cast<std::size_t>(i)]).transpose();
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const int half = count / 2;
  auto begin = order_.begin() + first;
  std::nth_element(begin, begin + half, begin + count,
                   [&](int a, int b) { return points_(a, axis) < points_(b, axis); });
  const double split = points_(order_[static_cast<std::size_t>(first + half)], axis);
  const int left = build(first, half);
  const int right = build(first + half, count - half);
  Node& node = nodes_[static_cast<std::size_t>(id)];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void KdTree::search(int id, const Vec3& q, double& best, Eigen::Index& best_index) const {
  const Node& node = nodes_[static_cast<std::size_t>(id)];
  if (node.axis < 0) {
    for (int i = node.first; i < node.first + node.count; ++i) {
      const int p = order_[static_cast<std::size_t>(i)];
      const double dx = points_(p, 0) - q.x();
      const double dy = points_(p, 1) - q.y();
      const double dz = points_(p, 2) - q.z();
      const double d = dx * dx + dy * dy + dz * dz;
      if (d < best || (d == best && p < best_index)) {
        best = d;
        best_index = p;
      }
    }
    return;
  }
  const double delta = q[node.axis] - node.split;
  const int near = delta < 0.0 ? node.left : node.right;
  const int far = delta < 0.0 ? node.right : node.left;
  search(near, q, best, best_index);
  if (delta * delta <= best) search(far, q, best, best_index);
}

std::pair<double, Eigen::Index> KdTree::nearest(const Vec3& q) const {
  double best = std::numeric_limits<double>::infinity();
  Eigen::Index index = -1;
  search(0, q, best, index);
  return {best, index};
}

namespace {

void check_sets(const PointMatrix& a, const PointMatrix& b, const char* who) {
  if (a.rows() == 0 || b.rows() == 0) throw std::invalid_argument(std::string(who) + ": empty point set");
  if (a.cols() != 3 || b.cols() != 3) throw std::invalid_argument(std::string(who) + ": points must be 3D");
}

double directed(const PointMatrix& from, const KdTree& to) {
  std::vector<double> d(static_cast<std::size_t>(from.rows()));
  parallel_for(d.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) d[i] = to.nearest(from.row(static_cast<Eigen::Index>(i)).transpose()).first;
  });
  return std::accumulate(d.begin(), d.end(), 0.0);
}

}  // namespace

double chamfer(const PointMatrix& a, const PointMatrix& b) {
  check_sets(a, b, "chamfer");
  return directed(a, KdTree(b)) + directed(b, KdTree(a));
}

double chamfer_brute_force(const PointMatrix& a, const PointMatrix& b) {
  check_sets(a, b, "chamfer");
  auto one_way = [](const PointMatrix& from, const PointMatrix& to) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < from.rows(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < to.rows(); ++j) {
        const double dx = to(j, 0) - from(i, 0);
        const double dy = to(j, 1) - from(i, 1);
        const double dz = to(j, 2) - from(i, 2);
        best = std::min(best, dx * dx + dy * dy + dz * dz);
      }
      sum += best;
    }
    return sum;
  };
  return one_way(a, b) + one_way(b, a);
}

std::vector<Eigen::Index> optimal_assignment(const Eigen::MatrixXd& cost) {
  const Eigen::Index n = cost.rows();
  if (n != cost.cols()) throw std::invalid_argument("optimal_assignment: cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  // shortest augmenting path with row/column potentials; 1-based, column 0 is a sentinel
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Eigen::Index> match(static_cast<std::size_t>(n + 1), 0);
  std::vector<Eigen::Index> way(static_cast<std::size_t>(n + 1), 0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    match[0] = i;
    Eigen::Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Eigen::Index i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const Eigen::Index j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Eigen::Index> assignment(static_cast<std::size_t>(n));
  for (Eigen::Index j = 1; j <= n; ++j) assignment[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return assignment;
}

namespace {

Eigen::MatrixXd distance_matrix(const PointMatrix& a, const PointMatrix& b) {
  Eigen::MatrixXd c(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) c(i, j) = (a.row(i) - b.row(j)).norm();
  return c;
}

void check_equal_sets(const PointMatrix& a, const PointMatrix& b, const char* who) {
  check_sets(a, b, who);
  if (a.rows() != b.rows()) throw std::invalid_argument(std::string(who) + ": sets must have equal size");
}

}  // namespace

double emd_exact(const PointMatrix& a, const PointMatrix& b) {
  check_equal_sets(a, b, "emd_exact");
  if (a.rows() > kExactEmdLimit) throw std::invalid_argument("emd_exact: at most 512 points per set");
  const Eigen::MatrixXd c = distance_matrix(a, b);
  const auto assignment = optimal_assignment(c);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) sum += c(i, assignment[static_cast<std::size_t>(i)]);
  return sum / static_cast<double>(a.rows());
}

namespace {

// out_i = -eps * log sum_j exp((pot_j - C_ji) / eps) + eps * log(weight), C = cost_t
void soft_min(const Eigen::MatrixXd& cost_t, const Eigen::VectorXd& pot, double eps, double log_weight,
              Eigen::VectorXd& out) {
  const Eigen::Index m = cost_t.rows();
  parallel_for(static_cast<std::size_t>(cost_t.cols()), [&](std::size_t begin, std::size_t end) {
    for (std::size_t ii = begin; ii < end; ++ii) {
      const Eigen::Index i = static_cast<Eigen::Index>(ii);
      double hi = -std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < m; ++j) hi = std::max(hi, (pot[j] - cost_t(j, i)) / eps);
      double s = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) s += std::exp((pot[j] - cost_t(j, i)) / eps - hi);
      out[i] = -eps * (hi + std::log(s)) + eps * log_weight;
    }
  });
}

}  // namespace

namespace {

// One scaling chain; `f_first` picks which potential is updated first.
EntropicResult sinkhorn_chain(const Eigen::MatrixXd& c, const Eigen::MatrixXd& ct, double reg, int max_iterations,
                              double tolerance, bool f_first) {
  const Eigen::Index n = c.rows();
  const double log_w = -std::log(static_cast<double>(n));
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  EntropicResult out;
  double eps = std::max(c.maxCoeff(), reg);
  auto marginal_error = [&](double e) {
    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double row = 0.0;
      double col = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        row += std::exp((f[i] + g[j] - c(i, j)) / e);
        col += std::exp((f[j] + g[i] - c(j, i)) / e);
      }
      err += std::abs(row - 1.0 / static_cast<double>(n)) + std::abs(col - 1.0 / static_cast<double>(n));
    }
    return err;
  };
  for (;;) {
    const bool final_stage = eps <= reg;
    const double stage_tol = final_stage ? tolerance : std::max(tolerance, 1e-3);
    for (;;) {
      if (f_first) {
        soft_min(ct, g, eps, log_w, f);
        soft_min(c, f, eps, log_w, g);
      } else {
        soft_min(c, f, eps, log_w, g);
        soft_min(ct, g, eps, log_w, f);
      }
      ++out.iterations;
      if (out.iterations % 10 == 0 || out.iterations >= max_iterations) {
        out.marginal_error = marginal_error(eps);
        if (out.marginal_error < stage_tol) break;
      }
      if (out.iterations >= max_iterations) break;
    }
    if (final_stage || out.iterations >= max_iterations) {
      out.converged = final_stage && out.marginal_error < tolerance;
      break;
    }
    eps = std::max(eps * 0.5, reg);
  }
  double value = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) value += std::exp((f[i] + g[j] - c(i, j)) / eps) * c(i, j);
  out.value = value;
  return out;
}

}  // namespace

EntropicResult emd_entropic(const PointMatrix& a, const PointMatrix& b, double reg, int max_iterations,
                            double tolerance) {
  check_equal_sets(a, b, "emd_entropic");
  if (!(reg > 0.0)) throw std::invalid_argument("emd_entropic: reg must be positive");
  if (max_iterations < 1) throw std::invalid_argument("emd_entropic: max_iterations must be positive");
  const Eigen::MatrixXd c = distance_matrix(a, b);
  const Eigen::MatrixXd ct = c.transpose();
  // swapping the inputs exchanges the two chains, so the mean is symmetric
  const EntropicResult x = sinkhorn_chain(c, ct, reg, max_iterations, tolerance, true);
  const EntropicResult y = sinkhorn_chain(c, ct, reg, max_iterations, tolerance, false);
  EntropicResult out;
  out.value = 0.5 * (x.value + y.value);
  out.converged = x.converged && y.converged;
  out.iterations = std::max(x.iterations, y.iterations);
  out.marginal_error = std::max(x.marginal_error, y.marginal_error);
  return out;
}

double iou(const SdfGrid& a, const SdfGrid& b) {
  if (!a.same_lattice(b)) throw std::invalid_argument("iou: grids must share resolution and box");
  std::size_t both = 0;
  std::size_t either = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool in_a = a.values()[i] < 0.0;
    const bool in_b = b.values()[i] < 0.0;
    both += in_a && in_b;
    either += in_a || in_b;
  }
  return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace qmcsdf
