#pragma once

#include <cstdint>
#include <vector>

#include "qmcsdf/samplers.hpp"
#include "qmcsdf/sdf.hpp"

namespace qmcsdf {

/// Area-weighted triangle choice, then a uniform point inside it. Rows are points.
PointMatrix sample_surface(const TriangleMesh& mesh, Eigen::Index n, std::uint64_t seed);

/// Exact nearest-neighbour queries over a static point set.
class KdTree {
 public:
  explicit KdTree(const PointMatrix& points);

  /// Squared distance to, and index of, the closest stored point.
  std::pair<double, Eigen::Index> nearest(const Vec3& q) const;

 private:
  struct Node {
    int axis = -1;  // -1 for a leaf
    double split = 0.0;
    int left = -1;
    int right = -1;
    int first = 0;
    int count = 0;
  };
  int build(int first, int count);
  void search(int node, const Vec3& q, double& best, Eigen::Index& best_index) const;

  PointMatrix points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

/// Sum over both directions of squared nearest-neighbour distances.
double chamfer(const PointMatrix& a, const PointMatrix& b);
double chamfer_brute_force(const PointMatrix& a, const PointMatrix& b);

constexpr Eigen::Index kExactEmdLimit = 512;

/// Minimum-cost perfect matching between two equal-size point sets
/// (Euclidean cost); `assignment[i]` is the partner of a-row i.
std::vector<Eigen::Index> optimal_assignment(const Eigen::MatrixXd& cost);

/// Mean matched Euclidean distance under the optimal matching.
double emd_exact(const PointMatrix& a, const PointMatrix& b);

struct EntropicResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  double marginal_error = 0.0;
};

/// Transport cost of the entropic plan with uniform weights, computed with
/// log-domain scaling on a halving schedule of the regularization down to `reg`.
/// The two update orders are run separately and averaged. `tolerance` bounds
/// the L1 error of both marginals; `iterations` counts the longer run.
EntropicResult emd_entropic(const PointMatrix& a, const PointMatrix& b, double reg = 1e-3, int max_iterations = 20000,
                            double tolerance = 1e-5);

/// Occupancy IoU over nodes with negative value; 1 when both are empty.
double iou(const SdfGrid& a, const SdfGrid& b);

}  // namespace qmcsdf
