#include "ddgame/box.hpp"

namespace ddgame {

BoxSet::BoxSet(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lo(std::move(lower)), hi(std::move(upper)) {
  if (lo.size() != hi.size())
    throw DimensionMismatch("BoxSet: lo/hi size mismatch");
  if (lo.size() == 0) throw DimensionMismatch("BoxSet: empty box");
  for (Eigen::Index j = 0; j < lo.size(); ++j)
    if (!(lo[j] <= hi[j]))
      throw DimensionMismatch("BoxSet: lo must be <= hi per coordinate");
}

BoxSet BoxSet::cube(int dim, double lower, double upper) {
  return BoxSet(Eigen::VectorXd::Constant(dim, lower),
                Eigen::VectorXd::Constant(dim, upper));
}

bool BoxSet::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lo.size())
    throw DimensionMismatch("BoxSet::contains: dimension mismatch");
  for (Eigen::Index j = 0; j < x.size(); ++j)
    if (x[j] < lo[j] - tol || x[j] > hi[j] + tol) return false;
  return true;
}

Eigen::VectorXd project_box(const Eigen::VectorXd& x, const BoxSet& set) {
  if (x.size() != set.lo.size())
    throw DimensionMismatch("project_box: dimension mismatch");
  Eigen::VectorXd out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    double v = x[j];
    if (v < set.lo[j]) v = set.lo[j];
    if (v > set.hi[j]) v = set.hi[j];
    out[j] = v;
  }
  return out;
}

Eigen::VectorXd project_weighted(const Eigen::VectorXd& x, const BoxSet& set,
                                 const StepWeights& weights,
                                 const PlayerLayout& layout) {
  if (layout.total_dim != set.dim())
    throw DimensionMismatch("project_weighted: layout/set mismatch");
  if (x.size() != set.lo.size())
    throw DimensionMismatch("project_weighted: dimension mismatch");
  // Validates positivity and the player/weight count contract.
  (void)weights.expand(layout);
  // min_y (y - x)' W (y - x) over the box is separable: each coordinate
  // minimizes omega_j (y_j - x_j)^2 independently, and the clamp solves that
  // regardless of the (positive) weight.
  Eigen::VectorXd out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j)
    out[j] = std::min(std::max(x[j], set.lo[j]), set.hi[j]);
  return out;
}

}  // namespace ddgame
