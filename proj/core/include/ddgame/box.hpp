#pragma once

#include <Eigen/Core>

#include "ddgame/layout.hpp"
#include "ddgame/weights.hpp"

namespace ddgame {

// Axis-aligned box constraint set, the product of per-coordinate intervals.
struct BoxSet {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  BoxSet() = default;
  BoxSet(Eigen::VectorXd lower, Eigen::VectorXd upper);

  static BoxSet cube(int dim, double lower, double upper);

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  double diameter() const { return (hi - lo).norm(); }
};

// Euclidean projection onto the box: per-coordinate clamp.
Eigen::VectorXd project_box(const Eigen::VectorXd& x, const BoxSet& set);

// Projection in the norm induced by W = diag of per-player weights. For a
// diagonal metric and a separable set the weighted argmin splits per
// coordinate, so the result equals the plain clamp; weights are still
// validated and the dimension contract enforced.
Eigen::VectorXd project_weighted(const Eigen::VectorXd& x, const BoxSet& set,
                                 const StepWeights& weights,
                                 const PlayerLayout& layout);

}  // namespace ddgame
