#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <vector>

#include "ddgame/errors.hpp"
#include "ddgame/layout.hpp"

namespace ddgame {

// Per-player step weights omega_i > 0. omega_max/omega_min are what the
// contraction and neighborhood formulas call omega_1 and omega_n; the vector
// itself is not required to be sorted.
struct StepWeights {
  std::vector<double> omegas;

  StepWeights() = default;
  explicit StepWeights(std::vector<double> w) : omegas(std::move(w)) {
    for (double v : omegas)
      if (!(v > 0.0))
        throw DimensionMismatch("StepWeights: weights must be positive");
    if (omegas.empty())
      throw DimensionMismatch("StepWeights: need at least one weight");
  }

  static StepWeights uniform(int n, double omega) {
    return StepWeights(std::vector<double>(static_cast<std::size_t>(n), omega));
  }

  double omega_max() const {
    return *std::max_element(omegas.begin(), omegas.end());
  }
  double omega_min() const {
    return *std::min_element(omegas.begin(), omegas.end());
  }
  int n() const { return static_cast<int>(omegas.size()); }

  // Per-coordinate diagonal of W under a layout.
  Eigen::VectorXd expand(const PlayerLayout& layout) const {
    if (layout.n != n())
      throw DimensionMismatch("StepWeights: weight count != player count");
    Eigen::VectorXd out(layout.total_dim);
    for (int i = 0; i < layout.n; ++i)
      for (int j = 0; j < layout.dims[static_cast<std::size_t>(i)]; ++j)
        out[layout.offsets[static_cast<std::size_t>(i)] + j] =
            omegas[static_cast<std::size_t>(i)];
    return out;
  }
};

}  // namespace ddgame
