#pragma once

#include <Eigen/Core>
#include <variant>

#include "ddgame/box.hpp"
#include "ddgame/dataset.hpp"
#include "ddgame/rng.hpp"

namespace ddgame {

// Base noise xi for a location-scale response z = xi + B x.
// Empirical: draws a stored record uniformly with replacement.
struct EmpiricalBase {
  Eigen::MatrixXd samples;  // rows are xi records in R^k
};

// Independent Gaussian coordinates.
struct GaussianBase {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // nonnegative per coordinate
};

using BaseNoise = std::variant<EmpiricalBase, GaussianBase>;

// The distributional map x -> law of xi + B x.
struct LocationScaleMap {
  Eigen::MatrixXd b;  // k x d
  BaseNoise base;

  int k() const { return static_cast<int>(b.rows()); }
  int d() const { return static_cast<int>(b.cols()); }

  void validate() const;
  Eigen::VectorXd draw_base(Rng& rng) const;
  Eigen::VectorXd base_mean() const;
};

// One draw z = xi + B x.
Eigen::VectorXd sample_response(const LocationScaleMap& map,
                                const Eigen::VectorXd& x, Rng& rng);

// Design distribution for decisions during the sampling phase.
struct UniformBoxSampler {
  BoxSet box;
  Eigen::VectorXd draw(Rng& rng) const;
};

// m rounds of deploy-and-observe: x ~ sampler, z ~ map(x).
Dataset collect_dataset(const LocationScaleMap& map,
                        const UniformBoxSampler& sampler, long m, Rng& rng);

}  // namespace ddgame
