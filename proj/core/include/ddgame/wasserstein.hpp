#pragma once

#include <Eigen/Core>
#include <vector>

#include "ddgame/location_scale.hpp"

namespace ddgame {

// Exact 1-D Wasserstein-1 distance between two empirical measures. For equal
// sample counts this is the mean absolute difference of order statistics; for
// unequal counts the quantile functions are integrated over their merged
// breakpoints, which is the same distance computed exactly.
double wasserstein1_1d(std::vector<double> a, std::vector<double> b);

// Largest per-coordinate W1 distance between two maps' responses over a set
// of probe decisions, each side sampled m_per_point times. This is the
// empirical misspecification level eta.
double estimate_misspecification(const LocationScaleMap& truth,
                                 const LocationScaleMap& model,
                                 const std::vector<Eigen::VectorXd>& probes,
                                 long m_per_point, Rng& rng);

}  // namespace ddgame
