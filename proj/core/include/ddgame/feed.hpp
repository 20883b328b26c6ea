#pragma once

#include <Eigen/Core>
#include <functional>
#include <utility>

#include "ddgame/rng.hpp"

namespace ddgame {

// Source of gradient estimates for the play loop. sample(x, t, rng) returns
// an estimate of the stacked partial-gradient map at x; t is the iteration
// index (only decorators that schedule bias use it). Implementations must be
// safe to call concurrently with distinct Rng instances.
struct GradientFeed {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, int, Rng&)> sample;
  bool deterministic = false;
};

inline GradientFeed make_deterministic_feed(
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fn) {
  GradientFeed feed;
  feed.deterministic = true;
  feed.sample = [fn = std::move(fn)](const Eigen::VectorXd& x, int,
                                     Rng&) { return fn(x); };
  return feed;
}

// Adds a decaying deterministic bias rho_bar/(s + t) along a fixed direction;
// used to exercise the biased-oracle rate guarantees.
inline GradientFeed make_biased_feed(GradientFeed inner, double rho_bar,
                                     double s, Eigen::VectorXd direction) {
  const double norm = direction.norm();
  if (norm > 0.0) direction /= norm;
  GradientFeed feed;
  feed.deterministic = false;
  feed.sample = [inner = std::move(inner), rho_bar, s,
                 direction = std::move(direction)](
                    const Eigen::VectorXd& x, int t,
                    Rng& rng) -> Eigen::VectorXd {
    // Materialize before returning: handing the expression template through
    // std::function would leave it referencing a dead temporary.
    Eigen::VectorXd g = inner.sample(x, t, rng);
    g += (rho_bar / (s + static_cast<double>(t))) * direction;
    return g;
  };
  return feed;
}

}  // namespace ddgame
