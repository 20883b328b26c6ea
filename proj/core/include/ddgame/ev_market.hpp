#pragma once

#include <Eigen/Core>

#include "ddgame/box.hpp"
#include "ddgame/feed.hpp"
#include "ddgame/location_scale.hpp"
#include "ddgame/monotonicity.hpp"
#include "ddgame/rng.hpp"

namespace ddgame {

// An n-station charging market. Station i picks a price x_i in [p_w, p_r],
// observes demand z_i = xi_i + <b_i, x>, pays lambda_i/2 x_i^2 in operating
// cost, buys shortfall at p_r and sells surplus renewable (capacity w_i) at
// p_w, both smoothed through softplus.
struct MarketParams {
  int n = 0;
  Eigen::VectorXd lambda;      // per-station quadratic cost
  double p_w = 0.0;            // wholesale (sell) price
  double p_r = 0.0;            // retail (buy) price
  Eigen::VectorXd w;           // renewable capacity, standardized demand units
  Eigen::MatrixXd b;           // true demand response, row i is b_i
  Eigen::MatrixXd base_demand; // days x n, standardized per station

  BoxSet feasible_box() const {
    return BoxSet::cube(n, p_w, p_r);
  }

  // Enforced on the config/CLI path. Desk instances (e.g. the reduced
  // quadratic game with p_w = p_r = 0) may skip it.
  void validate() const;

  LocationScaleMap true_map() const {
    return LocationScaleMap{b, EmpiricalBase{base_demand}};
  }
};

// Numerically stable softplus and logistic.
double softplus(double y) noexcept;
double logistic(double y) noexcept;

// Per-station cost at realized demand z_i:
//   -z_i x_i + lambda_i/2 x_i^2 - p_w softplus(w_i - z_i)
//   + p_r softplus(z_i - w_i).
double cost(const MarketParams& mkt, int i, const Eigen::VectorXd& x,
            double z_i);

// d cost / d x_i = -z_i + lambda_i x_i.
double grad_x(const MarketParams& mkt, int i, const Eigen::VectorXd& x,
              double z_i);

// d cost / d z_i = -x_i + p_w logistic(w_i - z_i) + p_r logistic(z_i - w_i).
double grad_z(const MarketParams& mkt, int i, const Eigen::VectorXd& x,
              double z_i);

// Single-sample estimate of player i's performative gradient under response
// model B_model: grad_x + B_model(i,i) grad_z.
double player_gradient(const MarketParams& mkt, int i,
                       const Eigen::VectorXd& x, double z_i,
                       const Eigen::MatrixXd& b_model);

// Exact expected gradient of the game induced by B_model: demand averaged
// over the base dataset with z_i = xi_i + <b_model_i, x>.
Eigen::VectorXd expected_gradient(const MarketParams& mkt,
                                  const Eigen::VectorXd& x,
                                  const Eigen::MatrixXd& b_model);

// Response matrix with diagonal -1/18 and off-diagonal +1/18, each entry
// perturbed by fresh N(0, noise_std^2) noise.
Eigen::MatrixXd build_B(int n, double noise_std, Rng& rng);

// Synthetic daily demand: per-station level, weekly seasonal swing and an
// AR(1) component, clamped positive. A stand-in for metered charging data.
Eigen::MatrixXd synth_demand(int n_stations, int n_days, Rng& rng);

// Column-wise zero-mean unit-variance (population convention). Throws on a
// zero-variance column. Idempotent up to roundoff.
Eigen::MatrixXd standardize(const Eigen::MatrixXd& data);

// Demand CSV: day,station_0,...,station_{n-1}.
void write_demand_csv(const std::string& path, const Eigen::MatrixXd& demand);
Eigen::MatrixXd read_demand_csv(const std::string& path);

// Tight Lipschitz constant of (x_i, z_i) -> (grad_x, grad_z) for station i:
// the largest spectral norm of the cost Hessian block over all demand values.
double cost_gradient_lipschitz(double lambda_i, double p_w, double p_r);

// Bound on |grad_z| over the feasible box: p_r - p_w.
double demand_lipschitz(const MarketParams& mkt);

// Conservative bound on ||grad F_i|| over the box, for coefficient matrices
// in a Frobenius ball of the given radius. Feeds the excess-risk report.
double cost_lipschitz_bound(const MarketParams& mkt, double radius);

// Full certificate for the game induced by B_model: lambda = min_i lambda_i,
// L_i = 1, gamma_i = ||b_i||^2, kappa, both alpha variants, and the gradient
// Lipschitz constant from the per-station cost constants.
MonotonicityConstants certify(const MarketParams& mkt,
                              const Eigen::MatrixXd& b_model);

// Deterministic feed evaluating expected_gradient.
GradientFeed make_expected_feed(const MarketParams& mkt,
                                const Eigen::MatrixXd& b_model);

// Stochastic feed: each sample draws one base day (batch > 1 averages that
// many draws), forms z = xi + B x and returns the per-station performative
// gradients. By default demand is drawn from the model's own map; with
// draw_from_truth the day is pushed through the true response instead, which
// measures the cost of model error.
GradientFeed make_stochastic_feed(const MarketParams& mkt,
                                  const Eigen::MatrixXd& b_model, int batch,
                                  bool draw_from_truth = false);

}  // namespace ddgame
