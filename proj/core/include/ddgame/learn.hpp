#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>

#include "ddgame/box.hpp"
#include "ddgame/dataset.hpp"
#include "ddgame/location_scale.hpp"

namespace ddgame {

// Fitted location-scale coefficients, optionally constrained to a Frobenius
// ball of the given radius (the hypothesis class).
struct HypothesisParams {
  Eigen::MatrixXd b_hat;
  std::optional<double> radius;
};

struct LeastSquaresOptions {
  std::optional<double> radius;  // clip the solution onto the ball if set
  bool ridge = false;            // opt-in regularization, never silent
  double cond_limit = 1e12;
};

// Normal equations B_hat = (Z'X)(X'X)^{-1} via an SPD factorization of the
// Gram matrix. Throws SingularGram when m < d or the Gram condition number
// exceeds cond_limit. With ridge set, adds (1e-8 * trace/d) I first.
HypothesisParams fit_least_squares(const Dataset& data,
                                   const LeastSquaresOptions& opts = {});

// Projected gradient descent on the empirical least-squares risk over the
// Frobenius ball. step_size <= 0 selects 1/L with L = lambda_max(X'X/m).
// Throws DivergenceDetected if the risk exceeds 10x its initial value.
HypothesisParams fit_erm_projected(const Dataset& data, double ball_radius,
                                   int steps, double step_size = 0.0);

// Empirical risk (1/2m) sum_j ||B x_j - z_j||^2 and its gradient.
double empirical_risk(const Dataset& data, const Eigen::MatrixXd& b);
Eigen::MatrixXd empirical_risk_gradient(const Dataset& data,
                                        const Eigen::MatrixXd& b);

// Sample-size gate: m / log(m) >= 2 (ell + log(1/delta)). Requires m >= 2
// and delta in (0, 1/2).
bool check_sample_size(long m, int ell, double delta);

// zeta(m, delta) = sqrt(log(m) (ell + log(1/delta)) / m). m is real-valued
// here so the rate can be evaluated off the integer grid; delta in (0, 1).
double zeta(double m, double delta, double ell);

// C' = (4/mu) max{ L_beta / (15 r), theta }.
double c_prime(double mu, double l_beta, double theta, double radius);

// C' * zeta(m, delta); throws PreconditionFailed when the sample-size gate
// fails.
double erm_error_bound(long m, double delta, int ell, double mu, double l_beta,
                       double theta, double radius);

// Everything needed to audit the error chain, serialized as name=value lines.
struct BoundReport {
  long m = 0;
  double delta = 0.0;
  int ell = 0;
  double zeta_value = 0.0;
  double c_prime_value = 0.0;
  double erm_bound = 0.0;
  double approx_bound = 0.0;
  double excess_risk_bound = 0.0;
  // Inputs, recorded for reproducibility.
  double mu = 0.0, l_beta = 0.0, theta = 0.0, radius = 0.0;
  double eta = 0.0, epsilon = 0.0, l_z = 0.0, l_bar = 0.0, diam_x = 0.0;

  std::string serialize() const;
};

// approx = eta L_z + L_z epsilon C' zeta;
// excess = 2 eta L_z + 2 L_z epsilon C' zeta + 2 sqrt(2) l_bar diam_x.
BoundReport make_bound_report(long m, double delta, int ell, double mu,
                              double l_beta, double theta, double radius,
                              double eta, double epsilon, double l_z,
                              double l_bar, double diam_x);

// Smallest theta with empirical survival S(t) <= 2 exp(-t/theta) at every
// sample point: max_t t / log(2 / S(t)).
double subexponential_modulus(std::vector<double> samples);

// Calibrate theta for a concrete instance: pool directional projections
// <u, grad R(x, z, beta)> over random unit directions and ball probes beta,
// and take the largest subexponential modulus seen.
double calibrate_theta(const LocationScaleMap& truth,
                       const UniformBoxSampler& sampler,
                       const Eigen::MatrixXd& beta_star, double radius,
                       int n_samples, int n_directions, Rng& rng);

// Analytic second moment of x ~ Uniform(box): diag(var) + mean mean'.
Eigen::MatrixXd uniform_box_second_moment(const BoxSet& box);

// max over the box of ||x||^2 (attained at a corner).
double box_max_sq_norm(const BoxSet& box);

}  // namespace ddgame
