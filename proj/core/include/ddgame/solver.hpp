#pragma once

#include <Eigen/Core>
#include <optional>
#include <variant>
#include <vector>

#include "ddgame/box.hpp"
#include "ddgame/feed.hpp"
#include "ddgame/layout.hpp"
#include "ddgame/weights.hpp"

namespace ddgame {

// Fixed per-player weights: x+ = proj(x - W^{-1} g).
struct ConstantStep {
  StepWeights weights;
};

// Shared decaying weight omega_t = alpha (r + t - 2) / 2, r > 2.
struct DecayingStep {
  double alpha = 0.0;
  double r = 3.0;
};

struct SolverConfig {
  std::variant<ConstantStep, DecayingStep> mode;
  int iterations = 2000;
  int batch = 1;
  std::uint64_t seed = 0;
  Eigen::VectorXd x0;
  int log_stride = 1;
  bool record_iterates = false;
};

// Logged run. errors holds ||x^t - x_ref||^2 when a reference was supplied
// (otherwise NaN); residuals holds ||x^t - proj(x^t - g^t)|| with the
// gradient estimate used at that step.
struct Trajectory {
  std::vector<int> steps;
  std::vector<double> errors;
  std::vector<double> residuals;
  std::vector<Eigen::VectorXd> iterates;
  int log_stride = 1;
  Eigen::VectorXd final_x;
};

// One weighted projected-gradient step.
Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                     const StepWeights& weights, const PlayerLayout& layout,
                     const BoxSet& set);
Eigen::VectorXd step_uniform(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& g, double omega,
                             const BoxSet& set);

// omega_t = alpha (r + t - 2) / 2 for t >= 0; requires r > 2, alpha > 0.
double omega_t(double alpha, double r, int t);

// Run the play loop. Every iterate stays feasible; identical config and seed
// reproduce the trajectory bitwise.
Trajectory solve(const SolverConfig& config, const GradientFeed& feed,
                 const BoxSet& set, const PlayerLayout& layout,
                 const Eigen::VectorXd* x_ref = nullptr);

// High-accuracy equilibrium of the game G represented by a deterministic
// feed: uniform-weight iteration with omega = 4 L^2 / alpha until the
// projected-gradient residual ||x - proj(x - G(x)/omega)|| <= tol.
Eigen::VectorXd reference_nash(const GradientFeed& feed, const BoxSet& set,
                               double alpha, double grad_lipschitz,
                               double tol = 1e-10, long max_iter = 1000000,
                               const Eigen::VectorXd* x0 = nullptr);

// Iterate x -> proj(x - G(x)/omega) until the map reaches a floating-point
// fixed point (or max_steps); removes the tol-level reference error.
Eigen::VectorXd polish_fixed_point(const GradientFeed& feed, const BoxSet& set,
                                   double omega, Eigen::VectorXd x,
                                   int max_steps = 20000);

// omega_max / omega_min^2 <= alpha / (4 L^2).
bool check_step_condition(const StepWeights& weights, double alpha,
                          double grad_lipschitz);

// c = omega_1 / (omega_n + alpha), the noiseless per-step contraction of the
// squared weighted error.
double contraction_factor(const StepWeights& weights, double alpha);

// Stationary-error bound 2 omega_1 (omega_1 rho^2 + alpha sigma^2) /
// (alpha omega_n (omega_n + alpha)). weight_gap_ok records whether
// omega_1 - omega_n < alpha; the value is returned either way.
struct NeighborhoodBound {
  double value = 0.0;
  bool weight_gap_ok = false;
};
NeighborhoodBound neighborhood_bound(const StepWeights& weights, double alpha,
                                     double rho, double sigma_sq);

// A = max{alpha^2 r e0, 4 rho_bar^2 max{r/s, 1} + 8 r sigma^2 / (r - 2)};
// the decaying-step error satisfies E e^t <= A / (alpha^2 (r + t)).
double decay_rate_constant(double alpha, double r, double e0, double rho_bar,
                           double s, double sigma_sq);

// Diagnostics for a decaying-step multi-trial run: sup over logged t >= t_min
// of (r + t) * mean error, a log-log slope fit of the mean error for
// t >= t_min, and a scale-trend check (max of the scaled curve over the last
// quarter of the fit range vs the first quarter).
struct RateReport {
  double sup_scaled_error = 0.0;
  double loglog_slope = 0.0;
  double first_quartile_max = 0.0;
  double last_quartile_max = 0.0;
  bool trend_ok = false;
  int t_min = 0;
};
RateReport rate_check(const std::vector<Trajectory>& trials, double alpha,
                      double r, int t_min = 100);

// Mean error across trials at each logged step (trials must share the
// logging grid).
std::vector<double> mean_errors(const std::vector<Trajectory>& trials);

// Independent trials with seeds split_seed(master_seed, trial). Runs on up
// to `threads` workers (0 = hardware concurrency); results are ordered by
// trial index, so the output is independent of scheduling.
std::vector<Trajectory> run_trials(const SolverConfig& base,
                                   const GradientFeed& feed, const BoxSet& set,
                                   const PlayerLayout& layout, int n_trials,
                                   std::uint64_t master_seed, int threads,
                                   const Eigen::VectorXd* x_ref = nullptr);

// Empirical gradient variance E||g - mean g||^2: n_draws samples at each
// probe point, worst case over probes.
double measure_gradient_variance(const GradientFeed& feed,
                                 const std::vector<Eigen::VectorXd>& probes,
                                 int n_draws, Rng& rng);

}  // namespace ddgame
