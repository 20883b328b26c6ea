#pragma once

#include <Eigen/Core>
#include <functional>

#include "ddgame/box.hpp"

// Independent verification routes. Everything in here reimplements the
// formulas it checks from scratch; nothing calls into the market, learn or
// solver modules, so a bug must be made twice to slip through.
namespace ddgame::oracle {

// A game with per-player cost -z_i x_i + lambda_i/2 x_i^2 under
// z_i = xi_bar_i + <b_i, x> (the smoothing terms switched off). Its stacked
// expected gradient is affine: G_i(x) = lambda_i x_i - xi_bar_i - <b_i, x>
// - b_ii x_i.
struct QuadraticGameSpec {
  Eigen::VectorXd lambda;
  Eigen::MatrixXd b;       // row i is b_i
  Eigen::VectorXd xi_bar;  // mean base demand
  BoxSet box;
};

Eigen::VectorXd quadratic_gradient(const QuadraticGameSpec& spec,
                                   const Eigen::VectorXd& x);

// Solves (Lambda - B - diag(diag(B))) x = xi_bar and verifies the solution is
// strictly inside the box with gradient residual <= 1e-10. If the
// unconstrained solution leaves the box: for n = 2 falls back to grid_nash on
// the quadratic costs, otherwise throws.
Eigen::VectorXd closed_form_nash(const QuadraticGameSpec& spec);

// Iterated best response on a uniform grid for two scalar players.
// expected_cost(i, x) must return player i's expected cost at the joint
// decision x. Resolution is the cell count per axis (>= 100). Throws
// CycleDetected if best-response cycles without settling.
Eigen::VectorXd grid_nash(
    const std::function<double(int, const Eigen::VectorXd&)>& expected_cost,
    const BoxSet& box, int resolution, int max_sweeps = 200);

// Central finite difference of a scalar function.
Eigen::VectorXd finite_diff(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double h = 1e-5);
double finite_diff_1d(const std::function<double(double)>& f, double x,
                      double h = 1e-5);

// Independent implementation of the charging-station cost used by grid
// checks: quadratic revenue/cost plus the smoothed shortfall/surplus terms.
double ev_cost(double lambda_i, double p_w, double p_r, double w_i, double x_i,
               double z_i);

}  // namespace ddgame::oracle
