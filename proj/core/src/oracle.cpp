#include "ddgame/oracle.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "ddgame/errors.hpp"

namespace ddgame::oracle {

Eigen::VectorXd quadratic_gradient(const QuadraticGameSpec& spec,
                                   const Eigen::VectorXd& x) {
  const Eigen::Index n = spec.lambda.size();
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i)
    g[i] = spec.lambda[i] * x[i] - spec.xi_bar[i] - spec.b.row(i).dot(x) -
           spec.b(i, i) * x[i];
  return g;
}

namespace {

void validate_spec(const QuadraticGameSpec& spec) {
  const Eigen::Index n = spec.lambda.size();
  if (n < 1 || spec.xi_bar.size() != n || spec.b.rows() != n ||
      spec.b.cols() != n || spec.box.dim() != n)
    throw DimensionMismatch("QuadraticGameSpec: inconsistent dimensions");
}

double quadratic_expected_cost(const QuadraticGameSpec& spec, int i,
                               const Eigen::VectorXd& x) {
  const double z_mean = spec.xi_bar[i] + spec.b.row(i).dot(x);
  return -z_mean * x[i] + 0.5 * spec.lambda[i] * x[i] * x[i];
}

}  // namespace

Eigen::VectorXd closed_form_nash(const QuadraticGameSpec& spec) {
  validate_spec(spec);
  const Eigen::Index n = spec.lambda.size();
  Eigen::MatrixXd a = -spec.b;
  for (Eigen::Index i = 0; i < n; ++i)
    a(i, i) += spec.lambda[i] - spec.b(i, i);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible())
    throw SingularGram("closed_form_nash: singular equilibrium system");
  const Eigen::VectorXd x = lu.solve(spec.xi_bar);

  bool interior = true;
  for (Eigen::Index j = 0; j < n; ++j)
    if (!(x[j] > spec.box.lo[j]) || !(x[j] < spec.box.hi[j])) interior = false;
  if (!interior) {
    if (n == 2) {
      return grid_nash(
          [&spec](int i, const Eigen::VectorXd& joint) {
            return quadratic_expected_cost(spec, i, joint);
          },
          spec.box, 20000);
    }
    throw NumericalError(
        "closed_form_nash: unconstrained solution leaves the box; no "
        "closed form applies");
  }
  const double residual = quadratic_gradient(spec, x).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-10))
    throw NumericalError("closed_form_nash: residual check failed");
  return x;
}

Eigen::VectorXd grid_nash(
    const std::function<double(int, const Eigen::VectorXd&)>& expected_cost,
    const BoxSet& box, int resolution, int max_sweeps) {
  if (box.dim() != 2)
    throw DimensionMismatch("grid_nash: exactly two scalar players");
  if (resolution < 100)
    throw DimensionMismatch("grid_nash: resolution must be >= 100");

  const auto coord = [&box, resolution](int player, long idx) {
    const double span = box.hi[player] - box.lo[player];
    return box.lo[player] +
           span * static_cast<double>(idx) / static_cast<double>(resolution);
  };

  // Best response of one player with the other frozen; ties break toward the
  // lower grid index so the sweep is deterministic.
  const auto best_response = [&](int player, const Eigen::VectorXd& joint) {
    Eigen::VectorXd probe = joint;
    long best_idx = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (long idx = 0; idx <= resolution; ++idx) {
      probe[player] = coord(player, idx);
      const double c = expected_cost(player, probe);
      if (c < best_cost) {
        best_cost = c;
        best_idx = idx;
      }
    }
    return best_idx;
  };

  long i0 = resolution / 2, i1 = resolution / 2;
  std::set<std::pair<long, long>> seen;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Eigen::VectorXd joint(2);
    joint << coord(0, i0), coord(1, i1);
    const long n0 = best_response(0, joint);
    joint[0] = coord(0, n0);
    const long n1 = best_response(1, joint);
    if (n0 == i0 && n1 == i1) {
      Eigen::VectorXd out(2);
      out << coord(0, i0), coord(1, i1);
      return out;
    }
    if (!seen.insert({n0, n1}).second)
      throw CycleDetected("grid_nash: best-response cycle on the grid");
    i0 = n0;
    i1 = n1;
  }
  throw MaxIterationsExceeded("grid_nash: no fixed point within max_sweeps");
}

Eigen::VectorXd finite_diff(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h) {
  if (!(h > 0.0)) throw DimensionMismatch("finite_diff: h must be positive");
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + h;
    const double up = f(probe);
    probe[j] = x[j] - h;
    const double down = f(probe);
    probe[j] = x[j];
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

double finite_diff_1d(const std::function<double(double)>& f, double x,
                      double h) {
  if (!(h > 0.0)) throw DimensionMismatch("finite_diff_1d: h > 0");
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double ev_cost(double lambda_i, double p_w, double p_r, double w_i, double x_i,
               double z_i) {
  // Softplus written as its two stable branches, independently of the main
  // implementation.
  const auto sp = [](double y) {
    if (y > 0.0) return y + std::log1p(std::exp(-y));
    return std::log1p(std::exp(y));
  };
  const double revenue_and_operation = lambda_i * 0.5 * x_i * x_i - z_i * x_i;
  const double surplus = sp(w_i - z_i);
  const double shortfall = sp(z_i - w_i);
  return revenue_and_operation - p_w * surplus + p_r * shortfall;
}

}  // namespace ddgame::oracle
