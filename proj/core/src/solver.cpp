#include "ddgame/solver.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>

namespace ddgame {

Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                     const StepWeights& weights, const PlayerLayout& layout,
                     const BoxSet& set) {
  if (x.size() != g.size() || x.size() != set.lo.size())
    throw DimensionMismatch("step: dimension mismatch");
  const Eigen::VectorXd w = weights.expand(layout);
  return project_box(x - g.cwiseQuotient(w), set);
}

Eigen::VectorXd step_uniform(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& g, double omega,
                             const BoxSet& set) {
  if (!(omega > 0.0))
    throw DimensionMismatch("step_uniform: omega must be positive");
  return project_box(x - g / omega, set);
}

double omega_t(double alpha, double r, int t) {
  if (!(alpha > 0.0)) throw DimensionMismatch("omega_t: alpha must be > 0");
  if (!(r > 2.0)) throw DimensionMismatch("omega_t: r must be > 2");
  if (t < 0) throw DimensionMismatch("omega_t: t must be >= 0");
  return alpha * (r + static_cast<double>(t) - 2.0) / 2.0;
}

Trajectory solve(const SolverConfig& config, const GradientFeed& feed,
                 const BoxSet& set, const PlayerLayout& layout,
                 const Eigen::VectorXd* x_ref) {
  if (config.iterations < 1)
    throw DimensionMismatch("solve: iterations must be >= 1");
  if (config.log_stride < 1)
    throw DimensionMismatch("solve: log_stride must be >= 1");
  if (!set.contains(config.x0))
    throw DimensionMismatch("solve: x0 is not feasible");
  if (x_ref && x_ref->size() != config.x0.size())
    throw DimensionMismatch("solve: x_ref dimension mismatch");

  Eigen::VectorXd scale;  // per-coordinate weights for constant mode
  const DecayingStep* decaying = std::get_if<DecayingStep>(&config.mode);
  if (const auto* constant = std::get_if<ConstantStep>(&config.mode)) {
    scale = constant->weights.expand(layout);
  } else {
    (void)omega_t(decaying->alpha, decaying->r, 0);  // validate
  }

  Rng rng(config.seed);
  Trajectory out;
  out.log_stride = config.log_stride;
  Eigen::VectorXd x = config.x0;

  auto log_point = [&](int t, const Eigen::VectorXd& g) {
    out.steps.push_back(t);
    out.errors.push_back(
        x_ref ? (x - *x_ref).squaredNorm()
              : std::numeric_limits<double>::quiet_NaN());
    out.residuals.push_back((x - project_box(x - g, set)).norm());
    if (config.record_iterates) out.iterates.push_back(x);
  };

  for (int t = 0; t < config.iterations; ++t) {
    Eigen::VectorXd g = feed.sample(x, t, rng);
    if (config.batch > 1 && !feed.deterministic) {
      for (int s = 1; s < config.batch; ++s) g += feed.sample(x, t, rng);
      g /= static_cast<double>(config.batch);
    }
    if (t % config.log_stride == 0) log_point(t, g);
    if (decaying) {
      x = step_uniform(x, g, omega_t(decaying->alpha, decaying->r, t), set);
    } else {
      x = project_box(x - g.cwiseQuotient(scale), set);
    }
  }
  // Final point, logged with a fresh estimate so rows stay uniform.
  log_point(config.iterations,
            feed.sample(x, config.iterations, rng));
  out.final_x = std::move(x);
  return out;
}

Eigen::VectorXd reference_nash(const GradientFeed& feed, const BoxSet& set,
                               double alpha, double grad_lipschitz, double tol,
                               long max_iter, const Eigen::VectorXd* x0) {
  if (!feed.deterministic)
    throw DimensionMismatch("reference_nash: needs a deterministic feed");
  if (!(alpha > 0.0) || !(grad_lipschitz > 0.0))
    throw DimensionMismatch("reference_nash: alpha, L must be positive");
  if (!(tol > 0.0)) throw DimensionMismatch("reference_nash: tol must be > 0");
  const double omega = 4.0 * grad_lipschitz * grad_lipschitz / alpha;
  Rng rng(0);
  Eigen::VectorXd x = x0 ? *x0 : Eigen::VectorXd(0.5 * (set.lo + set.hi));
  x = project_box(x, set);
  for (long it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd g = feed.sample(x, 0, rng);
    const Eigen::VectorXd next = project_box(x - g / omega, set);
    const double residual = (x - next).norm();
    x = next;
    if (residual <= tol) return x;
  }
  throw MaxIterationsExceeded(
      "reference_nash: residual did not reach tol within max_iter");
}

Eigen::VectorXd polish_fixed_point(const GradientFeed& feed, const BoxSet& set,
                                   double omega, Eigen::VectorXd x,
                                   int max_steps) {
  Rng rng(0);
  for (int it = 0; it < max_steps; ++it) {
    const Eigen::VectorXd next =
        project_box(x - feed.sample(x, 0, rng) / omega, set);
    bool same = true;
    for (Eigen::Index j = 0; j < x.size(); ++j)
      if (next[j] != x[j]) {
        same = false;
        break;
      }
    x = next;
    if (same) break;
  }
  return x;
}

bool check_step_condition(const StepWeights& weights, double alpha,
                          double grad_lipschitz) {
  if (!(alpha > 0.0) || !(grad_lipschitz > 0.0))
    throw DimensionMismatch("check_step_condition: alpha, L must be > 0");
  const double w1 = weights.omega_max();
  const double wn = weights.omega_min();
  return w1 / (wn * wn) <=
         alpha / (4.0 * grad_lipschitz * grad_lipschitz);
}

double contraction_factor(const StepWeights& weights, double alpha) {
  if (!(alpha > 0.0))
    throw DimensionMismatch("contraction_factor: alpha must be > 0");
  return weights.omega_max() / (weights.omega_min() + alpha);
}

NeighborhoodBound neighborhood_bound(const StepWeights& weights, double alpha,
                                     double rho, double sigma_sq) {
  if (!(alpha > 0.0))
    throw DimensionMismatch("neighborhood_bound: alpha must be > 0");
  if (rho < 0.0 || sigma_sq < 0.0)
    throw DimensionMismatch("neighborhood_bound: rho, sigma^2 must be >= 0");
  const double w1 = weights.omega_max();
  const double wn = weights.omega_min();
  NeighborhoodBound out;
  out.weight_gap_ok = (w1 - wn) < alpha;
  out.value = 2.0 * w1 * (w1 * rho * rho + alpha * sigma_sq) /
              (alpha * wn * (wn + alpha));
  return out;
}

double decay_rate_constant(double alpha, double r, double e0, double rho_bar,
                           double s, double sigma_sq) {
  if (!(alpha > 0.0) || !(r > 2.0))
    throw DimensionMismatch("decay_rate_constant: need alpha > 0, r > 2");
  if (e0 < 0.0 || rho_bar < 0.0 || sigma_sq < 0.0 || !(s > 0.0))
    throw DimensionMismatch("decay_rate_constant: bad constants");
  const double bias_term =
      4.0 * rho_bar * rho_bar * std::max(r / s, 1.0) +
      8.0 * r * sigma_sq / (r - 2.0);
  return std::max(alpha * alpha * r * e0, bias_term);
}

std::vector<double> mean_errors(const std::vector<Trajectory>& trials) {
  if (trials.empty()) throw DimensionMismatch("mean_errors: no trials");
  const std::size_t len = trials[0].errors.size();
  for (const auto& t : trials)
    if (t.errors.size() != len || t.steps != trials[0].steps)
      throw DimensionMismatch("mean_errors: trials disagree on logging grid");
  std::vector<double> mean(len, 0.0);
  for (const auto& t : trials)
    for (std::size_t j = 0; j < len; ++j) mean[j] += t.errors[j];
  for (auto& v : mean) v /= static_cast<double>(trials.size());
  return mean;
}

RateReport rate_check(const std::vector<Trajectory>& trials, double alpha,
                      double r, int t_min) {
  if (trials.size() < 10)
    throw PreconditionFailed("rate_check: need at least 10 trials");
  if (!(alpha > 0.0) || !(r > 2.0))
    throw DimensionMismatch("rate_check: need alpha > 0, r > 2");
  const std::vector<double> mean = mean_errors(trials);
  const std::vector<int>& steps = trials[0].steps;

  RateReport out;
  out.t_min = t_min;
  std::vector<std::pair<double, double>> fit_points;  // (log t, log mean e)
  std::vector<std::pair<int, double>> scaled;         // (t, (r+t) mean e)
  for (std::size_t j = 0; j < mean.size(); ++j) {
    const int t = steps[j];
    if (t < t_min) continue;
    const double scale = (r + static_cast<double>(t)) * mean[j];
    out.sup_scaled_error = std::max(out.sup_scaled_error, scale);
    scaled.emplace_back(t, scale);
    if (mean[j] > 0.0 && t > 0)
      fit_points.emplace_back(std::log(static_cast<double>(t)),
                              std::log(mean[j]));
  }
  if (fit_points.size() < 4)
    throw PreconditionFailed("rate_check: too few logged points past t_min");

  // Least-squares slope of log(mean e) against log(t).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [lx, ly] : fit_points) {
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double np = static_cast<double>(fit_points.size());
  out.loglog_slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);

  // Trend: the scaled curve must not drift upward. Compare the max over the
  // first quarter of the post-t_min range with the max over the last quarter.
  const std::size_t quarter = scaled.size() / 4;
  if (quarter >= 1) {
    for (std::size_t j = 0; j < quarter; ++j)
      out.first_quartile_max =
          std::max(out.first_quartile_max, scaled[j].second);
    for (std::size_t j = scaled.size() - quarter; j < scaled.size(); ++j)
      out.last_quartile_max = std::max(out.last_quartile_max, scaled[j].second);
    out.trend_ok = out.last_quartile_max <= 2.0 * out.first_quartile_max;
  }
  return out;
}

std::vector<Trajectory> run_trials(const SolverConfig& base,
                                   const GradientFeed& feed, const BoxSet& set,
                                   const PlayerLayout& layout, int n_trials,
                                   std::uint64_t master_seed, int threads,
                                   const Eigen::VectorXd* x_ref) {
  if (n_trials < 1) throw DimensionMismatch("run_trials: n_trials >= 1");
  if (threads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = hw == 0 ? 1 : static_cast<int>(hw);
  }
  threads = std::min(threads, n_trials);

  std::vector<Trajectory> results(static_cast<std::size_t>(n_trials));
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (true) {
      const int trial = next.fetch_add(1);
      if (trial >= n_trials || failed.load()) return;
      try {
        SolverConfig config = base;
        config.seed = split_seed(master_seed, static_cast<std::uint64_t>(trial));
        results[static_cast<std::size_t>(trial)] =
            solve(config, feed, set, layout, x_ref);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        if (error_message.empty()) error_message = e.what();
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw NumericalError("run_trials: " + error_message);
  return results;
}

double measure_gradient_variance(const GradientFeed& feed,
                                 const std::vector<Eigen::VectorXd>& probes,
                                 int n_draws, Rng& rng) {
  if (probes.empty())
    throw DimensionMismatch("measure_gradient_variance: no probe points");
  if (n_draws < 2)
    throw DimensionMismatch("measure_gradient_variance: n_draws >= 2");
  double worst = 0.0;
  for (const auto& x : probes) {
    std::vector<Eigen::VectorXd> draws;
    draws.reserve(static_cast<std::size_t>(n_draws));
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(x.size());
    for (int j = 0; j < n_draws; ++j) {
      draws.push_back(feed.sample(x, 0, rng));
      mean += draws.back();
    }
    mean /= static_cast<double>(n_draws);
    double acc = 0.0;
    for (const auto& g : draws) acc += (g - mean).squaredNorm();
    worst = std::max(worst, acc / static_cast<double>(n_draws - 1));
  }
  return worst;
}

}  // namespace ddgame
