#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "ddgame/errors.hpp"
#include "ddgame/feed.hpp"
#include "ddgame/rng.hpp"
#include "ddgame/solver.hpp"

using namespace ddgame;

namespace {

// Strongly monotone test game G(x) = A (x - x_star) with SPD A.
// Eigenvalues of A are (3 +- sqrt(2)) / 2: alpha ~ 0.79, L ~ 2.21.
struct QuadGame {
  Eigen::Matrix2d a;
  Eigen::Vector2d x_star;
  double alpha;
  double lipschitz;

  QuadGame() {
    a << 2.0, 0.5, 0.5, 1.0;
    x_star << 0.3, 0.6;
    alpha = (3.0 - std::sqrt(2.0)) / 2.0;
    lipschitz = (3.0 + std::sqrt(2.0)) / 2.0;
  }

  GradientFeed exact_feed() const {
    const Eigen::Matrix2d a_copy = a;
    const Eigen::Vector2d xs = x_star;
    return make_deterministic_feed([a_copy, xs](const Eigen::VectorXd& x) {
      return Eigen::VectorXd(a_copy * (x - xs));
    });
  }

  GradientFeed noisy_feed(double stddev) const {
    const Eigen::Matrix2d a_copy = a;
    const Eigen::Vector2d xs = x_star;
    GradientFeed feed;
    feed.deterministic = false;
    feed.sample = [a_copy, xs, stddev](const Eigen::VectorXd& x, int,
                                       Rng& rng) {
      Eigen::VectorXd g = a_copy * (x - xs);
      for (Eigen::Index j = 0; j < g.size(); ++j) g[j] += stddev * rng.normal();
      return g;
    };
    return feed;
  }
};

SolverConfig uniform_config(double omega, int iterations, int stride = 1) {
  SolverConfig config;
  config.mode = ConstantStep{StepWeights::uniform(2, omega)};
  config.iterations = iterations;
  config.log_stride = stride;
  config.x0 = Eigen::VectorXd::Constant(2, 0.5);
  return config;
}

const BoxSet kUnitBox = BoxSet::cube(2, 0.0, 1.0);
const PlayerLayout kTwoPlayers = PlayerLayout::uniform(2);

}  // namespace

TEST_CASE("single weighted step clamps along the scaled gradient") {
  Eigen::VectorXd x(2), g(2);
  x << 0.5, 0.5;
  g << 10.0, -10.0;
  const StepWeights w({10.0, 5.0});
  const Eigen::VectorXd next = step(x, g, w, kTwoPlayers, kUnitBox);
  // x - g/w = (-0.5, 2.5), clamped to the unit box.
  CHECK(next[0] == 0.0);
  CHECK(next[1] == 1.0);
  const Eigen::VectorXd nu = step_uniform(x, g, 100.0, kUnitBox);
  CHECK(nu[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(nu[1] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK_THROWS_AS(step_uniform(x, g, 0.0, kUnitBox), DimensionMismatch);
  Eigen::VectorXd g3 = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(step(x, g3, w, kTwoPlayers, kUnitBox), DimensionMismatch);
}

TEST_CASE("decaying weight schedule starts at alpha (r - 2) / 2") {
  CHECK(omega_t(1.0, 3.0, 0) == 0.5);
  CHECK(omega_t(2.0, 4.0, 3) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK_THROWS_AS(omega_t(0.0, 3.0, 0), DimensionMismatch);
  CHECK_THROWS_AS(omega_t(1.0, 2.0, 0), DimensionMismatch);
  CHECK_THROWS_AS(omega_t(1.0, 3.0, -1), DimensionMismatch);
}

TEST_CASE("deterministic play converges to the interior equilibrium") {
  const QuadGame game;
  SolverConfig config = uniform_config(30.0, 3000, 100);
  const Eigen::VectorXd x_ref = game.x_star;
  const Trajectory traj =
      solve(config, game.exact_feed(), kUnitBox, kTwoPlayers, &x_ref);
  CHECK(traj.errors.back() < 1e-25);
  CHECK(traj.residuals.back() < 1e-12);
  CHECK((traj.final_x - game.x_star).norm() < 1e-13);
  // Noiseless contraction: logged squared errors never increase.
  for (std::size_t j = 1; j < traj.errors.size(); ++j)
    CHECK(traj.errors[j] <= traj.errors[j - 1] * (1.0 + 1e-12) + 1e-300);
}

TEST_CASE("trajectory logs the configured grid plus the final point") {
  const QuadGame game;
  SolverConfig config = uniform_config(30.0, 10, 4);
  config.record_iterates = true;
  const Trajectory traj =
      solve(config, game.exact_feed(), kUnitBox, kTwoPlayers);
  CHECK(traj.steps == std::vector<int>{0, 4, 8, 10});
  CHECK(traj.iterates.size() == traj.steps.size());
  CHECK((traj.iterates[0] - config.x0).norm() == 0.0);
  // Without a reference the error channel is NaN.
  CHECK(std::isnan(traj.errors[0]));

  SolverConfig dense = uniform_config(30.0, 10, 1);
  const Trajectory t2 = solve(dense, game.exact_feed(), kUnitBox, kTwoPlayers);
  REQUIRE(t2.steps.size() == 11);
  CHECK(t2.steps.front() == 0);
  CHECK(t2.steps.back() == 10);
}

TEST_CASE("solve rejects malformed configurations") {
  const QuadGame game;
  SolverConfig config = uniform_config(30.0, 10);
  config.x0 = Eigen::VectorXd::Constant(2, 1.5);  // outside the unit box
  CHECK_THROWS_AS(solve(config, game.exact_feed(), kUnitBox, kTwoPlayers),
                  DimensionMismatch);
  SolverConfig c2 = uniform_config(30.0, 0);
  CHECK_THROWS_AS(solve(c2, game.exact_feed(), kUnitBox, kTwoPlayers),
                  DimensionMismatch);
  SolverConfig c3 = uniform_config(30.0, 10);
  c3.log_stride = 0;
  CHECK_THROWS_AS(solve(c3, game.exact_feed(), kUnitBox, kTwoPlayers),
                  DimensionMismatch);
  SolverConfig c4 = uniform_config(30.0, 10);
  Eigen::VectorXd bad_ref = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(
      solve(c4, game.exact_feed(), kUnitBox, kTwoPlayers, &bad_ref),
      DimensionMismatch);
}

TEST_CASE("identical seeds reproduce a stochastic run bitwise") {
  const QuadGame game;
  const GradientFeed feed = game.noisy_feed(0.3);
  SolverConfig config = uniform_config(30.0, 200, 10);
  config.seed = 12345;
  const Eigen::VectorXd x_ref = game.x_star;
  const Trajectory a = solve(config, feed, kUnitBox, kTwoPlayers, &x_ref);
  const Trajectory b = solve(config, feed, kUnitBox, kTwoPlayers, &x_ref);
  REQUIRE(a.errors.size() == b.errors.size());
  for (std::size_t j = 0; j < a.errors.size(); ++j)
    CHECK(a.errors[j] == b.errors[j]);
  CHECK((a.final_x - b.final_x).norm() == 0.0);

  config.seed = 54321;
  const Trajectory c = solve(config, feed, kUnitBox, kTwoPlayers, &x_ref);
  CHECK((a.final_x - c.final_x).norm() > 0.0);
}

TEST_CASE("batch config averages that many draws per iteration") {
  auto calls = std::make_shared<int>(0);
  GradientFeed feed;
  feed.deterministic = false;
  feed.sample = [calls](const Eigen::VectorXd& x, int, Rng&) {
    ++*calls;
    return Eigen::VectorXd(Eigen::VectorXd::Zero(x.size()));
  };
  SolverConfig config = uniform_config(30.0, 5);
  config.batch = 3;
  solve(config, feed, kUnitBox, kTwoPlayers);
  // 5 iterations x 3 draws, plus one fresh draw for the final logged row.
  CHECK(*calls == 16);

  *calls = 0;
  feed.deterministic = true;  // batching is skipped for exact feeds
  solve(config, feed, kUnitBox, kTwoPlayers);
  CHECK(*calls == 6);
}

TEST_CASE("reference solver reaches the interior equilibrium") {
  const QuadGame game;
  const Eigen::VectorXd x =
      reference_nash(game.exact_feed(), kUnitBox, game.alpha, game.lipschitz,
                     1e-12);
  CHECK((x - game.x_star).norm() < 1e-9);
  CHECK_THROWS_AS(reference_nash(game.noisy_feed(0.1), kUnitBox, game.alpha,
                                 game.lipschitz),
                  DimensionMismatch);
  CHECK_THROWS_AS(reference_nash(game.exact_feed(), kUnitBox, game.alpha,
                                 game.lipschitz, 1e-12, 3),
                  MaxIterationsExceeded);
}

TEST_CASE("fixed-point polish lands on an exact fixed point of the map") {
  const QuadGame game;
  const GradientFeed feed = game.exact_feed();
  const double omega = 4.0 * game.lipschitz * game.lipschitz / game.alpha;
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(2, 0.25);
  const Eigen::VectorXd xf = polish_fixed_point(feed, kUnitBox, omega, x0);
  Rng rng(0);
  const Eigen::VectorXd mapped =
      project_box(xf - feed.sample(xf, 0, rng) / omega, kUnitBox);
  CHECK((mapped - xf).norm() == 0.0);
  CHECK((xf - game.x_star).norm() < 1e-12);
}

TEST_CASE("step condition compares weights against alpha over 4 L^2") {
  CHECK(check_step_condition(StepWeights::uniform(2, 4.0), 1.0, 1.0));
  CHECK_FALSE(check_step_condition(StepWeights({8.0, 4.0}), 1.0, 1.0));
  CHECK_THROWS_AS(check_step_condition(StepWeights({1.0}), 0.0, 1.0),
                  DimensionMismatch);
}

TEST_CASE("contraction factor is omega_1 over omega_n plus alpha") {
  CHECK(contraction_factor(StepWeights::uniform(3, 4.0), 1.0) ==
        doctest::Approx(0.8).epsilon(1e-15));
  CHECK(contraction_factor(StepWeights({6.0, 3.0}), 1.0) ==
        doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(contraction_factor(StepWeights({1.0}), 0.0),
                  DimensionMismatch);
}

TEST_CASE("stationary noise bound composes the weight extremes") {
  const auto nb = neighborhood_bound(StepWeights::uniform(3, 2.0), 1.0, 1.0, 1.0);
  // 2*2*(2*1 + 1*1) / (1*2*(2+1)) = 12/6 = 2.
  CHECK(nb.value == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(nb.weight_gap_ok);
  const auto spread = neighborhood_bound(StepWeights({2.0, 1.0}), 1.0, 0.0, 1.0);
  CHECK_FALSE(spread.weight_gap_ok);  // omega_1 - omega_n = 1 is not < alpha
  CHECK(spread.value > 0.0);
  CHECK_THROWS_AS(neighborhood_bound(StepWeights({1.0}), 1.0, -0.1, 1.0),
                  DimensionMismatch);
}

TEST_CASE("decay rate constant takes the binding regime") {
  CHECK(decay_rate_constant(1.0, 3.0, 1.0, 0.0, 1.0, 1.0) ==
        doctest::Approx(24.0).epsilon(1e-15));
  // Large initial error flips the max to the alpha^2 r e0 branch.
  CHECK(decay_rate_constant(1.0, 3.0, 100.0, 0.0, 1.0, 1.0) ==
        doctest::Approx(300.0).epsilon(1e-15));
  CHECK_THROWS_AS(decay_rate_constant(1.0, 2.0, 1.0, 0.0, 1.0, 1.0),
                  DimensionMismatch);
  CHECK_THROWS_AS(decay_rate_constant(1.0, 3.0, 1.0, 0.0, 0.0, 1.0),
                  DimensionMismatch);
}

namespace {

// Synthetic multi-trial bundle whose mean error is exactly value_at(t).
std::vector<Trajectory> synthetic_trials(
    const std::vector<int>& steps,
    const std::function<double(int)>& value_at, int n_trials = 12) {
  std::vector<Trajectory> out;
  for (int k = 0; k < n_trials; ++k) {
    Trajectory t;
    t.steps = steps;
    for (int s : steps) {
      t.errors.push_back(value_at(s));
      t.residuals.push_back(0.0);
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

TEST_CASE("rate report recovers a synthetic 1/t decay") {
  std::vector<int> steps;
  for (int t = 0; t <= 2000; t += 10) steps.push_back(t);
  const double big_a = 7.0;
  const double r = 3.0;
  const auto trials = synthetic_trials(
      steps, [&](int t) { return big_a / (r + static_cast<double>(t)); });
  const RateReport rep = rate_check(trials, 1.0, r, 100);
  CHECK(rep.sup_scaled_error == doctest::Approx(big_a).epsilon(1e-12));
  CHECK(rep.loglog_slope > -1.01);
  CHECK(rep.loglog_slope < -0.97);
  CHECK(rep.trend_ok);
  CHECK(rep.first_quartile_max == doctest::Approx(big_a).epsilon(1e-12));
  CHECK(rep.last_quartile_max == doctest::Approx(big_a).epsilon(1e-12));
}

TEST_CASE("rate report flags an upward drift") {
  std::vector<int> steps;
  for (int t = 0; t <= 2000; t += 10) steps.push_back(t);
  const auto trials = synthetic_trials(
      steps, [](int t) { return 1e-6 * (1.0 + static_cast<double>(t)); });
  const RateReport rep = rate_check(trials, 1.0, 3.0, 100);
  CHECK_FALSE(rep.trend_ok);
  CHECK(rep.loglog_slope > 0.5);
}

TEST_CASE("rate report enforces its preconditions") {
  std::vector<int> steps = {0, 500, 1000, 1500, 2000};
  const auto trials =
      synthetic_trials(steps, [](int t) { return 1.0 / (3.0 + t); }, 5);
  CHECK_THROWS_AS(rate_check(trials, 1.0, 3.0, 100), PreconditionFailed);
  const auto enough =
      synthetic_trials(steps, [](int t) { return 1.0 / (3.0 + t); }, 10);
  CHECK_THROWS_AS(rate_check(enough, 1.0, 3.0, 1800), PreconditionFailed);
}

TEST_CASE("mean errors average across trials on a shared grid") {
  Trajectory a, b;
  a.steps = {0, 1};
  a.errors = {1.0, 2.0};
  b.steps = {0, 1};
  b.errors = {3.0, 4.0};
  const auto mean = mean_errors({a, b});
  REQUIRE(mean.size() == 2);
  CHECK(mean[0] == 2.0);
  CHECK(mean[1] == 3.0);
  b.steps = {0, 2};
  CHECK_THROWS_AS(mean_errors({a, b}), DimensionMismatch);
  CHECK_THROWS_AS(mean_errors({}), DimensionMismatch);
}

TEST_CASE("trial bundles are identical across thread counts") {
  const QuadGame game;
  const GradientFeed feed = game.noisy_feed(0.2);
  SolverConfig config = uniform_config(30.0, 100, 10);
  const Eigen::VectorXd x_ref = game.x_star;
  const auto seq = run_trials(config, feed, kUnitBox, kTwoPlayers, 6,
                              777, 1, &x_ref);
  const auto par = run_trials(config, feed, kUnitBox, kTwoPlayers, 6,
                              777, 3, &x_ref);
  REQUIRE(seq.size() == 6);
  REQUIRE(par.size() == 6);
  bool trials_differ = false;
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK((seq[k].final_x - par[k].final_x).norm() == 0.0);
    for (std::size_t j = 0; j < seq[k].errors.size(); ++j)
      CHECK(seq[k].errors[j] == par[k].errors[j]);
    if (k > 0 && (seq[k].final_x - seq[0].final_x).norm() > 0.0)
      trials_differ = true;
  }
  CHECK(trials_differ);  // per-trial seeds actually vary
}

TEST_CASE("trial bundle failures surface as a numerical error") {
  const QuadGame game;
  SolverConfig config = uniform_config(30.0, 10);
  config.x0 = Eigen::VectorXd::Constant(2, 2.0);  // infeasible in every trial
  CHECK_THROWS_AS(run_trials(config, game.exact_feed(), kUnitBox, kTwoPlayers,
                             4, 1, 2),
                  NumericalError);
  SolverConfig ok = uniform_config(30.0, 10);
  CHECK_THROWS_AS(run_trials(ok, game.exact_feed(), kUnitBox, kTwoPlayers, 0,
                             1, 1),
                  DimensionMismatch);
}

TEST_CASE("gradient variance is zero for exact feeds and sigma^2 n for noise") {
  const QuadGame game;
  std::vector<Eigen::VectorXd> probes = {Eigen::VectorXd::Constant(2, 0.5),
                                         Eigen::VectorXd::Constant(2, 0.1)};
  Rng rng(55);
  // Identical draws: only the mean's summation roundoff survives.
  CHECK(measure_gradient_variance(game.exact_feed(), probes, 100, rng) < 1e-25);
  // Per-coordinate stddev 0.5: E||g - mean||^2 = 2 * 0.25 = 0.5.
  Rng rng2(56);
  const double v =
      measure_gradient_variance(game.noisy_feed(0.5), probes, 20000, rng2);
  CHECK(v == doctest::Approx(0.5).epsilon(0.05));
  CHECK_THROWS_AS(measure_gradient_variance(game.exact_feed(), probes, 1, rng),
                  DimensionMismatch);
  CHECK_THROWS_AS(measure_gradient_variance(game.exact_feed(), {}, 10, rng),
                  DimensionMismatch);
}

TEST_CASE("biased decorator adds a decaying deterministic offset") {
  const QuadGame game;
  Eigen::VectorXd dir(2);
  dir << 3.0, 4.0;  // normalized internally
  const GradientFeed biased = make_biased_feed(game.exact_feed(), 1.0, 1.0, dir);
  CHECK_FALSE(biased.deterministic);
  Rng rng(1);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(2, 0.5);
  const Eigen::VectorXd g0 = game.a * (x - Eigen::VectorXd(game.x_star));
  const Eigen::VectorXd b0 = biased.sample(x, 0, rng);
  CHECK((b0 - g0).norm() == doctest::Approx(1.0).epsilon(1e-12));
  const Eigen::VectorXd b9 = biased.sample(x, 9, rng);
  CHECK((b9 - g0).norm() == doctest::Approx(0.1).epsilon(1e-12));
}
