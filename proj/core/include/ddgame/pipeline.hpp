#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "ddgame/config.hpp"
#include "ddgame/dataset.hpp"
#include "ddgame/ev_market.hpp"
#include "ddgame/learn.hpp"
#include "ddgame/monotonicity.hpp"
#include "ddgame/solver.hpp"

namespace ddgame {

// Streams split off run.master_seed; every phase draws from its own stream
// so changing one phase's parameters never shifts another phase's draws.
namespace seed_stream {
inline constexpr std::uint64_t kMarket = 0;
inline constexpr std::uint64_t kSampling = 1;
inline constexpr std::uint64_t kTheta = 2;
inline constexpr std::uint64_t kLearn = 3;
inline constexpr std::uint64_t kTrials = 4;
}  // namespace seed_stream

struct PhaseTimings {
  double sample_s = 0.0;
  double learn_s = 0.0;
  double solve_s = 0.0;
  double bounds_s = 0.0;
};

// Everything one experiment produces.
struct RunSummary {
  MarketParams market;
  Dataset data;
  Eigen::MatrixXd b_hat;
  double fit_error = 0.0;      // ||B_hat - B||_F
  MonotonicityConstants cert;  // certificate of the learned game
  double alpha_used = 0.0;
  double omega_used = 0.0;     // constant mode; NaN when decaying
  Eigen::VectorXd x_hat;       // learned-game equilibrium, the trial reference
  Eigen::VectorXd x_star;      // true-game equilibrium
  double equilibrium_gap = 0.0;  // ||x_hat - x_star||
  BoundReport bounds;
  std::vector<Trajectory> trials;
  PhaseTimings timings;
};

// t, mean over trials of ||x^t - x_hat||^2, and a two-sided 95% normal CI
// (sample stddev, n - 1; lower end clipped at zero).
struct StepSummaryRow {
  int t = 0;
  double mean_error_sq = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Ground truth from [market]: synthetic standardized demand, then the
// +-1/18 response matrix, both drawn from the market seed.
MarketParams make_market(const MarketConfig& mc, std::uint64_t master_seed);

// Feasible box, or the cube override from [sampling].
BoxSet sampling_box(const MarketConfig& mc, const SamplingConfig& sc);

// One coefficient matrix per learning.method.
Eigen::MatrixXd learn_coefficients(const LearningConfig& lc,
                                   const MarketParams& mkt,
                                   const Dataset& data, Rng& rng);

// Learning-phase audit report. The ball radius defaults to the larger of
// 0.45 and 1.1 ||B_hat||_F when the config leaves it open; theta is
// calibrated on the true map from the theta seed stream.
BoundReport compute_bounds(const ExperimentConfig& cfg,
                           const MarketParams& mkt,
                           const Eigen::MatrixXd& b_hat);

// sample -> learn -> certify -> equilibria -> stochastic trials -> bounds.
RunSummary run_experiment(const ExperimentConfig& cfg);

std::vector<StepSummaryRow> summarize(const std::vector<Trajectory>& trials);

// Writes demand.csv, dataset.csv, b_true.csv, b_hat.csv, trajectory.csv,
// summary.csv, bounds.txt and run_summary.txt under dir (created if needed).
void write_outputs(const std::string& dir, const ExperimentConfig& cfg,
                   const RunSummary& s);

}  // namespace ddgame
