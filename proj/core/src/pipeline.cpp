#include "ddgame/pipeline.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <utility>

#include "ddgame/csv.hpp"
#include "ddgame/errors.hpp"
#include "ddgame/rng.hpp"

namespace ddgame {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Eigen::MatrixXd perturb_entries(const Eigen::MatrixXd& b, double stddev,
                                Rng& rng) {
  Eigen::MatrixXd out = b;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out(i, j) += stddev * rng.normal();
  return out;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::vector<std::string> header;
  header.reserve(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    header.push_back("c_" + std::to_string(j));
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto& row = rows[static_cast<std::size_t>(i)];
    row.reserve(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
  }
  write_csv(path, header, rows);
}

std::string join_vector(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ",";
    out += format_full(v[i]);
  }
  return out;
}

}  // namespace

MarketParams make_market(const MarketConfig& mc, std::uint64_t master_seed) {
  const std::uint64_t seed =
      mc.seed ? *mc.seed : split_seed(master_seed, seed_stream::kMarket);
  Rng rng(seed);
  MarketParams mkt;
  mkt.n = mc.n;
  mkt.lambda = Eigen::VectorXd::Constant(mc.n, mc.lambda);
  mkt.p_w = mc.p_w;
  mkt.p_r = mc.p_r;
  mkt.w = Eigen::VectorXd::Constant(mc.n, mc.w);
  mkt.base_demand = standardize(synth_demand(mc.n, mc.demand_days, rng));
  mkt.b = build_B(mc.n, mc.b_noise_std, rng);
  mkt.validate();
  return mkt;
}

BoxSet sampling_box(const MarketConfig& mc, const SamplingConfig& sc) {
  if (sc.box_lo) return BoxSet::cube(mc.n, *sc.box_lo, *sc.box_hi);
  return BoxSet::cube(mc.n, mc.p_w, mc.p_r);
}

Eigen::MatrixXd learn_coefficients(const LearningConfig& lc,
                                   const MarketParams& mkt,
                                   const Dataset& data, Rng& rng) {
  switch (lc.method) {
    case LearnMethod::LeastSquares: {
      LeastSquaresOptions opts;
      opts.radius = lc.radius;
      opts.ridge = lc.ridge;
      return fit_least_squares(data, opts).b_hat;
    }
    case LearnMethod::ProjectedGd:
      return fit_erm_projected(data, *lc.radius, lc.erm_steps).b_hat;
    case LearnMethod::PerturbTrue:
      return perturb_entries(mkt.b, lc.perturb_std, rng);
  }
  throw ConfigError("learn_coefficients: unknown method");
}

BoundReport compute_bounds(const ExperimentConfig& cfg,
                           const MarketParams& mkt,
                           const Eigen::MatrixXd& b_hat) {
  const BoxSet feasible = mkt.feasible_box();
  const BoxSet sample_box = sampling_box(cfg.market, cfg.sampling);
  const double radius = cfg.learning.radius
                            ? *cfg.learning.radius
                            : std::max(0.45, 1.1 * b_hat.norm());
  const Eigen::MatrixXd second = uniform_box_second_moment(sample_box);
  const double mu = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(second)
                        .eigenvalues()
                        .minCoeff();
  const double l_beta = box_max_sq_norm(sample_box);
  Rng rng_theta(split_seed(cfg.run.master_seed, seed_stream::kTheta));
  const double theta =
      calibrate_theta(mkt.true_map(), UniformBoxSampler{sample_box}, mkt.b,
                      radius, 2000, 24, rng_theta);
  // The class contains the truth, so no misspecification term is added.
  const double eta = 0.0;
  return make_bound_report(cfg.sampling.m, cfg.learning.delta,
                           mkt.n * mkt.n, mu, l_beta, theta, radius, eta,
                           box_max_sq_norm(feasible), demand_lipschitz(mkt),
                           cost_lipschitz_bound(mkt, radius),
                           feasible.diameter());
}

RunSummary run_experiment(const ExperimentConfig& cfg) {
  RunSummary out;
  const std::uint64_t master = cfg.run.master_seed;

  // Ground truth and the deploy-and-observe phase.
  auto t0 = std::chrono::steady_clock::now();
  out.market = make_market(cfg.market, master);
  const BoxSet feasible = out.market.feasible_box();
  const BoxSet sample_box = sampling_box(cfg.market, cfg.sampling);
  const LocationScaleMap truth = out.market.true_map();
  const UniformBoxSampler sampler{sample_box};
  Rng rng_sample(split_seed(master, seed_stream::kSampling));
  out.data = collect_dataset(truth, sampler, cfg.sampling.m, rng_sample);
  out.timings.sample_s = seconds_since(t0);

  // Coefficient estimation.
  t0 = std::chrono::steady_clock::now();
  Rng rng_learn(split_seed(master, seed_stream::kLearn));
  out.b_hat = learn_coefficients(cfg.learning, out.market, out.data, rng_learn);
  out.fit_error = (out.b_hat - out.market.b).norm();
  out.timings.learn_s = seconds_since(t0);

  // Certificate and both equilibria.
  t0 = std::chrono::steady_clock::now();
  out.cert = certify(out.market, out.b_hat);
  out.alpha_used =
      cfg.solver.alpha ? *cfg.solver.alpha : out.cert.conservative_alpha();
  const double big_l = out.cert.grad_lipschitz;

  const GradientFeed learned_feed = make_expected_feed(out.market, out.b_hat);
  Eigen::VectorXd x_hat =
      reference_nash(learned_feed, feasible, out.alpha_used, big_l);
  out.x_hat = polish_fixed_point(learned_feed, feasible,
                                 4.0 * big_l * big_l / out.alpha_used,
                                 std::move(x_hat));

  const MonotonicityConstants cert_true = certify(out.market, out.market.b);
  const double alpha_true = cert_true.conservative_alpha();
  const GradientFeed true_feed = make_expected_feed(out.market, out.market.b);
  Eigen::VectorXd x_star =
      reference_nash(true_feed, feasible, alpha_true, cert_true.grad_lipschitz);
  out.x_star = polish_fixed_point(
      true_feed, feasible,
      4.0 * cert_true.grad_lipschitz * cert_true.grad_lipschitz / alpha_true,
      std::move(x_star));
  out.equilibrium_gap = (out.x_hat - out.x_star).norm();

  // Stochastic trials, measured against the learned-game equilibrium.
  SolverConfig run_cfg;
  if (cfg.solver.mode == StepMode::Constant) {
    out.omega_used = cfg.solver.omega
                         ? *cfg.solver.omega
                         : 1.2 * 4.0 * big_l * big_l / out.alpha_used;
    StepWeights weights = StepWeights::uniform(out.market.n, out.omega_used);
    if (!check_step_condition(weights, out.alpha_used, big_l))
      throw PreconditionFailed(
          "solver omega violates the constant-step condition");
    run_cfg.mode = ConstantStep{std::move(weights)};
  } else {
    out.omega_used = std::numeric_limits<double>::quiet_NaN();
    run_cfg.mode = DecayingStep{out.alpha_used, cfg.solver.r};
  }
  run_cfg.iterations = cfg.solver.iterations;
  run_cfg.batch = 1;  // the feed averages its own batch
  run_cfg.log_stride = cfg.run.log_stride;
  if (cfg.solver.x0.empty()) {
    run_cfg.x0 = 0.5 * (feasible.lo + feasible.hi);
  } else {
    if (static_cast<int>(cfg.solver.x0.size()) != out.market.n)
      throw ConfigError("solver x0 length != n");
    run_cfg.x0 = Eigen::Map<const Eigen::VectorXd>(
        cfg.solver.x0.data(), static_cast<Eigen::Index>(cfg.solver.x0.size()));
  }

  const GradientFeed noisy = make_stochastic_feed(
      out.market, out.b_hat, cfg.solver.batch, cfg.run.draw_from_truth);
  const PlayerLayout layout = PlayerLayout::uniform(out.market.n);
  out.trials = run_trials(run_cfg, noisy, feasible, layout, cfg.run.trials,
                          split_seed(master, seed_stream::kTrials),
                          cfg.run.threads, &out.x_hat);
  out.timings.solve_s = seconds_since(t0);

  // Audit bounds for the learning phase.
  t0 = std::chrono::steady_clock::now();
  out.bounds = compute_bounds(cfg, out.market, out.b_hat);
  out.timings.bounds_s = seconds_since(t0);

  return out;
}

std::vector<StepSummaryRow> summarize(const std::vector<Trajectory>& trials) {
  if (trials.empty()) return {};
  const std::vector<int>& grid = trials.front().steps;
  for (const Trajectory& tr : trials)
    if (tr.steps != grid)
      throw PreconditionFailed("summarize: trials do not share a log grid");

  const double n = static_cast<double>(trials.size());
  std::vector<StepSummaryRow> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double mean = 0.0;
    for (const Trajectory& tr : trials) mean += tr.errors[i];
    mean /= n;
    double var = 0.0;
    if (trials.size() > 1) {
      for (const Trajectory& tr : trials) {
        const double d = tr.errors[i] - mean;
        var += d * d;
      }
      var /= n - 1.0;
    }
    const double half = 1.96 * std::sqrt(var / n);
    out[i] = StepSummaryRow{grid[i], mean, std::max(0.0, mean - half),
                            mean + half};
  }
  return out;
}

void write_outputs(const std::string& dir, const ExperimentConfig& cfg,
                   const RunSummary& s) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto at = [&dir](const char* name) {
    return (fs::path(dir) / name).string();
  };

  write_demand_csv(at("demand.csv"), s.market.base_demand);
  write_dataset_csv(at("dataset.csv"), s.data);
  write_matrix_csv(at("b_true.csv"), s.market.b);
  write_matrix_csv(at("b_hat.csv"), s.b_hat);

  {
    std::vector<std::vector<double>> rows;
    for (std::size_t trial = 0; trial < s.trials.size(); ++trial) {
      const Trajectory& tr = s.trials[trial];
      for (std::size_t i = 0; i < tr.steps.size(); ++i)
        rows.push_back({static_cast<double>(trial),
                        static_cast<double>(tr.steps[i]), tr.errors[i],
                        tr.residuals[i]});
    }
    write_csv(at("trajectory.csv"), {"trial", "t", "error_sq", "residual"},
              rows);
  }

  const std::vector<StepSummaryRow> rows = summarize(s.trials);
  {
    std::vector<std::vector<double>> flat;
    flat.reserve(rows.size());
    for (const StepSummaryRow& r : rows)
      flat.push_back(
          {static_cast<double>(r.t), r.mean_error_sq, r.ci_low, r.ci_high});
    write_csv(at("summary.csv"), {"t", "mean_error_sq", "ci_low", "ci_high"},
              flat);
  }

  {
    std::ofstream fout(at("bounds.txt"));
    if (!fout) throw ConfigError("cannot write " + at("bounds.txt"));
    fout << s.bounds.serialize();
  }

  {
    std::ofstream fout(at("run_summary.txt"));
    if (!fout) throw ConfigError("cannot write " + at("run_summary.txt"));
    const auto line = [&fout](const std::string& key, const std::string& val) {
      fout << key << " = " << val << "\n";
    };
    line("market.n", std::to_string(s.market.n));
    line("market.p_w", format_full(s.market.p_w));
    line("market.p_r", format_full(s.market.p_r));
    line("market.lambda_min", format_full(s.market.lambda.minCoeff()));
    line("learning.method", to_string(cfg.learning.method));
    line("sampling.m", std::to_string(cfg.sampling.m));
    line("fit_error", format_full(s.fit_error));
    line("kappa", format_full(s.cert.kappa));
    if (s.cert.alpha) line("alpha_kappa", format_full(*s.cert.alpha));
    if (s.cert.alpha_frobenius)
      line("alpha_frobenius", format_full(*s.cert.alpha_frobenius));
    line("alpha_used", format_full(s.alpha_used));
    line("grad_lipschitz", format_full(s.cert.grad_lipschitz));
    line("solver.mode", to_string(cfg.solver.mode));
    if (cfg.solver.mode == StepMode::Constant)
      line("omega_used", format_full(s.omega_used));
    else
      line("solver.r", format_full(cfg.solver.r));
    line("solver.iterations", std::to_string(cfg.solver.iterations));
    line("solver.batch", std::to_string(cfg.solver.batch));
    line("run.trials", std::to_string(cfg.run.trials));
    line("run.master_seed", std::to_string(cfg.run.master_seed));
    line("run.draw_from_truth", cfg.run.draw_from_truth ? "true" : "false");
    line("x_hat", join_vector(s.x_hat));
    line("x_star", join_vector(s.x_star));
    line("equilibrium_gap", format_full(s.equilibrium_gap));
    if (!rows.empty()) {
      line("final_t", std::to_string(rows.back().t));
      line("final_mean_error_sq", format_full(rows.back().mean_error_sq));
    }
    line("timings.sample_s", format_full(s.timings.sample_s));
    line("timings.learn_s", format_full(s.timings.learn_s));
    line("timings.solve_s", format_full(s.timings.solve_s));
    line("timings.bounds_s", format_full(s.timings.bounds_s));
  }
}

}  // namespace ddgame
