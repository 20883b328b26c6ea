// Command-line front end: sample, learn, solve, pipeline, verify, bounds.
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddgame/config.hpp"
#include "ddgame/csv.hpp"
#include "ddgame/errors.hpp"
#include "ddgame/oracle.hpp"
#include "ddgame/pipeline.hpp"
#include "ddgame/wasserstein.hpp"

namespace {

using namespace ddgame;

struct GlobalArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> trials;
};

ExperimentConfig load_config(const GlobalArgs& args) {
  ExperimentConfig cfg;
  if (!args.config_path.empty()) cfg = parse_config_file(args.config_path);
  if (args.seed) cfg.run.master_seed = *args.seed;
  if (args.out) cfg.run.output_dir = *args.out;
  if (args.trials) {
    if (*args.trials < 1) throw ConfigError("--trials must be >= 1");
    cfg.run.trials = *args.trials;
  }
  return cfg;
}

void write_ground_truth(const std::string& dir, const MarketParams& mkt,
                        const Dataset& data) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_demand_csv((fs::path(dir) / "demand.csv").string(), mkt.base_demand);
  write_dataset_csv((fs::path(dir) / "dataset.csv").string(), data);
}

int cmd_sample(const ExperimentConfig& cfg) {
  const MarketParams mkt = make_market(cfg.market, cfg.run.master_seed);
  Rng rng(split_seed(cfg.run.master_seed, seed_stream::kSampling));
  const Dataset data =
      collect_dataset(mkt.true_map(),
                      UniformBoxSampler{sampling_box(cfg.market, cfg.sampling)},
                      cfg.sampling.m, rng);
  write_ground_truth(cfg.run.output_dir, mkt, data);
  std::cout << "sampled " << data.m() << " rounds from " << mkt.n
            << " stations into " << cfg.run.output_dir << "\n";
  return 0;
}

int cmd_learn(const ExperimentConfig& cfg) {
  const MarketParams mkt = make_market(cfg.market, cfg.run.master_seed);
  Rng rng_sample(split_seed(cfg.run.master_seed, seed_stream::kSampling));
  const Dataset data =
      collect_dataset(mkt.true_map(),
                      UniformBoxSampler{sampling_box(cfg.market, cfg.sampling)},
                      cfg.sampling.m, rng_sample);
  Rng rng_learn(split_seed(cfg.run.master_seed, seed_stream::kLearn));
  const Eigen::MatrixXd b_hat =
      learn_coefficients(cfg.learning, mkt, data, rng_learn);
  write_ground_truth(cfg.run.output_dir, mkt, data);
  {
    namespace fs = std::filesystem;
    std::vector<std::string> header;
    for (int j = 0; j < mkt.n; ++j) header.push_back("c_" + std::to_string(j));
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(mkt.n));
    for (int i = 0; i < mkt.n; ++i)
      for (int j = 0; j < mkt.n; ++j)
        rows[static_cast<std::size_t>(i)].push_back(b_hat(i, j));
    write_csv((fs::path(cfg.run.output_dir) / "b_hat.csv").string(), header,
              rows);
  }
  std::cout << "method " << to_string(cfg.learning.method) << ", m = "
            << data.m() << ", coefficient error |B_hat - B|_F = "
            << format_full((b_hat - mkt.b).norm()) << "\n";
  return 0;
}

int cmd_run(const ExperimentConfig& cfg, bool full_outputs) {
  const RunSummary s = run_experiment(cfg);
  if (full_outputs) {
    write_outputs(cfg.run.output_dir, cfg, s);
  } else {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.run.output_dir);
    // Solver artifacts only.
    std::vector<std::vector<double>> rows;
    for (std::size_t trial = 0; trial < s.trials.size(); ++trial) {
      const Trajectory& tr = s.trials[trial];
      for (std::size_t i = 0; i < tr.steps.size(); ++i)
        rows.push_back({static_cast<double>(trial),
                        static_cast<double>(tr.steps[i]), tr.errors[i],
                        tr.residuals[i]});
    }
    write_csv((fs::path(cfg.run.output_dir) / "trajectory.csv").string(),
              {"trial", "t", "error_sq", "residual"}, rows);
    std::vector<std::vector<double>> flat;
    for (const StepSummaryRow& r : summarize(s.trials))
      flat.push_back(
          {static_cast<double>(r.t), r.mean_error_sq, r.ci_low, r.ci_high});
    write_csv((fs::path(cfg.run.output_dir) / "summary.csv").string(),
              {"t", "mean_error_sq", "ci_low", "ci_high"}, flat);
  }
  const std::vector<StepSummaryRow> tail = summarize(s.trials);
  std::cout << "alpha = " << format_full(s.alpha_used)
            << ", L = " << format_full(s.cert.grad_lipschitz)
            << ", coefficient error = " << format_full(s.fit_error)
            << ", equilibrium gap = " << format_full(s.equilibrium_gap)
            << "\n";
  if (!tail.empty())
    std::cout << "mean squared distance to the learned equilibrium at t = "
              << tail.back().t << ": "
              << format_full(tail.back().mean_error_sq) << "\n";
  std::cout << "artifacts in " << cfg.run.output_dir << "\n";
  return 0;
}

int cmd_bounds(const ExperimentConfig& cfg) {
  const MarketParams mkt = make_market(cfg.market, cfg.run.master_seed);
  Rng rng_sample(split_seed(cfg.run.master_seed, seed_stream::kSampling));
  const Dataset data =
      collect_dataset(mkt.true_map(),
                      UniformBoxSampler{sampling_box(cfg.market, cfg.sampling)},
                      cfg.sampling.m, rng_sample);
  Rng rng_learn(split_seed(cfg.run.master_seed, seed_stream::kLearn));
  const Eigen::MatrixXd b_hat =
      learn_coefficients(cfg.learning, mkt, data, rng_learn);
  std::cout << compute_bounds(cfg, mkt, b_hat).serialize();
  return 0;
}

// Independent spot checks of the analytic pieces against the oracle module.
int cmd_verify(const ExperimentConfig& cfg) {
  int failures = 0;
  const auto report = [&failures](const char* name, bool ok) {
    std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };

  const MarketParams mkt = make_market(cfg.market, cfg.run.master_seed);
  Rng rng(split_seed(cfg.run.master_seed, 97));

  // Cost partials vs central differences on the oracle's own cost.
  {
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const int i = static_cast<int>(rng.index(static_cast<std::size_t>(mkt.n)));
      Eigen::VectorXd x(mkt.n);
      for (int j = 0; j < mkt.n; ++j) x[j] = rng.uniform(mkt.p_w, mkt.p_r);
      const double z = rng.uniform(-3.0, 3.0);
      const double gx = grad_x(mkt, i, x, z);
      const double gz = grad_z(mkt, i, x, z);
      const double fx = oracle::finite_diff_1d(
          [&](double v) {
            return oracle::ev_cost(mkt.lambda[i], mkt.p_w, mkt.p_r, mkt.w[i],
                                   v, z);
          },
          x[i], 1e-5);
      const double fz = oracle::finite_diff_1d(
          [&](double v) {
            return oracle::ev_cost(mkt.lambda[i], mkt.p_w, mkt.p_r, mkt.w[i],
                                   x[i], v);
          },
          z, 1e-5);
      worst = std::max({worst, std::abs(gx - fx), std::abs(gz - fz)});
    }
    report("cost partial derivatives vs finite differences", worst < 1e-6);
  }

  // Closed-form equilibrium of the reduced quadratic game vs the solver.
  {
    oracle::QuadraticGameSpec spec;
    spec.lambda = Eigen::VectorXd::Constant(2, 1.0);
    spec.xi_bar = Eigen::VectorXd::Constant(2, 1.0);
    spec.b = Eigen::MatrixXd::Zero(2, 2);
    spec.b(0, 1) = spec.b(1, 0) = -0.1;
    spec.box = BoxSet::cube(2, 0.0, 2.0);
    const Eigen::VectorXd closed = oracle::closed_form_nash(spec);
    const GradientFeed feed = make_deterministic_feed(
        [&spec](const Eigen::VectorXd& x) {
          return oracle::quadratic_gradient(spec, x);
        });
    const Eigen::VectorXd iter = reference_nash(feed, spec.box, 0.8, 1.1);
    report("closed-form vs iterative equilibrium",
           (closed - iter).norm() < 1e-8);
  }

  // Transport distance on hand-computable samples.
  {
    const double w1 = wasserstein1_1d({0.0, 1.0}, {0.0, 3.0});
    report("transport distance on two-point samples",
           std::abs(w1 - 1.0) < 1e-15);
  }

  // Certified monotonicity inequality on random pairs.
  {
    const MonotonicityConstants cert = certify(mkt, mkt.b);
    const double alpha = cert.conservative_alpha();
    const GradientFeed feed = make_expected_feed(mkt, mkt.b);
    Rng probe(split_seed(cfg.run.master_seed, 98));
    bool ok = true;
    Eigen::VectorXd x(mkt.n), y(mkt.n);
    for (int trial = 0; trial < 100 && ok; ++trial) {
      for (int j = 0; j < mkt.n; ++j) {
        x[j] = probe.uniform(mkt.p_w, mkt.p_r);
        y[j] = probe.uniform(mkt.p_w, mkt.p_r);
      }
      const Eigen::VectorXd gx = feed.sample(x, 0, probe);
      const Eigen::VectorXd gy = feed.sample(y, 0, probe);
      const double lhs = (x - y).dot(gx - gy);
      ok = lhs >= alpha * (x - y).squaredNorm() - 1e-9;
    }
    report("certified monotonicity inequality", ok);
  }

  if (failures > 0) throw NumericalError("verify: checks failed");
  std::cout << "all checks passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Learn-then-optimize pipeline for games on decision-dependent "
      "distributions"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--config", args.config_path,
                 "Experiment config file (INI-style)");
  app.add_option("--seed", args.seed, "Override run.master_seed");
  app.add_option("--out", args.out, "Override run.output_dir");
  app.add_option("--trials", args.trials, "Override run.trials");

  auto* sample = app.add_subcommand(
      "sample", "Draw the decision/response dataset from the ground truth");
  auto* learn =
      app.add_subcommand("learn", "Sample, then fit the response coefficients");
  auto* solve = app.add_subcommand(
      "solve", "Full run, writing solver artifacts (trajectory, summary)");
  auto* pipeline = app.add_subcommand(
      "pipeline", "Full run, writing every artifact including bounds");
  auto* verify =
      app.add_subcommand("verify", "Run the independent oracle spot checks");
  auto* bounds =
      app.add_subcommand("bounds", "Print the learning-phase error bounds");
  // Global flags may appear after the subcommand.
  for (CLI::App* sub : {sample, learn, solve, pipeline, verify, bounds})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const ExperimentConfig cfg = load_config(args);
    if (sample->parsed()) return cmd_sample(cfg);
    if (learn->parsed()) return cmd_learn(cfg);
    if (solve->parsed()) return cmd_run(cfg, false);
    if (pipeline->parsed()) return cmd_run(cfg, true);
    if (verify->parsed()) return cmd_verify(cfg);
    if (bounds->parsed()) return cmd_bounds(cfg);
    std::cerr << "no subcommand\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
