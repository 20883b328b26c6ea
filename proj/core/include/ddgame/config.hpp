#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ddgame {

enum class LearnMethod { LeastSquares, ProjectedGd, PerturbTrue };
enum class StepMode { Constant, Decaying };

// [market] ground-truth instance.
struct MarketConfig {
  int n = 6;
  double lambda = 1.0;
  double p_w = 0.02;
  double p_r = 0.5;
  double w = -2.0;
  double b_noise_std = 0.01;  // entrywise jitter on the +-1/18 response
  int demand_days = 365;
  std::optional<std::uint64_t> seed;  // default split_seed(master_seed, 0)
};

// [sampling] deploy-and-observe phase.
struct SamplingConfig {
  long m = 800;
  // Optional cube override of the sampling region (default: feasible box).
  std::optional<double> box_lo;
  std::optional<double> box_hi;
};

// [learning] coefficient estimation.
struct LearningConfig {
  LearnMethod method = LearnMethod::PerturbTrue;
  std::optional<double> radius;  // hypothesis ball; also clips least_squares
  double delta = 0.05;           // confidence level of the error bound
  bool ridge = false;
  int erm_steps = 5000;
  double perturb_std = 0.01;  // entrywise noise for method = perturb_true
};

// [solver] gradient-play loop.
struct SolverSection {
  StepMode mode = StepMode::Constant;
  double r = 3.0;                // decaying-mode shift, > 2
  std::optional<double> alpha;   // empty = certified modulus
  int iterations = 2000;
  int batch = 1;
  std::optional<double> omega;   // empty = 1.2 * 4 L^2 / alpha
  std::vector<double> x0;        // empty = box midpoint
};

// [run] experiment shell.
struct RunConfig {
  int trials = 50;
  std::string output_dir = "out";
  std::uint64_t master_seed = 20240817;
  int threads = 1;  // 0 = hardware concurrency
  int log_stride = 1;
  bool draw_from_truth = false;
};

struct ExperimentConfig {
  MarketConfig market;
  SamplingConfig sampling;
  LearningConfig learning;
  SolverSection solver;
  RunConfig run;
};

// Strict INI subset: [section] headers, key = value lines, full-line # or ;
// comments. Unknown sections, unknown keys, duplicate keys and malformed
// values are all ConfigError with origin:line.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin);
ExperimentConfig parse_config_file(const std::string& path);

const char* to_string(LearnMethod method);
const char* to_string(StepMode mode);

}  // namespace ddgame
