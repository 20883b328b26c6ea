#include "ddgame/learn.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace ddgame {

namespace {

Eigen::MatrixXd clip_to_ball(Eigen::MatrixXd b, double radius) {
  const double norm = b.norm();
  if (norm > radius) b *= radius / norm;
  return b;
}

}  // namespace

HypothesisParams fit_least_squares(const Dataset& data,
                                   const LeastSquaresOptions& opts) {
  const long m = data.m();
  const int d = data.d();
  if (m < d)
    throw SingularGram("fit_least_squares: m < d, Gram matrix is singular");
  Eigen::MatrixXd gram = data.x.transpose() * data.x;  // d x d
  if (opts.ridge) {
    const double eps = 1e-8 * gram.trace() / static_cast<double>(d);
    gram += eps * Eigen::MatrixXd::Identity(d, d);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double ev_min = eig.eigenvalues().minCoeff();
  const double ev_max = eig.eigenvalues().maxCoeff();
  if (!(ev_min > 0.0) || ev_max / ev_min >= opts.cond_limit)
    throw SingularGram("fit_least_squares: Gram condition number too large");
  const Eigen::MatrixXd cross = data.z.transpose() * data.x;  // k x d
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  Eigen::MatrixXd b_hat = ldlt.solve(cross.transpose()).transpose();
  if (opts.radius) b_hat = clip_to_ball(std::move(b_hat), *opts.radius);
  return HypothesisParams{std::move(b_hat), opts.radius};
}

double empirical_risk(const Dataset& data, const Eigen::MatrixXd& b) {
  const double m = static_cast<double>(data.m());
  return (data.x * b.transpose() - data.z).squaredNorm() / (2.0 * m);
}

Eigen::MatrixXd empirical_risk_gradient(const Dataset& data,
                                        const Eigen::MatrixXd& b) {
  const double m = static_cast<double>(data.m());
  return (b * data.x.transpose() * data.x - data.z.transpose() * data.x) / m;
}

HypothesisParams fit_erm_projected(const Dataset& data, double ball_radius,
                                   int steps, double step_size) {
  if (!(ball_radius >= 0.0))
    throw DimensionMismatch("fit_erm_projected: radius must be >= 0");
  if (steps < 1) throw DimensionMismatch("fit_erm_projected: steps >= 1");
  const Eigen::MatrixXd gram = data.x.transpose() * data.x;
  double step = step_size;
  if (step <= 0.0) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double l_emp =
        eig.eigenvalues().maxCoeff() / static_cast<double>(data.m());
    if (!(l_emp > 0.0))
      throw SingularGram("fit_erm_projected: degenerate design matrix");
    step = 1.0 / l_emp;
  }
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(data.k(), data.d());
  const double risk0 = empirical_risk(data, b);
  const double blowup = 10.0 * std::max(risk0, 1e-300);
  for (int it = 0; it < steps; ++it) {
    b = clip_to_ball(b - step * empirical_risk_gradient(data, b), ball_radius);
    if (empirical_risk(data, b) > blowup)
      throw DivergenceDetected("fit_erm_projected: risk exceeded 10x initial");
  }
  return HypothesisParams{std::move(b), ball_radius};
}

bool check_sample_size(long m, int ell, double delta) {
  if (m < 2) throw PreconditionFailed("check_sample_size: m must be >= 2");
  if (ell < 1) throw PreconditionFailed("check_sample_size: ell must be >= 1");
  if (!(delta > 0.0) || !(delta < 0.5))
    throw PreconditionFailed("check_sample_size: delta must be in (0, 1/2)");
  const double md = static_cast<double>(m);
  return md / std::log(md) >=
         2.0 * (static_cast<double>(ell) + std::log(1.0 / delta));
}

double zeta(double m, double delta, double ell) {
  if (!(m >= 2.0)) throw PreconditionFailed("zeta: m must be >= 2");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw PreconditionFailed("zeta: delta must be in (0, 1)");
  if (!(ell >= 0.0)) throw PreconditionFailed("zeta: ell must be >= 0");
  return std::sqrt(std::log(m) * (ell + std::log(1.0 / delta)) / m);
}

double c_prime(double mu, double l_beta, double theta, double radius) {
  if (!(mu > 0.0)) throw PreconditionFailed("c_prime: mu must be positive");
  if (!(radius > 0.0))
    throw PreconditionFailed("c_prime: radius must be positive");
  if (l_beta < 0.0 || theta < 0.0)
    throw PreconditionFailed("c_prime: constants must be nonnegative");
  return (4.0 / mu) * std::max(l_beta / (15.0 * radius), theta);
}

double erm_error_bound(long m, double delta, int ell, double mu, double l_beta,
                       double theta, double radius) {
  if (!check_sample_size(m, ell, delta))
    throw PreconditionFailed(
        "erm_error_bound: sample-size gate m/log(m) >= 2(ell + log(1/delta)) "
        "fails");
  return c_prime(mu, l_beta, theta, radius) *
         zeta(static_cast<double>(m), delta, static_cast<double>(ell));
}

std::string BoundReport::serialize() const {
  std::ostringstream out;
  auto line = [&out](const char* name, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << name << "=" << buf << "\n";
  };
  out << "m=" << m << "\n";
  line("delta", delta);
  out << "ell=" << ell << "\n";
  line("zeta", zeta_value);
  line("c_prime", c_prime_value);
  line("erm_bound", erm_bound);
  line("approx_bound", approx_bound);
  line("excess_risk_bound", excess_risk_bound);
  line("mu", mu);
  line("l_beta", l_beta);
  line("theta", theta);
  line("radius", radius);
  line("eta", eta);
  line("epsilon", epsilon);
  line("l_z", l_z);
  line("l_bar", l_bar);
  line("diam_x", diam_x);
  return out.str();
}

BoundReport make_bound_report(long m, double delta, int ell, double mu,
                              double l_beta, double theta, double radius,
                              double eta, double epsilon, double l_z,
                              double l_bar, double diam_x) {
  if (eta < 0.0 || epsilon < 0.0 || l_z < 0.0 || l_bar < 0.0 || diam_x < 0.0)
    throw PreconditionFailed("make_bound_report: constants must be >= 0");
  BoundReport rep;
  rep.m = m;
  rep.delta = delta;
  rep.ell = ell;
  rep.mu = mu;
  rep.l_beta = l_beta;
  rep.theta = theta;
  rep.radius = radius;
  rep.eta = eta;
  rep.epsilon = epsilon;
  rep.l_z = l_z;
  rep.l_bar = l_bar;
  rep.diam_x = diam_x;
  rep.zeta_value = zeta(static_cast<double>(m), delta, ell);
  rep.c_prime_value = c_prime(mu, l_beta, theta, radius);
  rep.erm_bound = erm_error_bound(m, delta, ell, mu, l_beta, theta, radius);
  const double stat = l_z * epsilon * rep.erm_bound;
  rep.approx_bound = eta * l_z + stat;
  rep.excess_risk_bound =
      2.0 * eta * l_z + 2.0 * stat + 2.0 * std::sqrt(2.0) * l_bar * diam_x;
  return rep;
}

double subexponential_modulus(std::vector<double> samples) {
  if (samples.empty())
    throw DimensionMismatch("subexponential_modulus: no samples");
  for (double& v : samples) v = std::abs(v);
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double theta = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    // Survival at t_j counts samples >= t_j, i.e. n - j of n.
    const double survival = (n - static_cast<double>(j)) / n;
    theta = std::max(theta, samples[j] / std::log(2.0 / survival));
  }
  return theta;
}

double calibrate_theta(const LocationScaleMap& truth,
                       const UniformBoxSampler& sampler,
                       const Eigen::MatrixXd& beta_star, double radius,
                       int n_samples, int n_directions, Rng& rng) {
  if (n_samples < 10 || n_directions < 1)
    throw DimensionMismatch("calibrate_theta: need >= 10 samples, >= 1 dir");
  const int k = truth.k();
  const int d = truth.d();
  if (beta_star.rows() != k || beta_star.cols() != d)
    throw DimensionMismatch("calibrate_theta: beta_star shape mismatch");
  double theta = 0.0;
  std::vector<double> proj(static_cast<std::size_t>(n_samples));
  for (int dir = 0; dir < n_directions; ++dir) {
    // Random unit direction in coefficient space and a ball probe beta.
    Eigen::MatrixXd u(k, d), offset(k, d);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < d; ++c) {
        u(r, c) = rng.normal();
        offset(r, c) = rng.normal();
      }
    u /= std::max(u.norm(), 1e-300);
    Eigen::MatrixXd beta = beta_star;
    if (dir > 0) {
      // Probe the class boundary in a random direction (dir 0 stays at the
      // population minimizer).
      offset *= radius / std::max(offset.norm(), 1e-300);
      beta = clip_to_ball(beta_star + offset, radius);
    }
    for (int j = 0; j < n_samples; ++j) {
      const Eigen::VectorXd x = sampler.draw(rng);
      const Eigen::VectorXd z = sample_response(truth, x, rng);
      // Pointwise risk gradient (beta x - z) x'.
      const Eigen::MatrixXd g = (beta * x - z) * x.transpose();
      proj[static_cast<std::size_t>(j)] = (u.array() * g.array()).sum();
    }
    theta = std::max(theta, subexponential_modulus(proj));
  }
  return theta;
}

Eigen::MatrixXd uniform_box_second_moment(const BoxSet& box) {
  const int d = box.dim();
  const Eigen::VectorXd mean = 0.5 * (box.lo + box.hi);
  Eigen::MatrixXd out = mean * mean.transpose();
  for (int j = 0; j < d; ++j) {
    const double width = box.hi[j] - box.lo[j];
    out(j, j) += width * width / 12.0;
  }
  return out;
}

double box_max_sq_norm(const BoxSet& box) {
  double acc = 0.0;
  for (int j = 0; j < box.dim(); ++j)
    acc += std::max(box.lo[j] * box.lo[j], box.hi[j] * box.hi[j]);
  return acc;
}

}  // namespace ddgame
