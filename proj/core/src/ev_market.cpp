#include "ddgame/ev_market.hpp"

#include <cmath>

#include "ddgame/csv.hpp"

namespace ddgame {

void MarketParams::validate() const {
  if (n < 1) throw DimensionMismatch("MarketParams: n must be >= 1");
  if (lambda.size() != n || w.size() != n)
    throw DimensionMismatch("MarketParams: lambda/w must have n entries");
  for (int i = 0; i < n; ++i)
    if (!(lambda[i] > 0.0))
      throw DimensionMismatch("MarketParams: lambda must be positive");
  if (!(p_w > 0.0) || !(p_w < p_r))
    throw DimensionMismatch("MarketParams: need 0 < p_w < p_r");
  if (b.rows() != n || b.cols() != n)
    throw DimensionMismatch("MarketParams: B must be n x n");
  if (!b.allFinite())
    throw DimensionMismatch("MarketParams: B has non-finite entries");
  if (base_demand.rows() < 1 || base_demand.cols() != n)
    throw DimensionMismatch("MarketParams: base_demand must be days x n");
}

double softplus(double y) noexcept {
  return std::max(y, 0.0) + std::log1p(std::exp(-std::abs(y)));
}

double logistic(double y) noexcept {
  if (y >= 0.0) return 1.0 / (1.0 + std::exp(-y));
  const double e = std::exp(y);
  return e / (1.0 + e);
}

double cost(const MarketParams& mkt, int i, const Eigen::VectorXd& x,
            double z_i) {
  const double xi = x[i];
  return -z_i * xi + 0.5 * mkt.lambda[i] * xi * xi -
         mkt.p_w * softplus(mkt.w[i] - z_i) + mkt.p_r * softplus(z_i - mkt.w[i]);
}

double grad_x(const MarketParams& mkt, int i, const Eigen::VectorXd& x,
              double z_i) {
  return -z_i + mkt.lambda[i] * x[i];
}

double grad_z(const MarketParams& mkt, int i, const Eigen::VectorXd& x,
              double z_i) {
  return -x[i] + mkt.p_w * logistic(mkt.w[i] - z_i) +
         mkt.p_r * logistic(z_i - mkt.w[i]);
}

double player_gradient(const MarketParams& mkt, int i,
                       const Eigen::VectorXd& x, double z_i,
                       const Eigen::MatrixXd& b_model) {
  return grad_x(mkt, i, x, z_i) + b_model(i, i) * grad_z(mkt, i, x, z_i);
}

Eigen::VectorXd expected_gradient(const MarketParams& mkt,
                                  const Eigen::VectorXd& x,
                                  const Eigen::MatrixXd& b_model) {
  if (x.size() != mkt.n || b_model.rows() != mkt.n || b_model.cols() != mkt.n)
    throw DimensionMismatch("expected_gradient: dimension mismatch");
  const long days = mkt.base_demand.rows();
  const Eigen::VectorXd shift = b_model * x;
  Eigen::VectorXd out(mkt.n);
  for (int i = 0; i < mkt.n; ++i) {
    double acc = 0.0;
    for (long j = 0; j < days; ++j)
      acc += player_gradient(mkt, i, x, mkt.base_demand(j, i) + shift[i],
                             b_model);
    out[i] = acc / static_cast<double>(days);
  }
  return out;
}

Eigen::MatrixXd build_B(int n, double noise_std, Rng& rng) {
  if (n < 1) throw DimensionMismatch("build_B: n must be >= 1");
  if (noise_std < 0.0) throw DimensionMismatch("build_B: noise_std >= 0");
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double base = (i == j) ? -1.0 / 18.0 : 1.0 / 18.0;
      b(i, j) = base + noise_std * rng.normal();
    }
  return b;
}

Eigen::MatrixXd synth_demand(int n_stations, int n_days, Rng& rng) {
  if (n_stations < 1 || n_days < 2)
    throw DimensionMismatch("synth_demand: need >= 1 station, >= 2 days");
  Eigen::MatrixXd demand(n_days, n_stations);
  constexpr double kWeek = 7.0;
  for (int s = 0; s < n_stations; ++s) {
    const double level = rng.uniform(30.0, 90.0);
    const double swing = level * rng.uniform(0.08, 0.20);
    const double phase = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    const double ar_coeff = 0.7;
    const double innov_std = 0.10 * level;
    double state = 0.0;
    for (int t = 0; t < n_days; ++t) {
      state = ar_coeff * state + innov_std * rng.normal();
      const double seasonal =
          swing * std::sin(2.0 * 3.14159265358979323846 *
                               static_cast<double>(t % 7) / kWeek +
                           phase);
      demand(t, s) = std::max(level + seasonal + state, 0.05 * level);
    }
  }
  return demand;
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& data) {
  if (data.rows() < 2)
    throw DimensionMismatch("standardize: need >= 2 rows");
  const double m = static_cast<double>(data.rows());
  Eigen::MatrixXd out(data.rows(), data.cols());
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    const double mean = data.col(c).mean();
    const double var = (data.col(c).array() - mean).square().sum() / m;
    if (!(var > 0.0))
      throw DimensionMismatch("standardize: zero-variance column " +
                              std::to_string(c));
    out.col(c) = (data.col(c).array() - mean) / std::sqrt(var);
  }
  return out;
}

void write_demand_csv(const std::string& path, const Eigen::MatrixXd& demand) {
  std::vector<std::string> header;
  header.push_back("day");
  for (Eigen::Index s = 0; s < demand.cols(); ++s)
    header.push_back("station_" + std::to_string(s));
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(demand.rows()));
  for (Eigen::Index t = 0; t < demand.rows(); ++t) {
    std::vector<double> row;
    row.reserve(header.size());
    row.push_back(static_cast<double>(t));
    for (Eigen::Index s = 0; s < demand.cols(); ++s)
      row.push_back(demand(t, s));
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

Eigen::MatrixXd read_demand_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.empty() || table.header[0] != "day")
    throw ConfigError(path + ": demand CSV must start with column 'day'");
  const int n = static_cast<int>(table.header.size()) - 1;
  for (int s = 0; s < n; ++s)
    if (table.header[static_cast<std::size_t>(1 + s)] !=
        "station_" + std::to_string(s))
      throw ConfigError(path + ": unexpected demand column");
  if (n < 1 || table.rows.empty())
    throw ConfigError(path + ": demand CSV has no data");
  Eigen::MatrixXd out(static_cast<long>(table.rows.size()), n);
  for (std::size_t t = 0; t < table.rows.size(); ++t)
    for (int s = 0; s < n; ++s)
      out(static_cast<long>(t), s) = table.rows[t][static_cast<std::size_t>(1 + s)];
  return out;
}

double cost_gradient_lipschitz(double lambda_i, double p_w, double p_r) {
  if (!(lambda_i > 0.0) || p_w < 0.0 || p_r < p_w)
    throw DimensionMismatch("cost_gradient_lipschitz: bad constants");
  // Hessian of the cost in (x_i, z_i) is [[lambda, -1], [-1, q]] with
  // q = (p_r - p_w) sigma'(z - w) in [0, (p_r - p_w)/4]. The spectral norm
  // is convex in q, so the maximum sits at an endpoint.
  const auto block_norm = [lambda_i](double q) {
    const double half_trace = 0.5 * (lambda_i + q);
    const double radius =
        std::sqrt(0.25 * (lambda_i - q) * (lambda_i - q) + 1.0);
    return std::max(std::abs(half_trace + radius),
                    std::abs(half_trace - radius));
  };
  return std::max(block_norm(0.0), block_norm(0.25 * (p_r - p_w)));
}

double demand_lipschitz(const MarketParams& mkt) {
  // grad_z = -x_i + p_w s + p_r (1-s) with s in (0,1) and x_i in [p_w, p_r],
  // so |grad_z| <= p_r - p_w.
  return mkt.p_r - mkt.p_w;
}

double cost_lipschitz_bound(const MarketParams& mkt, double radius) {
  if (radius < 0.0)
    throw DimensionMismatch("cost_lipschitz_bound: radius >= 0");
  const double x_norm_max = std::sqrt(static_cast<double>(mkt.n)) * mkt.p_r;
  const double xi_max = mkt.base_demand.cwiseAbs().maxCoeff();
  // |dF_i/dx_j| <= |b_ij| p_r (response through z) + |b_ij| p_r (resale term)
  // + delta_ij (|E z| + lambda p_r); stacking rows gives the bound below.
  const double lambda_max = mkt.lambda.maxCoeff();
  return xi_max + radius * x_norm_max + lambda_max * mkt.p_r +
         2.0 * radius * mkt.p_r;
}

MonotonicityConstants certify(const MarketParams& mkt,
                              const Eigen::MatrixXd& b_model) {
  if (b_model.rows() != mkt.n || b_model.cols() != mkt.n)
    throw DimensionMismatch("certify: B must be n x n");
  MonotonicityConstants out;
  out.lambda = mkt.lambda.minCoeff();
  out.lipschitz_z.assign(static_cast<std::size_t>(mkt.n), 1.0);
  out.map_lipschitz.resize(static_cast<std::size_t>(mkt.n));
  std::vector<double> zetas(static_cast<std::size_t>(mkt.n));
  for (int i = 0; i < mkt.n; ++i) {
    const double row_norm = b_model.row(i).norm();
    out.map_lipschitz[static_cast<std::size_t>(i)] = row_norm * row_norm;
    zetas[static_cast<std::size_t>(i)] =
        cost_gradient_lipschitz(mkt.lambda[i], mkt.p_w, mkt.p_r);
  }
  out.kappa = compute_kappa(out.map_lipschitz, out.lipschitz_z, out.lambda);
  if (out.kappa < 0.5) out.alpha = compute_alpha(out.kappa, out.lambda);
  out.alpha_frobenius = alpha_frobenius(b_model, out.lambda);
  out.grad_lipschitz = compute_grad_lipschitz(
      zetas, b_model, PlayerLayout::uniform(mkt.n), {});
  return out;
}

GradientFeed make_expected_feed(const MarketParams& mkt,
                                const Eigen::MatrixXd& b_model) {
  return make_deterministic_feed(
      [mkt, b_model](const Eigen::VectorXd& x) {
        return expected_gradient(mkt, x, b_model);
      });
}

GradientFeed make_stochastic_feed(const MarketParams& mkt,
                                  const Eigen::MatrixXd& b_model, int batch,
                                  bool draw_from_truth) {
  if (batch < 1) throw DimensionMismatch("make_stochastic_feed: batch >= 1");
  const Eigen::MatrixXd b_response = draw_from_truth ? mkt.b : b_model;
  GradientFeed feed;
  feed.deterministic = false;
  feed.sample = [mkt, b_model, b_response, batch](const Eigen::VectorXd& x,
                                                  int, Rng& rng) {
    const long days = mkt.base_demand.rows();
    const Eigen::VectorXd shift = b_response * x;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(mkt.n);
    for (int s = 0; s < batch; ++s) {
      const auto day = static_cast<long>(
          rng.index(static_cast<std::size_t>(days)));
      for (int i = 0; i < mkt.n; ++i)
        acc[i] += player_gradient(mkt, i, x,
                                  mkt.base_demand(day, i) + shift[i], b_model);
    }
    return Eigen::VectorXd(acc / static_cast<double>(batch));
  };
  return feed;
}

}  // namespace ddgame
