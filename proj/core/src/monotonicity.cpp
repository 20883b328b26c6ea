#include "ddgame/monotonicity.hpp"

#include <cmath>

#include "ddgame/rng.hpp"

namespace ddgame {

double MonotonicityConstants::conservative_alpha() const {
  if (alpha && alpha_frobenius) return std::min(*alpha, *alpha_frobenius);
  if (alpha) return *alpha;
  if (alpha_frobenius) return *alpha_frobenius;
  throw KappaTooLarge(
      "conservative_alpha: neither certificate variant applies");
}

namespace {

double power_iteration(const Eigen::MatrixXd& m, std::uint64_t seed) {
  constexpr double kTol = 1e-10;
  constexpr int kMaxIter = 10000;
  const Eigen::Index n = m.cols();
  Rng rng(seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index j = 0; j < n; ++j) v[j] = rng.uniform(-1.0, 1.0);
  double vnorm = v.norm();
  if (vnorm == 0.0) return 0.0;
  v /= vnorm;
  double sigma = 0.0;
  for (int it = 0; it < kMaxIter; ++it) {
    Eigen::VectorXd u = m * v;
    Eigen::VectorXd w = m.transpose() * u;
    const double wnorm = w.norm();
    if (wnorm == 0.0) return 0.0;
    const double next = std::sqrt(u.squaredNorm());
    v = w / wnorm;
    if (std::abs(next - sigma) <= kTol * std::max(1.0, next)) return next;
    sigma = next;
  }
  return sigma;
}

}  // namespace

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  // Deterministic restarts guard against a start vector orthogonal to the
  // dominant singular direction; the max over runs is the estimate.
  double best = 0.0;
  for (std::uint64_t seed : {0x5eedULL, 0xb0b1ULL}) {
    best = std::max(best, power_iteration(m, seed));
  }
  return best;
}

double compute_kappa(const std::vector<double>& map_lipschitz,
                     const std::vector<double>& lipschitz_z, double lambda) {
  if (!(lambda > 0.0))
    throw DimensionMismatch("compute_kappa: lambda must be positive");
  if (map_lipschitz.size() != lipschitz_z.size())
    throw DimensionMismatch("compute_kappa: constant lists differ in length");
  if (map_lipschitz.empty())
    throw DimensionMismatch("compute_kappa: empty constant lists");
  double acc = 0.0;
  for (std::size_t i = 0; i < map_lipschitz.size(); ++i) {
    if (map_lipschitz[i] < 0.0 || lipschitz_z[i] < 0.0)
      throw DimensionMismatch("compute_kappa: constants must be nonnegative");
    const double term = map_lipschitz[i] * lipschitz_z[i] / lambda;
    acc += term * term;
  }
  return std::sqrt(acc);
}

double compute_alpha(double kappa, double lambda) {
  if (!(lambda > 0.0))
    throw DimensionMismatch("compute_alpha: lambda must be positive");
  if (kappa < 0.0)
    throw DimensionMismatch("compute_alpha: kappa must be nonnegative");
  if (kappa >= 0.5)
    throw KappaTooLarge("compute_alpha: kappa >= 1/2, game not certified");
  return (1.0 - 2.0 * kappa) * lambda;
}

std::optional<double> alpha_frobenius(const Eigen::MatrixXd& b,
                                      double lambda) {
  if (!(lambda > 0.0))
    throw DimensionMismatch("alpha_frobenius: lambda must be positive");
  const double fnorm = b.norm();
  if (fnorm >= 0.5) return std::nullopt;
  return (1.0 - 2.0 * fnorm) * lambda;
}

double compute_grad_lipschitz(const std::vector<double>& zetas,
                              const Eigen::MatrixXd& b,
                              const PlayerLayout& layout,
                              const std::vector<int>& response_dims) {
  std::vector<int> kdims = response_dims;
  if (kdims.empty()) kdims.assign(static_cast<std::size_t>(layout.n), 1);
  if (static_cast<int>(zetas.size()) != layout.n ||
      static_cast<int>(kdims.size()) != layout.n)
    throw DimensionMismatch("compute_grad_lipschitz: per-player list lengths");
  int total_rows = 0;
  for (int k : kdims) {
    if (k <= 0)
      throw DimensionMismatch("compute_grad_lipschitz: response dims > 0");
    total_rows += k;
  }
  if (b.rows() != total_rows || b.cols() != layout.total_dim)
    throw DimensionMismatch("compute_grad_lipschitz: B shape mismatch");

  double acc = 0.0;
  int row = 0;
  for (int i = 0; i < layout.n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    if (zetas[iu] < 0.0)
      throw DimensionMismatch("compute_grad_lipschitz: zeta must be >= 0");
    const Eigen::MatrixXd block_i = b.middleRows(row, kdims[iu]);
    const Eigen::MatrixXd own =
        block_i.middleCols(layout.offsets[iu], layout.dims[iu]);
    const double sn_own = spectral_norm(own);
    const double sn_row = spectral_norm(block_i);
    acc += zetas[iu] * zetas[iu] * std::max(1.0, sn_own * sn_own) *
           (1.0 + sn_row * sn_row);
    row += kdims[iu];
  }
  return std::sqrt(acc);
}

}  // namespace ddgame
