#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "ddgame/errors.hpp"
#include "ddgame/layout.hpp"

namespace ddgame {

// Certificate constants for a decision-dependent game:
//   lambda        modulus of strong monotonicity of the fixed-distribution map
//   lipschitz_z   per-player Lipschitz constants of z_i -> grad_i f_i
//   map_lipschitz per-player sensitivity gamma_i of the distributional map
//   kappa         sqrt(sum_i (gamma_i L_i / lambda)^2)
//   alpha         (1 - 2 kappa) lambda, defined only when kappa < 1/2
//   alpha_frobenius  (1 - 2 ||B||_F) lambda, the row-norm variant; defined
//                    only when ||B||_F < 1/2
//   grad_lipschitz   Lipschitz constant of the stacked gradient map
struct MonotonicityConstants {
  double lambda = 0.0;
  std::vector<double> lipschitz_z;
  std::vector<double> map_lipschitz;
  double kappa = 0.0;
  std::optional<double> alpha;
  std::optional<double> alpha_frobenius;
  double grad_lipschitz = 0.0;

  // The smaller of the two certified moduli; throws KappaTooLarge when
  // neither variant certifies the game.
  double conservative_alpha() const;
};

// Largest singular value via power iteration on M'M, tolerance 1e-10,
// at most 1e4 iterations, deterministic start.
double spectral_norm(const Eigen::MatrixXd& m);

// kappa = sqrt(sum_i (gamma_i L_i / lambda)^2). Requires lambda > 0 and
// nonnegative entries.
double compute_kappa(const std::vector<double>& map_lipschitz,
                     const std::vector<double>& lipschitz_z, double lambda);

// alpha = (1 - 2 kappa) lambda. Throws KappaTooLarge when kappa >= 1/2.
double compute_alpha(double kappa, double lambda);

// alpha = (1 - 2 ||B||_F) lambda; empty when ||B||_F >= 1/2.
std::optional<double> alpha_frobenius(const Eigen::MatrixXd& b, double lambda);

// L = sqrt(sum_i zeta_i^2 max{1, ||B_i^i||^2} (1 + ||B_i||^2)), spectral
// norms throughout. B stacks one k_i x d row block per player;
// response_dims gives the k_i (defaults to one row per player).
double compute_grad_lipschitz(const std::vector<double>& zetas,
                              const Eigen::MatrixXd& b,
                              const PlayerLayout& layout,
                              const std::vector<int>& response_dims = {});

}  // namespace ddgame
