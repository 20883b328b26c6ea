#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <vector>

#include "ddgame/errors.hpp"
#include "ddgame/learn.hpp"
#include "ddgame/location_scale.hpp"
#include "ddgame/rng.hpp"

using namespace ddgame;

namespace {

// Noiseless dataset z = B x with uniformly sampled decisions.
Dataset linear_dataset(const Eigen::MatrixXd& b, long m, Rng& rng,
                       double noise = 0.0) {
  const int d = static_cast<int>(b.cols());
  const int k = static_cast<int>(b.rows());
  Eigen::MatrixXd x(m, d), z(m, k);
  for (long j = 0; j < m; ++j) {
    for (int c = 0; c < d; ++c) x(j, c) = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd zz = b * x.row(j).transpose();
    for (int c = 0; c < k; ++c) z(j, c) = zz[c] + noise * rng.normal();
  }
  return Dataset(std::move(x), std::move(z));
}

}  // namespace

TEST_CASE("scalar least squares matches the closed-form ratio") {
  // x = (1,2,3), z = (2.1,4,6): B = sum(zx)/sum(x^2) = 28.1/14.
  Eigen::MatrixXd x(3, 1), z(3, 1);
  x << 1.0, 2.0, 3.0;
  z << 2.1, 4.0, 6.0;
  const auto fit = fit_least_squares(Dataset(x, z));
  CHECK(fit.b_hat(0, 0) == doctest::Approx(28.1 / 14.0).epsilon(1e-14));
  CHECK_FALSE(fit.radius.has_value());
}

TEST_CASE("noiseless data is recovered exactly") {
  Rng rng(41);
  Eigen::MatrixXd b(2, 3);
  b << 0.5, -0.2, 0.1, 0.0, 0.3, -0.4;
  const Dataset data = linear_dataset(b, 6, rng);
  const auto fit = fit_least_squares(data);
  CHECK((fit.b_hat - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("underdetermined or rank-deficient designs are refused") {
  Rng rng(43);
  Eigen::MatrixXd b(1, 3);
  b << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(fit_least_squares(linear_dataset(b, 2, rng)), SingularGram);

  // All decisions identical: Gram is rank one.
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(10, 2);
  Eigen::MatrixXd z = Eigen::MatrixXd::Ones(10, 1);
  CHECK_THROWS_AS(fit_least_squares(Dataset(x, z)), SingularGram);
}

TEST_CASE("ridge option rescues a barely singular design") {
  Eigen::MatrixXd x(3, 2), z(3, 1);
  x << 1.0, 1.0, 2.0, 2.0, 3.0, 3.0;  // perfectly collinear columns
  z << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(fit_least_squares(Dataset(x, z)), SingularGram);
  LeastSquaresOptions opts;
  opts.ridge = true;
  const auto fit = fit_least_squares(Dataset(x, z), opts);
  // The regularized solution still reproduces the responses.
  CHECK((x * fit.b_hat.transpose() - z).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("radius option clips onto the hypothesis ball") {
  Rng rng(47);
  Eigen::MatrixXd b(1, 2);
  b << 3.0, 4.0;  // Frobenius norm 5
  const Dataset data = linear_dataset(b, 40, rng);
  LeastSquaresOptions opts;
  opts.radius = 1.0;
  const auto fit = fit_least_squares(data, opts);
  CHECK(fit.b_hat.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // Clipping preserves direction.
  CHECK(fit.b_hat(0, 0) / fit.b_hat(0, 1) ==
        doctest::Approx(3.0 / 4.0).epsilon(1e-10));
  REQUIRE(fit.radius.has_value());
  CHECK(*fit.radius == 1.0);
}

TEST_CASE("projected descent agrees with the unconstrained fit inside a big ball") {
  Rng rng(53);
  Eigen::MatrixXd b(2, 2);
  b << 0.4, -0.1, 0.2, 0.3;
  const Dataset data = linear_dataset(b, 100, rng, 0.05);
  const auto ls = fit_least_squares(data);
  const auto pg = fit_erm_projected(data, 10.0, 20000);
  CHECK((pg.b_hat - ls.b_hat).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("projected descent never leaves the ball") {
  Rng rng(59);
  Eigen::MatrixXd b(1, 2);
  b << 2.0, -2.0;
  const Dataset data = linear_dataset(b, 60, rng, 0.1);
  const auto pg = fit_erm_projected(data, 0.5, 3000);
  CHECK(pg.b_hat.norm() <= 0.5 + 1e-12);
  // On the boundary: the unconstrained optimum has norm sqrt(8) > 0.5.
  CHECK(pg.b_hat.norm() == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("risk gradient matches a finite difference") {
  Rng rng(61);
  Eigen::MatrixXd b(2, 3);
  b << 0.1, 0.2, -0.3, 0.4, -0.5, 0.6;
  const Dataset data = linear_dataset(b, 30, rng, 0.2);
  Eigen::MatrixXd probe(2, 3);
  probe << 0.3, -0.2, 0.0, 0.1, 0.2, -0.1;
  const Eigen::MatrixXd grad = empirical_risk_gradient(data, probe);
  const double h = 1e-6;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) {
      Eigen::MatrixXd up = probe, dn = probe;
      up(r, c) += h;
      dn(r, c) -= h;
      const double fd =
          (empirical_risk(data, up) - empirical_risk(data, dn)) / (2.0 * h);
      CHECK(grad(r, c) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("sample-size gate accepts and rejects as documented") {
  // 100/log(100) = 21.7 >= 2(1 + log 4) = 4.77.
  CHECK(check_sample_size(100, 1, 0.25));
  // 10/log(10) = 4.34 < 2(100 + log 10) = 204.6.
  CHECK_FALSE(check_sample_size(10, 100, 0.1));
  CHECK_THROWS_AS(check_sample_size(1, 1, 0.1), PreconditionFailed);
  CHECK_THROWS_AS(check_sample_size(100, 1, 0.5), PreconditionFailed);
  CHECK_THROWS_AS(check_sample_size(100, 0, 0.1), PreconditionFailed);
}

TEST_CASE("zeta has the closed form sqrt(log(m)(ell + log(1/delta))/m)") {
  // m = e^2, delta = e^-1, ell = 1: sqrt(2 * (1+1) / e^2) = 2/e.
  const double m = std::exp(2.0);
  CHECK(zeta(m, std::exp(-1.0), 1.0) ==
        doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-14));
  // Decreasing in m for large m.
  CHECK(zeta(1e5, 0.1, 4.0) < zeta(1e4, 0.1, 4.0));
  CHECK_THROWS_AS(zeta(100.0, 1.5, 4.0), PreconditionFailed);
  CHECK_THROWS_AS(zeta(1.0, 0.1, 4.0), PreconditionFailed);
}

TEST_CASE("constant factor picks the larger of the two regimes") {
  // mu=1, L_beta=15, r=1, theta=0.5: max{15/15, 0.5} = 1 -> C' = 4.
  CHECK(c_prime(1.0, 15.0, 0.5, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
  // theta dominates: max{1, 2} = 2 -> C' = 8.
  CHECK(c_prime(1.0, 15.0, 2.0, 1.0) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK_THROWS_AS(c_prime(0.0, 15.0, 0.5, 1.0), PreconditionFailed);
  CHECK_THROWS_AS(c_prime(1.0, -1.0, 0.5, 1.0), PreconditionFailed);
  CHECK_THROWS_AS(c_prime(1.0, 15.0, 0.5, 0.0), PreconditionFailed);
}

TEST_CASE("coefficient error bound is the product of its two factors") {
  const long m = 1000;
  const double delta = 0.1;
  const int ell = 4;
  const double want = c_prime(1.0, 15.0, 0.5, 1.0) *
                      zeta(static_cast<double>(m), delta, ell);
  CHECK(erm_error_bound(m, delta, ell, 1.0, 15.0, 0.5, 1.0) ==
        doctest::Approx(want).epsilon(1e-14));
  // The gate guards the bound.
  CHECK_THROWS_AS(erm_error_bound(10, 0.1, 100, 1.0, 15.0, 0.5, 1.0),
                  PreconditionFailed);
}

TEST_CASE("bound report composes the error chain") {
  const auto rep = make_bound_report(1000, 0.1, 4, 1.0, 15.0, 0.5, 1.0,
                                     0.01, 2.0, 0.5, 3.0, 1.5);
  CHECK(rep.erm_bound ==
        doctest::Approx(rep.c_prime_value * rep.zeta_value).epsilon(1e-14));
  const double stat = rep.l_z * rep.epsilon * rep.erm_bound;
  CHECK(rep.approx_bound ==
        doctest::Approx(rep.eta * rep.l_z + stat).epsilon(1e-14));
  CHECK(rep.excess_risk_bound ==
        doctest::Approx(2.0 * rep.eta * rep.l_z + 2.0 * stat +
                        2.0 * std::sqrt(2.0) * rep.l_bar * rep.diam_x)
            .epsilon(1e-14));
  // Perfect specification and zero sensitivity close the chain at zero.
  const auto clean = make_bound_report(1000, 0.1, 4, 1.0, 15.0, 0.5, 1.0,
                                       0.0, 0.0, 0.5, 0.0, 0.0);
  CHECK(clean.approx_bound == 0.0);
  CHECK(clean.excess_risk_bound == 0.0);
}

TEST_CASE("bound report serializes every constant") {
  const auto rep = make_bound_report(1000, 0.1, 4, 1.0, 15.0, 0.5, 1.0,
                                     0.01, 2.0, 0.5, 3.0, 1.5);
  const std::string s = rep.serialize();
  for (const char* key :
       {"m=1000", "ell=4", "zeta=", "c_prime=", "erm_bound=", "approx_bound=",
        "excess_risk_bound=", "theta=", "radius=", "eta=", "l_bar=",
        "diam_x="}) {
    CHECK(s.find(key) != std::string::npos);
  }
}

TEST_CASE("subexponential modulus matches hand computations") {
  // One sample {1}: survival at t=1 is 1, so theta = 1/log(2).
  CHECK(subexponential_modulus({1.0}) ==
        doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-14));
  // Scale equivariance: modulus(c v) = c modulus(v).
  const std::vector<double> v = {0.5, -1.0, 2.0, 3.0};
  std::vector<double> v3;
  for (double x : v) v3.push_back(3.0 * x);
  CHECK(subexponential_modulus(v3) ==
        doctest::Approx(3.0 * subexponential_modulus(v)).epsilon(1e-12));
  CHECK(subexponential_modulus({0.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(subexponential_modulus({}), DimensionMismatch);
}

TEST_CASE("theta calibration is positive and seed-deterministic") {
  LocationScaleMap truth;
  truth.b = Eigen::MatrixXd::Constant(2, 2, 0.1);
  GaussianBase base;
  base.mean = Eigen::VectorXd::Zero(2);
  base.stddev = Eigen::VectorXd::Constant(2, 1.0);
  truth.base = base;
  UniformBoxSampler sampler{BoxSet::cube(2, -1.0, 1.0)};
  Rng a(71), b2(71);
  const double t1 =
      calibrate_theta(truth, sampler, truth.b, 0.5, 400, 8, a);
  const double t2 =
      calibrate_theta(truth, sampler, truth.b, 0.5, 400, 8, b2);
  CHECK(t1 > 0.0);
  CHECK(t1 == t2);
  Rng c(71);
  CHECK_THROWS_AS(calibrate_theta(truth, sampler, truth.b, 0.5, 5, 8, c),
                  DimensionMismatch);
}

TEST_CASE("uniform box second moment has the analytic form") {
  // Cube [-1,1]^2: mean 0, per-coordinate variance (2^2)/12 = 1/3.
  const Eigen::MatrixXd m2 = uniform_box_second_moment(BoxSet::cube(2, -1.0, 1.0));
  CHECK((m2 - Eigen::MatrixXd::Identity(2, 2) / 3.0).cwiseAbs().maxCoeff() <
        1e-15);
  // Interval [0,2]: mean 1, var 1/3, second moment 4/3.
  const Eigen::MatrixXd m1 = uniform_box_second_moment(BoxSet::cube(1, 0.0, 2.0));
  CHECK(m1(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("max squared norm over a box sits at a corner") {
  Eigen::VectorXd lo(2), hi(2);
  lo << -2.0, -1.0;
  hi << 1.0, 3.0;
  CHECK(box_max_sq_norm(BoxSet(lo, hi)) == doctest::Approx(13.0).epsilon(1e-15));
  CHECK(box_max_sq_norm(BoxSet::cube(3, 0.0, 0.5)) ==
        doctest::Approx(0.75).epsilon(1e-15));
}
