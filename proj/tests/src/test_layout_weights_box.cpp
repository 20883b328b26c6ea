#include <doctest.h>

#include <Eigen/Core>
#include <vector>

#include "ddgame/box.hpp"
#include "ddgame/errors.hpp"
#include "ddgame/layout.hpp"
#include "ddgame/rng.hpp"
#include "ddgame/weights.hpp"

using namespace ddgame;

TEST_CASE("layout from_dims assigns contiguous coordinate ranges") {
  const auto layout = PlayerLayout::from_dims({2, 1, 3});
  CHECK(layout.n == 3);
  CHECK(layout.total_dim == 6);
  CHECK(layout.offsets == std::vector<int>{0, 2, 3});
  CHECK(layout.player_of(0) == 0);
  CHECK(layout.player_of(1) == 0);
  CHECK(layout.player_of(2) == 1);
  CHECK(layout.player_of(3) == 2);
  CHECK(layout.player_of(5) == 2);
}

TEST_CASE("layout rejects empty and non-positive dims") {
  CHECK_THROWS_AS(PlayerLayout::from_dims({}), DimensionMismatch);
  CHECK_THROWS_AS(PlayerLayout::from_dims({1, 0}), DimensionMismatch);
  CHECK_THROWS_AS(PlayerLayout::uniform(0), DimensionMismatch);
}

TEST_CASE("uniform layout is n scalar players by default") {
  const auto layout = PlayerLayout::uniform(4);
  CHECK(layout.total_dim == 4);
  CHECK(layout.dims == std::vector<int>{1, 1, 1, 1});
}

TEST_CASE("weights validate positivity and expose extremes") {
  CHECK_THROWS_AS(StepWeights({1.0, 0.0}), DimensionMismatch);
  CHECK_THROWS_AS(StepWeights({-2.0}), DimensionMismatch);
  CHECK_THROWS_AS(StepWeights(std::vector<double>{}), DimensionMismatch);
  const StepWeights w({3.0, 1.5, 2.0});
  CHECK(w.omega_max() == 3.0);
  CHECK(w.omega_min() == 1.5);
  CHECK(w.n() == 3);
}

TEST_CASE("weights expand per coordinate under a layout") {
  const auto layout = PlayerLayout::from_dims({2, 1});
  const StepWeights w({5.0, 7.0});
  const Eigen::VectorXd diag = w.expand(layout);
  REQUIRE(diag.size() == 3);
  CHECK(diag[0] == 5.0);
  CHECK(diag[1] == 5.0);
  CHECK(diag[2] == 7.0);
  CHECK_THROWS_AS(w.expand(PlayerLayout::uniform(3)), DimensionMismatch);
}

TEST_CASE("box cube and membership") {
  const auto box = BoxSet::cube(3, -1.0, 2.0);
  CHECK(box.dim() == 3);
  Eigen::VectorXd inside(3);
  inside << 0.0, -1.0, 2.0;
  CHECK(box.contains(inside));
  Eigen::VectorXd outside(3);
  outside << 0.0, -1.0001, 0.0;
  CHECK_FALSE(box.contains(outside));
  CHECK(box.contains(outside, 1e-3));
  CHECK(box.diameter() == doctest::Approx(3.0 * std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("box rejects inverted or mismatched bounds") {
  Eigen::VectorXd lo(2), hi(2);
  lo << 0.0, 1.0;
  hi << 1.0, 0.5;
  CHECK_THROWS_AS(BoxSet(lo, hi), DimensionMismatch);
  Eigen::VectorXd hi3(3);
  hi3 << 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(BoxSet(lo, hi3), DimensionMismatch);
}

TEST_CASE("projection clamps, is idempotent, and lands inside") {
  const auto box = BoxSet::cube(4, 0.0, 1.0);
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x(4);
    for (int i = 0; i < 4; ++i) x[i] = rng.uniform(-3.0, 3.0);
    const Eigen::VectorXd p = project_box(x, box);
    CHECK(box.contains(p));
    CHECK((project_box(p, box) - p).norm() == 0.0);
    for (int i = 0; i < 4; ++i)
      CHECK(p[i] == std::min(1.0, std::max(0.0, x[i])));
  }
}

TEST_CASE("projection is non-expansive") {
  const auto box = BoxSet::cube(5, -1.0, 1.0);
  Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x(5), y(5);
    for (int i = 0; i < 5; ++i) {
      x[i] = rng.uniform(-4.0, 4.0);
      y[i] = rng.uniform(-4.0, 4.0);
    }
    const double before = (x - y).norm();
    const double after = (project_box(x, box) - project_box(y, box)).norm();
    CHECK(after <= before + 1e-15);
  }
}

TEST_CASE("weighted projection equals the plain clamp for diagonal metrics") {
  const auto box = BoxSet::cube(3, 0.0, 2.0);
  const auto layout = PlayerLayout::uniform(3);
  const StepWeights w({1.0, 10.0, 0.1});
  Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd x(3);
    for (int i = 0; i < 3; ++i) x[i] = rng.uniform(-5.0, 5.0);
    const Eigen::VectorXd a = project_weighted(x, box, w, layout);
    const Eigen::VectorXd b = project_box(x, box);
    CHECK((a - b).norm() == 0.0);
  }
}

TEST_CASE("weighted projection enforces the layout contract") {
  const auto box = BoxSet::cube(3, 0.0, 1.0);
  const StepWeights w({1.0, 1.0});
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(project_weighted(x, box, w, PlayerLayout::uniform(3)),
                  DimensionMismatch);
}
