#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Geometry>

#include "lbreg/eigenmap.hpp"
#include "lbreg/error.hpp"
#include "oracles.hpp"

using namespace lbreg;

namespace {

// max over columns of min(|a - b|, |a + b|)
double signless_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const double plus = (a.col(k) - b.col(k)).cwiseAbs().maxCoeff();
    const double minus = (a.col(k) + b.col(k)).cwiseAbs().maxCoeff();
    worst = std::max(worst, std::min(plus, minus));
  }
  return worst;
}

}  // namespace

TEST_CASE("embed arithmetic") {
  Eigen::MatrixXd pts(3, 1);
  pts << 0, 1, 2;
  const PointCloud shape(pts, {});
  LBSpectrum sp;
  sp.eigenvalues = Eigen::Vector2d(4.0, 9.0);
  sp.eigenfunctions = Eigen::MatrixXd::Constant(3, 2, 2.0);
  const Embedding e = embed(sp, shape, 2);
  CHECK(e.coords(0, 0) == 1.0);
  CHECK(e.coords(1, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(e.measure == shape.measure());

  sp.intrinsic_dim = 4;  // exponent d/4 = 1
  CHECK(embed(sp, shape, 1).coords(0, 0) == 0.5);

  SUBCASE("errors") {
    CHECK_THROWS_AS(embed(sp, shape, 3), DimensionMismatch);
    Eigen::MatrixXd two(2, 1);
    two << 0, 1;
    CHECK_THROWS_AS(embed(sp, PointCloud(two, {}), 1), DimensionMismatch);
    sp.eigenvalues[0] = 0.0;
    CHECK_THROWS_AS(embed(sp, shape, 1), DegenerateInput);
  }
}

TEST_CASE("nestedness") {
  const auto& fx = testing::bumpy_fixture();
  const Embedding five = embed(fx.spectrum, fx.shape, 5);
  const Embedding three = embed(fx.spectrum, fx.shape, 3);
  CHECK(five.truncated(3).coords == three.coords);

  const auto levels = multiscale_embed(fx.spectrum, fx.shape, {3, 5, 10});
  REQUIRE(levels.size() == 3);
  CHECK(levels[0].coords == three.coords);
  CHECK(levels[2].truncated(3).coords == levels[0].coords);
  CHECK(levels[1].measure == levels[2].measure);

  const auto single = multiscale_embed(fx.spectrum, fx.shape, {3});
  REQUIRE(single.size() == 1);
  CHECK(single[0].coords == three.coords);
}

TEST_CASE("multiscale schedule validation") {
  const auto& fx = testing::bumpy_fixture();
  CHECK_THROWS_AS(multiscale_embed(fx.spectrum, fx.shape, {3, 3}), DegenerateInput);
  CHECK_THROWS_AS(multiscale_embed(fx.spectrum, fx.shape, {5, 3}), DegenerateInput);
  CHECK_THROWS_AS(multiscale_embed(fx.spectrum, fx.shape, {0, 3}), DegenerateInput);
  CHECK_THROWS_AS(multiscale_embed(fx.spectrum, fx.shape, {}), DegenerateInput);
  CHECK_THROWS_AS(multiscale_embed(fx.spectrum, fx.shape, {3, 50}), DimensionMismatch);

  // the published ladder needs 200 pairs
  Eigen::MatrixXd pts(210, 1);
  for (int i = 0; i < 210; ++i) pts(i, 0) = i;
  const PointCloud line(pts, {});
  LBSpectrum big;
  big.eigenvalues = Eigen::VectorXd::LinSpaced(200, 1.0, 200.0);
  big.eigenfunctions = Eigen::MatrixXd::Identity(210, 200);
  const auto ladder = multiscale_embed(big, line, kPaperSchedule);
  REQUIRE(ladder.size() == 10);
  CHECK(ladder.back().dim() == 200);
}

TEST_CASE("scale invariance of the eigenmap") {
  const auto& fx = testing::bumpy_fixture();
  const PointCloud big = fx.shape.with_points(2.0 * fx.shape.points());
  const Embedding a = embed(fx.spectrum, fx.shape, 8);
  const Embedding b = embed(solve_spectrum(assemble_cotan(big), 8), big, 8);
  CHECK(signless_gap(a.coords, b.coords) <= 1e-5);
}

TEST_CASE("rigid motions change the eigenmap by column signs at most") {
  const auto& fx = testing::bumpy_fixture();
  std::mt19937_64 rng(3);
  Eigen::Matrix3d rot = testing::random_orthogonal(3, rng);
  const Eigen::RowVector3d shift(0.3, -1.2, 4.0);
  const Eigen::MatrixXd moved = (fx.shape.points() * rot).rowwise() + shift;
  const PointCloud m2 = fx.shape.with_points(moved);
  const Embedding a = embed(fx.spectrum, fx.shape, 8);
  const Embedding b = embed(solve_spectrum(assemble_cotan(m2), 8), m2, 8);
  CHECK(signless_gap(a.coords, b.coords) <= 1e-6);
}
