#include <doctest.h>

#include <random>

#include "lbreg/error.hpp"
#include "lbreg/transport.hpp"
#include "oracles.hpp"

using namespace lbreg;

namespace {

Eigen::VectorXd random_points(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

Eigen::MatrixXd sq_dist_1d(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return squared_distances(x, y);
}

}  // namespace

TEST_CASE("TransportPlan construction") {
  const Eigen::Vector2d mu(0.5, 0.5);
  SUBCASE("duplicates are summed and entries sorted") {
    TransportPlan p({{1, 1, 0.25}, {0, 0, 0.5}, {1, 1, 0.25}}, mu, mu);
    REQUIRE(p.nonzeros() == 2);
    CHECK(p.entries()[0] == PlanEntry{0, 0, 0.5});
    CHECK(p.entries()[1] == PlanEntry{1, 1, 0.5});
  }
  SUBCASE("marginals are checked") {
    CHECK_THROWS_AS(TransportPlan({{0, 0, 0.5}, {1, 1, 0.4}}, mu, mu), DegenerateInput);
  }
  SUBCASE("negative mass rejected") {
    CHECK_THROWS_AS(TransportPlan({{0, 0, 0.6}, {0, 1, -0.1}, {1, 1, 0.5}}, mu, mu), DegenerateInput);
  }
  SUBCASE("indices are checked") {
    CHECK_THROWS_AS(TransportPlan({{0, 2, 0.5}, {1, 1, 0.5}}, mu, mu), DimensionMismatch);
  }
  SUBCASE("average of admissible plans is admissible") {
    std::mt19937_64 rng(1);
    const Eigen::VectorXd a = testing::random_weights(6, rng);
    const Eigen::VectorXd b = testing::random_weights(4, rng);
    std::vector<TransportPlan> plans;
    for (int k = 0; k < 5; ++k) {
      plans.push_back(ot_1d(random_points(6, rng), a, random_points(4, rng), b).plan);
    }
    const TransportPlan avg = TransportPlan::average(plans);
    CHECK(avg.marginal_error() <= 1e-10);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(6, 4);
    for (const auto& p : plans) dense += p.dense() / 5.0;
    CHECK((avg.dense() - dense).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("ot_1d worked example against the 2x2 LP") {
  const Eigen::Vector2d x(0, 1), mu(0.5, 0.5), y(0, 2), nu(0.25, 0.75);
  const auto r = ot_1d(x, mu, y, nu);
  Eigen::Matrix2d expect;
  expect << 0.25, 0.25, 0.0, 0.5;
  CHECK((r.plan.dense() - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(r.cost == doctest::Approx(1.5).epsilon(1e-15));

  const auto lp = testing::lp_2x2(sq_dist_1d(x, y), mu, nu);
  CHECK((lp.plan - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(lp.cost == doctest::Approx(r.cost));

  const Eigen::MatrixXd images = interpolated_image(r.plan, y);
  CHECK(images(0, 0) == doctest::Approx(1.0));
  CHECK(images(1, 0) == doctest::Approx(2.0));
}

TEST_CASE("ot_1d matches the 2x2 LP on random instances") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd x = random_points(2, rng), y = random_points(2, rng);
    const Eigen::VectorXd mu = testing::random_weights(2, rng), nu = testing::random_weights(2, rng);
    const auto r = ot_1d(x, mu, y, nu);
    const auto lp = testing::lp_2x2(sq_dist_1d(x, y), mu, nu);
    CHECK(std::abs(r.cost - lp.cost) <= 1e-12);
  }
}

TEST_CASE("ot_1d structure") {
  SUBCASE("uniform equal sizes give a permutation") {
    std::mt19937_64 rng(5);
    const int n = 9;
    const Eigen::VectorXd x = random_points(n, rng), y = random_points(n, rng);
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / n);
    const auto r = ot_1d(x, u, y, u);
    CHECK(r.plan.nonzeros() == static_cast<std::size_t>(n));
    for (const auto& e : r.plan.entries()) CHECK(e.mass == doctest::Approx(1.0 / n));
    CHECK(r.cost == doctest::Approx(testing::brute_assignment_cost(sq_dist_1d(x, y))).epsilon(1e-12));
  }
  SUBCASE("identical measures cost nothing") {
    std::mt19937_64 rng(6);
    const Eigen::VectorXd x = random_points(12, rng);
    const Eigen::VectorXd mu = testing::random_weights(12, rng);
    const auto r = ot_1d(x, mu, x, mu);
    CHECK(r.cost == 0.0);
    for (const auto& e : r.plan.entries()) CHECK(e.row == e.col);
  }
  SUBCASE("plans are sparse and monotone") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const int m = 1 + trial % 13, n = 1 + (trial * 7) % 11;
      const Eigen::VectorXd x = random_points(m, rng), y = random_points(n, rng);
      const auto r = ot_1d(x, testing::random_weights(m, rng), y, testing::random_weights(n, rng));
      CHECK(r.plan.nonzeros() <= static_cast<std::size_t>(m + n - 1));
      CHECK(r.plan.marginal_error() <= 1e-10);
      CHECK_FALSE(testing::has_crossing(r.plan.dense(), x, y));
      CHECK(is_monotone(r.plan, {x.data(), static_cast<std::size_t>(m)}, {y.data(), static_cast<std::size_t>(n)}));
    }
  }
  SUBCASE("common shift") {
    std::mt19937_64 rng(8);
    const Eigen::VectorXd x = random_points(7, rng), y = random_points(5, rng);
    const Eigen::VectorXd mu = testing::random_weights(7, rng), nu = testing::random_weights(5, rng);
    const double a = 3.25;  // dyadic: shifted sorts and prefix sums are unchanged
    const auto r0 = ot_1d(x, mu, y, nu);
    const auto r1 = ot_1d((x.array() + a).matrix(), mu, (y.array() + a).matrix(), nu);
    CHECK(r0.plan.entries() == r1.plan.entries());
    CHECK(r1.cost == doctest::Approx(r0.cost).epsilon(1e-12));
    // shifting only one side adds b^2 + 2 b (mean x - mean y)
    const double b = 0.5;
    const auto r2 = ot_1d((x.array() + b).matrix(), mu, y, nu);
    CHECK(r2.plan.entries() == r0.plan.entries());
    CHECK(r2.cost == doctest::Approx(r0.cost + b * b + 2.0 * b * (mu.dot(x) - nu.dot(y))).epsilon(1e-12));
  }
  SUBCASE("ties in the prefix sums") {
    const Eigen::Vector3d x(0, 1, 2), mu(0.25, 0.25, 0.5);
    const Eigen::Vector2d y(0, 1), nu(0.5, 0.5);
    const auto r = ot_1d(x, mu, y, nu);
    Eigen::MatrixXd expect(3, 2);
    expect << 0.25, 0, 0.25, 0, 0, 0.5;
    CHECK((r.plan.dense() - expect).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(r.plan.nonzeros() == 3);
  }
  SUBCASE("unnormalized weights") {
    const Eigen::Vector2d x(0, 1), bad(0.5, 0.6), ok(0.5, 0.5);
    CHECK_THROWS_AS(ot_1d(x, bad, x, ok), DegenerateInput);
    CHECK_THROWS_AS(ot_1d(x, ok, x, Eigen::Vector2d(1.0, 0.0)), DegenerateInput);
  }
}

TEST_CASE("ot_exact") {
  SUBCASE("1x1 is forced") {
    Eigen::MatrixXd c(1, 1);
    c << 2.5;
    const auto r = ot_exact(c, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1));
    CHECK(r.cost == 2.5);
    CHECK(r.plan.dense()(0, 0) == 1.0);
  }
  SUBCASE("zero diagonal yields the identity coupling") {
    std::mt19937_64 rng(2);
    const int n = 8;
    Eigen::MatrixXd c = (Eigen::MatrixXd::Random(n, n).array() + 2.0).matrix();
    c.diagonal().setZero();
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / n);
    const auto r = ot_exact(c, u, u);
    CHECK(r.cost == 0.0);
    CHECK((r.plan.dense() - Eigen::MatrixXd(u.asDiagonal())).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("agrees with brute-force assignment") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 2 + trial % 6;
      Eigen::MatrixXd c(n, n);
      for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = unif(rng);
      if (trial % 3 == 0) c = c.array().round();  // heavy degeneracy
      const Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / n);
      const auto r = ot_exact(c, u, u);
      CHECK(r.cost == doctest::Approx(testing::brute_assignment_cost(c)).epsilon(1e-12));
      CHECK(r.plan.nonzeros() <= static_cast<std::size_t>(2 * n - 1));
      CHECK(r.plan.marginal_error() <= 1e-12);
    }
  }
  SUBCASE("agrees with the 2x2 LP") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::Matrix2d c;
      c << unif(rng), unif(rng), unif(rng), unif(rng);
      const Eigen::VectorXd mu = testing::random_weights(2, rng), nu = testing::random_weights(2, rng);
      CHECK(std::abs(ot_exact(c, mu, nu).cost - testing::lp_2x2(c, mu, nu).cost) <= 1e-12);
    }
  }
  SUBCASE("agrees with ot_1d on the line") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 60; ++trial) {
      const int m = 1 + static_cast<int>(rng() % 20), n = 1 + static_cast<int>(rng() % 20);
      const Eigen::VectorXd x = random_points(m, rng), y = random_points(n, rng);
      const Eigen::VectorXd mu = testing::random_weights(m, rng), nu = testing::random_weights(n, rng);
      const auto a = ot_1d(x, mu, y, nu);
      const auto b = ot_exact(sq_dist_1d(x, y), mu, nu);
      CHECK(std::abs(a.cost - b.cost) <= 1e-10);
      CHECK(b.plan.nonzeros() <= static_cast<std::size_t>(m + n - 1));
    }
  }
  SUBCASE("guards") {
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(4, 0.25);
    ExactOptions small;
    small.size_limit = 15;
    CHECK_THROWS_AS(ot_exact(Eigen::MatrixXd::Zero(4, 4), u, u, small), SizeLimitExceeded);
    CHECK_THROWS_AS(ot_exact(Eigen::MatrixXd::Zero(4, 3), u, u), DimensionMismatch);
    CHECK_THROWS_AS(ot_exact(Eigen::MatrixXd::Zero(4, 4), u, Eigen::VectorXd::Constant(4, 0.3)), DegenerateInput);
  }
}

TEST_CASE("plan_to_map and interpolated_image") {
  std::mt19937_64 rng(3);
  const Eigen::VectorXd mu = testing::random_weights(5, rng);
  SUBCASE("diagonal plan") {
    const auto corr = plan_to_map(TransportPlan::diagonal(mu));
    CHECK(Eigen::MatrixXd(corr.matrix()).isIdentity(1e-15));
    CHECK(corr.assignment() == std::vector<int>{0, 1, 2, 3, 4});
    const Eigen::MatrixXd t = Eigen::MatrixXd::Random(5, 3);
    CHECK((interpolated_image(TransportPlan::diagonal(mu), t) - t).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("product plan") {
    const Eigen::VectorXd nu = testing::random_weights(4, rng);
    const auto plan = TransportPlan::product(mu, nu);
    const Eigen::MatrixXd pi(plan_to_map(plan).matrix());
    for (Eigen::Index i = 0; i < 5; ++i) {
      CHECK((pi.row(i).transpose() - nu).cwiseAbs().maxCoeff() < 1e-15);
      CHECK(pi.row(i).sum() == doctest::Approx(1.0).epsilon(1e-14));
    }
    const Eigen::MatrixXd t = Eigen::MatrixXd::Random(4, 2);
    const Eigen::RowVectorXd bary = nu.transpose() * t;
    const Eigen::MatrixXd img = interpolated_image(plan, t);
    for (Eigen::Index i = 0; i < 5; ++i) CHECK((img.row(i) - bary).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(interpolated_image(plan, Eigen::MatrixXd::Zero(3, 2)), DimensionMismatch);
  }
  SUBCASE("rows of Pi are conditional probabilities") {
    const Eigen::VectorXd nu = testing::random_weights(7, rng);
    const auto r = ot_1d(random_points(5, rng), mu, random_points(7, rng), nu);
    const Eigen::MatrixXd pi(plan_to_map(r.plan).matrix());
    CHECK((pi.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-10);
    CHECK(pi.minCoeff() >= 0.0);
  }
}
