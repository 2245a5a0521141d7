#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "lbreg/container.hpp"
#include "lbreg/error.hpp"
#include "oracles.hpp"

using namespace lbreg;

TEST_CASE("container round trips") {
  Container c;
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 6.5;
  Int64Matrix idx(2, 2);
  idx << 1, -2, 3, 1LL << 40;
  c.put("m", m);
  c.put("idx", idx);
  c.set_attribute("kind", "test");

  const Container back = Container::from_bytes(c.bytes());
  CHECK(back.f64("m") == m);
  CHECK(back.i64("idx") == idx);
  CHECK(back.attribute("kind") == "test");
  CHECK_FALSE(back.attribute("missing").has_value());
  CHECK(back.bytes() == c.bytes());
  CHECK_THROWS_AS(back.f64("idx"), ParseError);
}

TEST_CASE("container rejects malformed input") {
  Container c;
  c.put("m", Eigen::MatrixXd(Eigen::MatrixXd::Ones(4, 4)));
  auto bytes = c.bytes();

  std::vector<std::uint8_t> junk(bytes);
  junk[0] = 'X';
  CHECK_THROWS_AS(Container::from_bytes(junk), ParseError);

  std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 8);
  CHECK_THROWS_AS(Container::from_bytes(cut), ParseError);

  std::vector<std::uint8_t> tiny(bytes.begin(), bytes.begin() + 10);
  CHECK_THROWS_AS(Container::from_bytes(tiny), ParseError);

  CHECK_THROWS_AS(Container::read("/nonexistent/dir/x.bin"), IoError);
}

TEST_CASE("spectrum, embedding and plan containers") {
  const auto& fx = testing::bumpy_fixture();
  const auto dir = std::filesystem::temp_directory_path() / "lbreg_unit_container";
  std::filesystem::create_directories(dir);

  SUBCASE("spectrum") {
    to_container(fx.spectrum).write(dir / "s.bin");
    const LBSpectrum s = spectrum_from(Container::read(dir / "s.bin"));
    CHECK(s.eigenvalues == fx.spectrum.eigenvalues);
    CHECK(s.eigenfunctions == fx.spectrum.eigenfunctions);
    CHECK(s.intrinsic_dim == 2);
    CHECK(s.method == LaplaceMethod::CotanFem);
    CHECK_THROWS_AS(embedding_from(Container::read(dir / "s.bin")), ParseError);
  }
  SUBCASE("embedding") {
    const Embedding e = embed(fx.spectrum, fx.shape, 6);
    const Embedding back = embedding_from(Container::from_bytes(to_container(e).bytes()));
    CHECK(back.coords == e.coords);
    CHECK(back.measure == e.measure);
    CHECK(back.source_name == e.source_name);
  }
  SUBCASE("plan") {
    std::mt19937_64 rng(3);
    const Eigen::VectorXd mu = testing::random_weights(9, rng), nu = testing::random_weights(6, rng);
    const auto plan = ot_1d(Eigen::VectorXd::LinSpaced(9, 0, 1), mu, Eigen::VectorXd::LinSpaced(6, 1, 0), nu).plan;
    const TransportPlan back = plan_from(Container::from_bytes(to_container(plan).bytes()));
    CHECK(back.entries() == plan.entries());
    CHECK(back.row_marginal() == mu);
    CHECK(back.col_marginal() == nu);
  }
}
