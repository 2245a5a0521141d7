#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "lbreg/error.hpp"
#include "lbreg/geometry.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace lbreg;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lbreg_unit_geometry";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

PointCloud regular_tetrahedron() {
  Eigen::MatrixXd v(4, 3);
  const double s = 1.0 / std::sqrt(8.0);  // unit edges
  v << s, s, s, s, -s, -s, -s, s, -s, -s, -s, s;
  return PointCloud(v, {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}});
}

int euler_characteristic(const PointCloud& m) {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : m.triangles()) {
    for (int k = 0; k < 3; ++k) edges.insert(std::minmax(t[k], t[(k + 1) % 3]));
  }
  return static_cast<int>(m.size()) - static_cast<int>(edges.size()) + static_cast<int>(m.triangles().size());
}

}  // namespace

TEST_CASE("point cloud invariants") {
  Eigen::MatrixXd pts(3, 2);
  pts << 0, 0, 1, 0, 0, 1;

  SUBCASE("uniform default measure") {
    PointCloud c(pts, {});
    CHECK(c.measure().sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.measure()[0] == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("duplicate points rejected") {
    Eigen::MatrixXd dup = pts;
    dup.row(2) = dup.row(0);
    CHECK_THROWS_AS(PointCloud(dup, {}), DegenerateInput);
  }
  SUBCASE("repeated triangle vertex rejected") {
    CHECK_THROWS_AS(PointCloud(pts, {{0, 1, 1}}), DegenerateInput);
  }
  SUBCASE("out-of-range triangle rejected") {
    CHECK_THROWS_AS(PointCloud(pts, {{0, 1, 3}}), DegenerateInput);
  }
  SUBCASE("measure must be normalized and positive") {
    CHECK_THROWS_AS(PointCloud(pts, {}, Eigen::Vector3d(0.5, 0.5, 0.1)), DegenerateInput);
    CHECK_THROWS_AS(PointCloud(pts, {}, Eigen::Vector3d(0.5, 0.5, 0.0)), DegenerateInput);
  }
}

TEST_CASE("correspondence argmax breaks ties toward the lowest index") {
  SparseRowMatrix pi(2, 3);
  pi.insert(0, 1) = 0.5;
  pi.insert(0, 2) = 0.5;
  pi.insert(1, 0) = 0.2;
  pi.insert(1, 2) = 0.8;
  Correspondence c(pi);
  CHECK(c.assignment() == std::vector<int>{1, 2});

  SparseRowMatrix bad(1, 2);
  bad.insert(0, 0) = 0.7;
  CHECK_THROWS(Correspondence(bad));
}

TEST_CASE("load_shape formats") {
  SUBCASE("OFF tetrahedron") {
    const auto p = scratch("tet.off");
    write_file(p, "OFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n");
    const PointCloud c = load_shape(p);
    CHECK(c.size() == 4);
    CHECK(c.triangles().size() == 4);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(c.measure()[i] == 0.25);
    CHECK(c.points()(1, 0) == 1.0);
  }
  SUBCASE("XYZ cloud has no triangles") {
    const auto p = scratch("cloud.xyz");
    std::ofstream out(p);
    for (int i = 0; i < 100; ++i) out << i << " " << 0.5 * i << " " << -i << "\n";
    out.close();
    const PointCloud c = load_shape(p, ShapeFormat::Xyz);
    CHECK(c.size() == 100);
    CHECK_FALSE(c.has_triangles());
  }
  SUBCASE("face index out of range") {
    const auto p = scratch("bad.off");
    write_file(p, "OFF\n5 1 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n1 1 1\n3 0 1 9\n");
    CHECK_THROWS_AS(load_shape(p), DegenerateInput);
  }
  SUBCASE("non-finite coordinate") {
    const auto p = scratch("nan.xyz");
    write_file(p, "0 0 0\nnan 1 2\n");
    CHECK_THROWS_AS(load_shape(p), ParseError);
  }
  SUBCASE("malformed header") {
    const auto p = scratch("junk.off");
    write_file(p, "OFF\nthree 1 0\n");
    CHECK_THROWS_AS(load_shape(p), ParseError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_shape(scratch("nope.off")), IoError);
  }
  SUBCASE("OBJ with quads is fan-triangulated") {
    const auto p = scratch("quad.obj");
    write_file(p, "# square\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    const PointCloud c = load_shape(p);
    CHECK(c.size() == 4);
    CHECK(c.triangles().size() == 2);
  }
}

TEST_CASE("PLY and OFF round trip preserves order") {
  const PointCloud m = generate_shape(ShapeKind::BumpySphere, 162, 3);
  for (const char* name : {"rt.ply", "rt.off", "rt.obj"}) {
    const auto p = scratch(name);
    if (fs::path(name).extension() == ".obj") {
      std::ofstream out(p);
      out.precision(17);
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        out << "v " << m.points()(i, 0) << " " << m.points()(i, 1) << " " << m.points()(i, 2) << "\n";
      }
      for (const auto& t : m.triangles()) out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    } else if (fs::path(name).extension() == ".ply") {
      write_ply(p, m);
    } else {
      write_off(p, m);
    }
    const PointCloud back = load_shape(p);
    CAPTURE(name);
    CHECK((back.points() - m.points()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.triangles() == m.triangles());
  }
}

TEST_CASE("voronoi_measure") {
  SUBCASE("regular tetrahedron is uniform") {
    const PointCloud v = voronoi_measure(regular_tetrahedron());
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(v.measure()[i] == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("irregular strip matches independent area summation") {
    Eigen::MatrixXd v(4, 3);
    v << 0, 0, 0, 2, 0, 0, 0, 1, 0, 3, 2.5, 0.4;
    const PointCloud strip(v, {{0, 1, 2}, {1, 3, 2}});
    const PointCloud w = voronoi_measure(strip);
    const Eigen::VectorXd oracle = testing::dual_area_weights(strip);
    CHECK((w.measure() - oracle).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(w.measure().sum() - 1.0) < 1e-12);
  }
  SUBCASE("isolated vertex") {
    Eigen::MatrixXd v(4, 3);
    v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 5, 5, 5;
    CHECK_THROWS_AS(voronoi_measure(PointCloud(v, {{0, 1, 2}})), DegenerateInput);
  }
  SUBCASE("no triangles") {
    Eigen::MatrixXd v(3, 3);
    v << 0, 0, 0, 1, 0, 0, 0, 1, 0;
    CHECK_THROWS_AS(voronoi_measure(PointCloud(v, {})), MissingConnectivity);
  }
}

TEST_CASE("generate_shape") {
  SUBCASE("icosphere counts") {
    const PointCloud s = generate_shape(ShapeKind::Sphere, 642, 0);
    CHECK(s.size() == 642);
    CHECK(s.triangles().size() == 1280);
    CHECK(euler_characteristic(s) == 2);
    for (Eigen::Index i = 0; i < s.size(); ++i) CHECK(s.points().row(i).norm() == doctest::Approx(1.0));
  }
  SUBCASE("non-icosphere resolution is still a closed sphere") {
    const PointCloud s = generate_shape(ShapeKind::Sphere, 500, 0);
    CHECK(s.size() == 500);
    CHECK(euler_characteristic(s) == 2);
  }
  SUBCASE("bumpy sphere is deterministic") {
    const PointCloud a = generate_shape(ShapeKind::BumpySphere, 642, 7);
    const PointCloud b = generate_shape(ShapeKind::BumpySphere, 642, 7);
    CHECK(a.points() == b.points());
    CHECK(a.triangles() == b.triangles());
    const PointCloud c = generate_shape(ShapeKind::BumpySphere, 642, 8);
    CHECK(a.points() != c.points());
  }
  SUBCASE("torus has genus one") {
    const PointCloud t = generate_shape(ShapeKind::Torus, 400, 0);
    CHECK(t.size() <= 400);
    CHECK(euler_characteristic(t) == 0);
  }
  SUBCASE("resolution too small") {
    CHECK_THROWS_AS(generate_shape(ShapeKind::Sphere, 11, 0), DegenerateInput);
  }
}

TEST_CASE("transfer_connectivity") {
  const PointCloud m = generate_shape(ShapeKind::BumpySphere, 200, 5);

  SUBCASE("identity") {
    std::vector<int> id(200);
    std::iota(id.begin(), id.end(), 0);
    const auto r = transfer_connectivity(m, m, Correspondence::from_assignment(id, 200));
    CHECK(r.quality == 1.0);
    CHECK(r.mesh.triangles() == m.triangles());
    REQUIRE(r.edge_length_ratio.has_value());
    CHECK(*r.edge_length_ratio == doctest::Approx(1.0));
  }
  SUBCASE("constant map is fully degenerate") {
    const auto r = transfer_connectivity(m, m, Correspondence::from_assignment(std::vector<int>(200, 0), 200));
    CHECK(r.quality == 0.0);
    CHECK(r.nondegenerate == 0);
  }
  SUBCASE("permuted copy recovers the permuted triangles") {
    std::mt19937_64 rng(11);
    const auto perm = testing::random_permutation(200, rng);
    const PointCloud copy = permute_points(m, perm);
    // source vertex perm[i] now lives at index i of the copy
    std::vector<int> inverse(200);
    for (int i = 0; i < 200; ++i) inverse[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
    const auto r = transfer_connectivity(m, copy, Correspondence::from_assignment(inverse, 200));
    CHECK(r.mesh.triangles().size() == m.triangles().size());
    CHECK(testing::triangle_set(r.mesh.triangles()) == testing::triangle_set(copy.triangles()));
    CHECK(r.quality == 1.0);
  }
  SUBCASE("errors") {
    Eigen::MatrixXd v(3, 3);
    v << 0, 0, 0, 1, 0, 0, 0, 1, 0;
    const PointCloud bare(v, {});
    CHECK_THROWS_AS(transfer_connectivity(bare, m, Correspondence::from_assignment({0, 1, 2}, 200)),
                    MissingConnectivity);
    CHECK_THROWS_AS(transfer_connectivity(m, m, Correspondence::from_assignment({0, 1, 2}, 200)),
                    DimensionMismatch);
  }
}
