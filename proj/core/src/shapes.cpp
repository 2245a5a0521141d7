#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "convex_hull.hpp"
#include "lbreg/error.hpp"
#include "lbreg/geometry.hpp"

namespace lbreg {

namespace {

struct Mesh {
  std::vector<Eigen::Vector3d> verts;
  std::vector<Triangle> tris;
};

/// Returns k when count = 10 * 4^k + 2.
std::optional<int> icosphere_level(int count) {
  if (count < 12 || (count - 2) % 10 != 0) return std::nullopt;
  int m = (count - 2) / 10;
  int level = 0;
  while (m % 4 == 0) {
    m /= 4;
    ++level;
  }
  if (m != 1) return std::nullopt;
  return level;
}

Mesh icosphere(int level) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Mesh m;
  m.verts = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
             {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : m.verts) v.normalize();
  m.tris = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
            {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
            {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
      m.verts.push_back((m.verts[static_cast<std::size_t>(a)] + m.verts[static_cast<std::size_t>(b)]).normalized());
      const int id = static_cast<int>(m.verts.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    next.reserve(m.tris.size() * 4);
    for (const auto& tri : m.tris) {
      const int a = mid(tri[0], tri[1]);
      const int b = mid(tri[1], tri[2]);
      const int c = mid(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    m.tris = std::move(next);
  }
  return m;
}

Mesh fibonacci_sphere(int count) {
  Mesh m;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  Eigen::MatrixXd pts(count, 3);
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    m.verts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    pts.row(i) = m.verts.back().transpose();
  }
  m.tris = detail::convex_hull_triangles(pts);
  return m;
}

Mesh unit_sphere(int count) {
  if (auto level = icosphere_level(count)) return icosphere(*level);
  return fibonacci_sphere(count);
}

Mesh torus(int resolution) {
  // Prefer an exact factorization nu * nv = resolution with nu ~ 2 nv.
  const int target = std::max(3, static_cast<int>(std::lround(std::sqrt(resolution / 2.0))));
  int nv = -1;
  for (int c = target; c >= 3; --c) {
    if (resolution % c == 0 && resolution / c >= 3) {
      nv = c;
      break;
    }
  }
  if (nv < 0) nv = target;
  const int nu = resolution / nv;
  if (nu < 3 || nv < 3) throw DegenerateInput("torus resolution too small");

  constexpr double major = 1.0;
  constexpr double minor = 0.4;
  Mesh m;
  for (int i = 0; i < nu; ++i) {
    const double u = 2.0 * std::numbers::pi * i / nu;
    for (int j = 0; j < nv; ++j) {
      const double v = 2.0 * std::numbers::pi * j / nv;
      m.verts.emplace_back((major + minor * std::cos(v)) * std::cos(u),
                           (major + minor * std::cos(v)) * std::sin(u), minor * std::sin(v));
    }
  }
  auto id = [&](int i, int j) { return ((i + nu) % nu) * nv + (j + nv) % nv; };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      m.tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return m;
}

void make_bumpy(Mesh& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> amp(0.04, 0.10);
  std::uniform_real_distribution<double> sharp(2.0, 4.0);

  struct Bump {
    Eigen::Vector3d center;
    double amplitude;
    double sharpness;
  };
  std::vector<Bump> bumps;
  for (int k = 0; k < 6; ++k) {
    Eigen::Vector3d c;
    do {
      c = {unit(rng), unit(rng), unit(rng)};
    } while (c.norm() < 1e-3 || c.norm() > 1.0);
    bumps.push_back({c.normalized(), amp(rng), sharp(rng)});
  }
  // Distinct semi-axes split the l = 1, 2 eigenspaces of the sphere.
  const Eigen::Vector3d axes(1.0, 0.82, 0.66);
  for (auto& v : m.verts) {
    const Eigen::Vector3d u = v.normalized();
    double r = 1.0;
    for (const auto& b : bumps) r += b.amplitude * std::exp(b.sharpness * (u.dot(b.center) - 1.0));
    v = r * axes.cwiseProduct(u);
  }
}

PointCloud to_cloud(const Mesh& m, std::string name) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(m.verts.size()), 3);
  for (std::size_t i = 0; i < m.verts.size(); ++i) pts.row(static_cast<Eigen::Index>(i)) = m.verts[i].transpose();
  return PointCloud(std::move(pts), m.tris, {}, std::move(name));
}

}  // namespace

std::optional<ShapeKind> parse_shape_kind(std::string_view name) {
  if (name == "sphere") return ShapeKind::Sphere;
  if (name == "torus") return ShapeKind::Torus;
  if (name == "bumpy_sphere" || name == "bumpy-sphere") return ShapeKind::BumpySphere;
  return std::nullopt;
}

PointCloud generate_shape(ShapeKind kind, int resolution, std::uint64_t seed) {
  if (resolution < 12) throw DegenerateInput("resolution must be at least 12");
  switch (kind) {
    case ShapeKind::Sphere:
      return to_cloud(unit_sphere(resolution), "sphere_" + std::to_string(resolution));
    case ShapeKind::Torus:
      return to_cloud(torus(resolution), "torus_" + std::to_string(resolution));
    case ShapeKind::BumpySphere: {
      Mesh m = unit_sphere(resolution);
      make_bumpy(m, seed);
      return to_cloud(m, "bumpy_sphere_" + std::to_string(resolution) + "_" + std::to_string(seed));
    }
  }
  throw DegenerateInput("unknown shape kind");
}

}  // namespace lbreg
