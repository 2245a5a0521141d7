#include "convex_hull.hpp"

#include <map>
#include <utility>

#include <Eigen/Geometry>

#include "lbreg/error.hpp"

namespace lbreg::detail {

namespace {

struct Face {
  Triangle v;
  Eigen::Vector3d normal;
  double offset = 0.0;
  bool alive = true;
};

Face make_face(const Eigen::MatrixXd& pts, int a, int b, int c) {
  Face f;
  f.v = {a, b, c};
  const Eigen::Vector3d pa = pts.row(a).transpose();
  const Eigen::Vector3d ab = pts.row(b).transpose() - pa;
  const Eigen::Vector3d ac = pts.row(c).transpose() - pa;
  f.normal = ab.cross(ac);
  const double len = f.normal.norm();
  if (len > 0.0) f.normal /= len;
  f.offset = f.normal.dot(pa);
  return f;
}

double signed_distance(const Face& f, const Eigen::MatrixXd& pts, int p) {
  return f.normal.dot(pts.row(p).transpose()) - f.offset;
}

}  // namespace

std::vector<Triangle> convex_hull_triangles(const Eigen::MatrixXd& pts) {
  const int n = static_cast<int>(pts.rows());
  if (n < 4 || pts.cols() != 3) throw DegenerateInput("convex hull needs at least 4 points in R^3");

  const double scale = pts.cwiseAbs().maxCoeff();
  const double eps = 1e-12 * (scale > 0.0 ? scale : 1.0);

  // Initial tetrahedron: points 0, 1, then the first point off the line and
  // the first point off the plane.
  int i2 = -1;
  int i3 = -1;
  const Eigen::Vector3d p0 = pts.row(0).transpose();
  const Eigen::Vector3d d01 = pts.row(1).transpose() - p0;
  for (int i = 2; i < n && i2 < 0; ++i) {
    const Eigen::Vector3d d0i = pts.row(i).transpose() - p0;
    if (d01.cross(d0i).norm() > eps) i2 = i;
  }
  if (i2 < 0) throw DegenerateInput("points are collinear");
  const Eigen::Vector3d d02 = pts.row(i2).transpose() - p0;
  const Eigen::Vector3d nrm = d01.cross(d02);
  for (int i = 2; i < n && i3 < 0; ++i) {
    if (i != i2 && std::abs(nrm.normalized().dot(pts.row(i).transpose() - p0)) > eps) i3 = i;
  }
  if (i3 < 0) throw DegenerateInput("points are coplanar");

  std::vector<Face> faces;
  std::map<std::pair<int, int>, int> edge_face;  // directed edge -> owning face
  auto add_face = [&](int a, int b, int c) {
    faces.push_back(make_face(pts, a, b, c));
    const int id = static_cast<int>(faces.size()) - 1;
    edge_face[{a, b}] = id;
    edge_face[{b, c}] = id;
    edge_face[{c, a}] = id;
  };

  const int tet[4] = {0, 1, i2, i3};
  const Eigen::Vector3d centroid =
      (pts.row(0) + pts.row(1) + pts.row(i2) + pts.row(i3)).transpose() / 4.0;
  const int tet_faces[4][3] = {{0, 1, 2}, {0, 3, 1}, {1, 3, 2}, {0, 2, 3}};
  for (const auto& tf : tet_faces) {
    int a = tet[tf[0]];
    int b = tet[tf[1]];
    int c = tet[tf[2]];
    Face f = make_face(pts, a, b, c);
    if (f.normal.dot(centroid) - f.offset > 0.0) std::swap(b, c);
    add_face(a, b, c);
  }

  std::vector<int> visible;
  for (int p = 0; p < n; ++p) {
    if (p == 0 || p == 1 || p == i2 || p == i3) continue;
    visible.clear();
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
      if (faces[static_cast<std::size_t>(f)].alive &&
          signed_distance(faces[static_cast<std::size_t>(f)], pts, p) > eps) {
        visible.push_back(f);
      }
    }
    if (visible.empty()) {
      throw DegenerateInput("point " + std::to_string(p) + " is not a convex hull vertex");
    }
    std::vector<std::pair<int, int>> horizon;
    for (int f : visible) faces[static_cast<std::size_t>(f)].alive = false;
    for (int f : visible) {
      const auto& v = faces[static_cast<std::size_t>(f)].v;
      for (int k = 0; k < 3; ++k) {
        const int a = v[static_cast<std::size_t>(k)];
        const int b = v[static_cast<std::size_t>((k + 1) % 3)];
        const auto twin = edge_face.find({b, a});
        if (twin != edge_face.end() && faces[static_cast<std::size_t>(twin->second)].alive) {
          horizon.emplace_back(a, b);
        }
      }
    }
    for (int f : visible) {
      const auto& v = faces[static_cast<std::size_t>(f)].v;
      for (int k = 0; k < 3; ++k) {
        edge_face.erase({v[static_cast<std::size_t>(k)], v[static_cast<std::size_t>((k + 1) % 3)]});
      }
    }
    for (const auto& [a, b] : horizon) add_face(a, b, p);
  }

  std::vector<Triangle> out;
  for (const auto& f : faces) {
    if (f.alive) out.push_back(f.v);
  }
  return out;
}

}  // namespace lbreg::detail
