#include "rigidlab/solids.hpp"

#include "rigidlab/errors.hpp"

#include <cmath>

namespace rigidlab::solids {

namespace {

VertexPolyhedron hull_scaled(std::vector<Vec3> pts, double circumradius) {
  double r = 0.0;
  for (const Vec3& p : pts) r = std::max(r, p.norm());
  for (Vec3& p : pts) p *= circumradius / r;
  return convex_hull(pts);
}

bool origin_interior(const VertexPolyhedron& p) {
  for (int f = 0; f < p.face_count(); ++f) {
    if (p.face_normal(f).dot(p.face_centroid(f)) <= 1e-3) return false;
  }
  return true;
}

}  // namespace

VertexPolyhedron box(double a, double b, double c) {
  std::vector<Vec3> pts;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) pts.emplace_back(0.5 * sx * a, 0.5 * sy * b, 0.5 * sz * c);
  return convex_hull(pts);
}

VertexPolyhedron cube(double edge) { return box(edge, edge, edge); }

VertexPolyhedron tetrahedron(double circumradius) {
  return hull_scaled({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}, circumradius);
}

VertexPolyhedron octahedron(double circumradius) {
  return hull_scaled({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}, circumradius);
}

VertexPolyhedron icosahedron(double circumradius) {
  const double g = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Vec3> pts;
  for (int s1 : {-1, 1}) {
    for (int s2 : {-1, 1}) {
      pts.emplace_back(0, s1, s2 * g);
      pts.emplace_back(s1, s2 * g, 0);
      pts.emplace_back(s2 * g, 0, s1);
    }
  }
  return hull_scaled(pts, circumradius);
}

VertexPolyhedron dodecahedron(double circumradius) {
  const double g = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Vec3> pts;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) pts.emplace_back(sx, sy, sz);
  for (int s1 : {-1, 1}) {
    for (int s2 : {-1, 1}) {
      pts.emplace_back(0, s1 / g, s2 * g);
      pts.emplace_back(s1 / g, s2 * g, 0);
      pts.emplace_back(s2 * g, 0, s1 / g);
    }
  }
  return hull_scaled(pts, circumradius);
}

VertexPolyhedron prism(int m, double height) {
  if (m < 3) throw Error(Errc::InvalidInput, "prism needs m >= 3");
  std::vector<Vec3> pts;
  for (double z : {-0.5 * height, 0.5 * height}) {
    for (int k = 0; k < m; ++k) {
      const double t = 2.0 * M_PI * k / m;
      pts.emplace_back(std::cos(t), std::sin(t), z);
    }
  }
  return convex_hull(pts);
}

Vec3 random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vec3 v;
  do {
    v = Vec3(normal(rng), normal(rng), normal(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

VertexPolyhedron random_simplicial(int n, std::mt19937_64& rng, double min_separation) {
  if (n < 4) throw Error(Errc::InvalidInput, "need at least 4 points");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Vec3> pts;
    int guard = 0;
    while (static_cast<int>(pts.size()) < n && guard++ < 100000) {
      const Vec3 v = random_unit_vector(rng);
      bool ok = true;
      for (const Vec3& q : pts) ok = ok && (q - v).norm() >= min_separation;
      if (ok) pts.push_back(v);
    }
    if (static_cast<int>(pts.size()) < n) throw Error(Errc::InvalidInput, "separation too large for point count");
    VertexPolyhedron hull = convex_hull(pts);
    if (hull.vertex_count() != n || !origin_interior(hull)) continue;
    bool simplicial = true;
    for (const auto& f : hull.faces) simplicial = simplicial && f.size() == 3;
    if (simplicial) return hull;
  }
  throw Error(Errc::InvalidInput, "could not draw a simplicial polyhedron");
}

VertexPolyhedron random_simple(int n_faces, std::mt19937_64& rng, double min_separation) {
  return from_support(polar_dual(random_simplicial(n_faces, rng, min_separation)));
}

SupportPolyhedron perturb_support(const SupportPolyhedron& s, double amplitude, std::mt19937_64& rng) {
  const VertexPolyhedron base = from_support(s);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    SupportPolyhedron out = s;
    for (int i = 0; i < out.size(); ++i) out.heights[i] += amplitude * unit(rng);
    try {
      const VertexPolyhedron moved = from_support(out);
      if (moved.vertex_count() != base.vertex_count()) continue;
      out.combinatorics = vertex_combinatorics(moved, out.normals);
      return out;
    } catch (const Error&) {
      continue;
    }
  }
  throw Error(Errc::InvalidInput, "perturbation keeps leaving the chamber");
}

VertexPolyhedron perturb_vertices(const VertexPolyhedron& p, double amplitude, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Vec3> pts = p.vertices;
    for (Vec3& v : pts) v += amplitude * Vec3(unit(rng), unit(rng), unit(rng));
    VertexPolyhedron hull = convex_hull(pts);
    if (hull.vertex_count() == p.vertex_count() && origin_interior(hull)) return hull;
  }
  throw Error(Errc::InvalidInput, "perturbation keeps dropping vertices");
}

}  // namespace rigidlab::solids
