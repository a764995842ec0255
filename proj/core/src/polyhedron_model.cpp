#include "rigidlab/polyhedron_model.hpp"

#include "rigidlab/errors.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace rigidlab {

namespace {

Vec3 vertex_centroid(const std::vector<Vec3>& pts) {
  Vec3 c = Vec3::Zero();
  for (const Vec3& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

double spread_radius(const std::vector<Vec3>& pts) {
  const Vec3 c = vertex_centroid(pts);
  double r = 0.0;
  for (const Vec3& p : pts) r = std::max(r, (p - c).norm());
  return r;
}

/// Orthonormal (u, w) with (u, w, n) right-handed.
std::pair<Vec3, Vec3> plane_basis(const Vec3& n) {
  const Vec3 seed = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = (seed - seed.dot(n) * n).normalized();
  return {u, n.cross(u)};
}

/// Sorts point indices counter-clockwise around `n` as seen from its tip.
void sort_ccw(std::vector<int>& idx, const std::vector<Vec3>& pts, const Vec3& n) {
  Vec3 c = Vec3::Zero();
  for (int i : idx) c += pts[i];
  c /= static_cast<double>(idx.size());
  const auto [u, w] = plane_basis(n);
  std::vector<std::pair<double, int>> keyed;
  keyed.reserve(idx.size());
  for (int i : idx) {
    const Vec3 d = pts[i] - c;
    keyed.emplace_back(std::atan2(d.dot(w), d.dot(u)), i);
  }
  std::sort(keyed.begin(), keyed.end());
  for (size_t k = 0; k < idx.size(); ++k) idx[k] = keyed[k].second;
}

/// Counter-clockwise convex hull (seen from the tip of `n`) of coplanar
/// points, keeping strict corners only (monotone chain).
std::vector<int> planar_hull(const std::vector<int>& idx, const std::vector<Vec3>& pts, const Vec3& n, double tol) {
  const auto [u, w] = plane_basis(n);
  std::vector<std::pair<Eigen::Vector2d, int>> q;
  for (int i : idx) q.emplace_back(Eigen::Vector2d(pts[i].dot(u), pts[i].dot(w)), i);
  std::sort(q.begin(), q.end(), [](const auto& a, const auto& b) {
    return a.first.x() < b.first.x() || (a.first.x() == b.first.x() && a.first.y() < b.first.y());
  });
  auto turn = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    const Eigen::Vector2d d1 = a - o;
    const Eigen::Vector2d d2 = b - o;
    return d1.x() * d2.y() - d1.y() * d2.x();
  };
  std::vector<std::pair<Eigen::Vector2d, int>> h(2 * q.size());
  size_t k = 0;
  for (size_t i = 0; i < q.size(); ++i) {
    while (k >= 2 && turn(h[k - 2].first, h[k - 1].first, q[i].first) <= tol) --k;
    h[k++] = q[i];
  }
  for (size_t i = q.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(h[k - 2].first, h[k - 1].first, q[i].first) <= tol) --k;
    h[k++] = q[i];
  }
  std::vector<int> out;
  for (size_t i = 0; i + 1 < k; ++i) out.push_back(h[i].second);
  return out;
}

double det3(const Vec3& a, const Vec3& b, const Vec3& c) { return a.dot(b.cross(c)); }

/// Splits a cyclic face list around one vertex into oriented simple triples.
void append_triples(std::vector<int> cycle, const std::vector<Vec3>& normals, Combinatorics& out) {
  const auto min_it = std::min_element(cycle.begin(), cycle.end());
  std::rotate(cycle.begin(), min_it, cycle.end());
  const size_t k = cycle.size();
  double orientation = 0.0;
  for (size_t a = 1; a + 1 < k; ++a) orientation += det3(normals[cycle[0]], normals[cycle[a]], normals[cycle[a + 1]]);
  if (orientation < 0) std::reverse(cycle.begin() + 1, cycle.end());
  for (size_t a = 1; a + 1 < k; ++a) out.vertex_triples.push_back({cycle[0], cycle[a], cycle[a + 1]});
  if (k > 3) ++out.resolved_vertices;
}

}  // namespace

std::vector<std::array<int, 2>> VertexPolyhedron::edges() const {
  std::set<std::array<int, 2>> unique;
  for (const auto& f : faces) {
    for (size_t a = 0; a < f.size(); ++a) {
      const int u = f[a];
      const int v = f[(a + 1) % f.size()];
      unique.insert({std::min(u, v), std::max(u, v)});
    }
  }
  return {unique.begin(), unique.end()};
}

double VertexPolyhedron::circumradius() const {
  double r = 0.0;
  for (const Vec3& p : vertices) r = std::max(r, p.norm());
  return r;
}

Vec3 VertexPolyhedron::face_normal(int f) const {
  const auto& face = faces.at(f);
  Vec3 n = Vec3::Zero();
  for (size_t a = 0; a < face.size(); ++a) {
    const Vec3& p = vertices[face[a]];
    const Vec3& q = vertices[face[(a + 1) % face.size()]];
    n += p.cross(q);
  }
  const double len = n.norm();
  if (len == 0.0) throw Error(Errc::DegenerateFace, "face " + std::to_string(f) + " has zero area");
  return n / len;
}

double VertexPolyhedron::face_area(int f) const {
  const auto& face = faces.at(f);
  Vec3 n = Vec3::Zero();
  for (size_t a = 0; a < face.size(); ++a) n += vertices[face[a]].cross(vertices[face[(a + 1) % face.size()]]);
  return 0.5 * n.norm();
}

Vec3 VertexPolyhedron::face_centroid(int f) const {
  Vec3 c = Vec3::Zero();
  for (int v : faces.at(f)) c += vertices[v];
  return c / static_cast<double>(faces[f].size());
}

VertexPolyhedron VertexPolyhedron::translated(const Vec3& a) const {
  VertexPolyhedron out = *this;
  for (Vec3& p : out.vertices) p += a;
  return out;
}

VertexPolyhedron VertexPolyhedron::scaled(double factor) const {
  VertexPolyhedron out = *this;
  for (Vec3& p : out.vertices) p *= factor;
  return out;
}

ValidationReport validate(const VertexPolyhedron& p) {
  const int nv = p.vertex_count();
  if (nv < 4) throw Error(Errc::BadTopology, "need at least 4 vertices");
  if (p.face_count() < 4) throw Error(Errc::BadTopology, "need at least 4 faces");

  std::map<std::pair<int, int>, int> directed;
  std::vector<int> used(nv, 0);
  for (int f = 0; f < p.face_count(); ++f) {
    const auto& face = p.faces[f];
    if (face.size() < 3) throw Error(Errc::BadTopology, "face " + std::to_string(f) + " has fewer than 3 vertices");
    for (size_t a = 0; a < face.size(); ++a) {
      const int u = face[a];
      const int v = face[(a + 1) % face.size()];
      if (u < 0 || u >= nv) throw Error(Errc::BadTopology, "vertex index out of range in face " + std::to_string(f));
      if (u == v) throw Error(Errc::BadTopology, "repeated vertex in face " + std::to_string(f));
      if (!directed.emplace(std::make_pair(u, v), f).second) {
        throw Error(Errc::BadTopology, "directed edge " + std::to_string(u) + "->" + std::to_string(v) +
                                           " used twice (inconsistent orientation)");
      }
      used[u] = 1;
    }
  }
  for (const auto& [key, f] : directed) {
    if (!directed.count({key.second, key.first})) {
      throw Error(Errc::BadTopology, "edge " + std::to_string(key.first) + "-" + std::to_string(key.second) +
                                         " is not shared by exactly two faces");
    }
  }
  if (std::find(used.begin(), used.end(), 0) != used.end()) throw Error(Errc::BadTopology, "isolated vertex");

  ValidationReport report;
  report.vertex_count = nv;
  report.face_count = p.face_count();
  report.edge_count = static_cast<int>(directed.size() / 2);
  report.euler_characteristic = report.vertex_count - report.edge_count + report.face_count;
  if (report.euler_characteristic != 2) {
    throw Error(Errc::BadTopology, "Euler characteristic " + std::to_string(report.euler_characteristic));
  }

  const double scale = std::max(spread_radius(p.vertices), 1e-300);
  const double tol = 1e-9 * scale;
  report.min_face_area = std::numeric_limits<double>::infinity();
  report.max_convexity_residual = -std::numeric_limits<double>::infinity();
  for (int f = 0; f < p.face_count(); ++f) {
    const double area = p.face_area(f);
    report.min_face_area = std::min(report.min_face_area, area);
    if (area <= 1e-14 * scale * scale) throw Error(Errc::DegenerateFace, "face " + std::to_string(f) + " has zero area");
    const Vec3 n = p.face_normal(f);
    const double h = n.dot(p.face_centroid(f));
    for (int v = 0; v < nv; ++v) {
      const double residual = n.dot(p.vertices[v]) - h;
      report.max_convexity_residual = std::max(report.max_convexity_residual, residual);
      if (residual > tol) {
        std::ostringstream msg;
        msg << "face " << f << ", vertex " << v << ", residual " << residual;
        throw Error(Errc::NonConvex, msg.str());
      }
    }
    for (int v : p.faces[f]) {
      if (std::abs(n.dot(p.vertices[v]) - h) > tol) {
        throw Error(Errc::NonConvex, "face " + std::to_string(f) + " is not planar");
      }
    }
  }
  return report;
}

Combinatorics vertex_combinatorics(const VertexPolyhedron& p, const std::vector<Vec3>& normals) {
  std::map<std::pair<int, int>, int> face_of_directed;
  std::vector<std::vector<int>> faces_at(p.vertex_count());
  for (int f = 0; f < p.face_count(); ++f) {
    const auto& face = p.faces[f];
    for (size_t a = 0; a < face.size(); ++a) {
      face_of_directed[{face[a], face[(a + 1) % face.size()]}] = f;
      faces_at[face[a]].push_back(f);
    }
  }

  auto next_after = [&p](int f, int v) {
    const auto& face = p.faces[f];
    const auto it = std::find(face.begin(), face.end(), v);
    return face[(std::distance(face.begin(), it) + 1) % face.size()];
  };

  Combinatorics out;
  for (int v = 0; v < p.vertex_count(); ++v) {
    const int start = faces_at[v].front();
    std::vector<int> cycle{start};
    int f = start;
    for (size_t guard = 0; guard <= faces_at[v].size(); ++guard) {
      const int w = next_after(f, v);
      const auto it = face_of_directed.find({w, v});
      if (it == face_of_directed.end()) throw Error(Errc::BadTopology, "open fan at vertex " + std::to_string(v));
      f = it->second;
      if (f == start) break;
      cycle.push_back(f);
    }
    if (cycle.size() != faces_at[v].size() || cycle.size() < 3) {
      throw Error(Errc::BadTopology, "vertex " + std::to_string(v) + " is not a manifold vertex");
    }
    append_triples(cycle, normals, out);
  }
  return out;
}

SupportPolyhedron SupportPolyhedron::translated(const Vec3& a) const {
  SupportPolyhedron out = *this;
  for (int i = 0; i < size(); ++i) out.heights[i] += a.dot(normals[i]);
  return out;
}

SupportPolyhedron SupportPolyhedron::with_heights(const VecX& h) const {
  SupportPolyhedron out = *this;
  out.heights = h;
  return out;
}

SupportPolyhedron to_support(const VertexPolyhedron& p) {
  SupportPolyhedron s;
  s.normals.reserve(p.face_count());
  s.heights.resize(p.face_count());
  for (int f = 0; f < p.face_count(); ++f) {
    const Vec3 n = p.face_normal(f);
    s.normals.push_back(n);
    s.heights[f] = n.dot(p.face_centroid(f));
  }
  s.combinatorics = vertex_combinatorics(p, s.normals);
  return s;
}

VertexPolyhedron from_support(const SupportPolyhedron& s, double tol) {
  const int n = s.size();
  if (n < 4 || s.heights.size() != n) throw Error(Errc::InvalidInput, "need at least 4 normals with matching heights");
  for (int i = 0; i < n; ++i) {
    if (std::abs(s.normals[i].norm() - 1.0) > 1e-9) {
      throw Error(Errc::InvalidInput, "normal " + std::to_string(i) + " is not a unit vector");
    }
  }

  MatX nm(n, 3);
  for (int i = 0; i < n; ++i) nm.row(i) = s.normals[i].transpose();
  Eigen::JacobiSVD<MatX> svd(nm);
  if (svd.singularValues()[2] < 1e-9) throw Error(Errc::DegenerateSpan, "normals do not span R^3");

  // A recession direction d ≠ 0 with ⟨d, ν_k⟩ ≤ 0 for all k exists iff one
  // exists along an extreme ray, i.e. along some ν_i × ν_j.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vec3 c = s.normals[i].cross(s.normals[j]);
      if (c.norm() < 1e-12) continue;
      for (double sign : {1.0, -1.0}) {
        const Vec3 d = sign * c.normalized();
        double worst = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < n; ++k) worst = std::max(worst, d.dot(s.normals[k]));
        if (worst <= 1e-12) throw Error(Errc::Unbounded, "intersection of half-spaces is unbounded");
      }
    }
  }

  const double scale = std::max(1.0, s.heights.cwiseAbs().maxCoeff());
  const double feas = tol * scale;
  std::vector<Vec3> pts;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        Eigen::Matrix3d m;
        m.row(0) = s.normals[a].transpose();
        m.row(1) = s.normals[b].transpose();
        m.row(2) = s.normals[c].transpose();
        if (std::abs(m.determinant()) < 1e-12) continue;
        const Vec3 x = m.partialPivLu().solve(Vec3(s.heights[a], s.heights[b], s.heights[c]));
        bool feasible = true;
        for (int k = 0; k < n && feasible; ++k) feasible = s.normals[k].dot(x) <= s.heights[k] + feas;
        if (!feasible) continue;
        const bool duplicate =
            std::any_of(pts.begin(), pts.end(), [&](const Vec3& q) { return (q - x).norm() <= 100 * feas; });
        if (!duplicate) pts.push_back(x);
      }
    }
  }

  VertexPolyhedron out;
  out.vertices = pts;
  out.faces.resize(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> on;
    for (int v = 0; v < static_cast<int>(pts.size()); ++v) {
      if (std::abs(s.normals[i].dot(pts[v]) - s.heights[i]) <= 100 * feas) on.push_back(v);
    }
    if (on.size() < 3) throw Error(Errc::EmptyFacet, "facet " + std::to_string(i) + " is empty");
    sort_ccw(on, pts, s.normals[i]);
    out.faces[i] = on;
    if (out.face_area(i) <= 1e-12 * scale * scale) throw Error(Errc::EmptyFacet, "facet " + std::to_string(i) + " has no area");
  }
  return out;
}

SupportPolyhedron polar_dual(const VertexPolyhedron& p) {
  const double scale = std::max(p.circumradius(), 1e-300);
  for (int f = 0; f < p.face_count(); ++f) {
    const double h = p.face_normal(f).dot(p.face_centroid(f));
    if (h <= 1e-12 * scale) throw Error(Errc::OriginNotInterior, "origin is not strictly inside face " + std::to_string(f));
  }
  SupportPolyhedron s;
  s.heights.resize(p.vertex_count());
  for (int v = 0; v < p.vertex_count(); ++v) {
    const double r = p.vertices[v].norm();
    s.normals.push_back(p.vertices[v] / r);
    s.heights[v] = 1.0 / r;
  }
  Combinatorics comb;
  for (const auto& face : p.faces) append_triples(face, s.normals, comb);
  s.combinatorics = comb;
  return s;
}

int TriangulatedBoundary::diagonal_count() const {
  return static_cast<int>(std::count_if(edges.begin(), edges.end(), [](const BoundaryEdge& e) { return e.diagonal; }));
}

TriangulatedBoundary triangulate(const VertexPolyhedron& p) {
  TriangulatedBoundary t;
  t.base = p;
  std::set<std::array<int, 2>> diagonals;
  for (auto face : p.faces) {
    std::rotate(face.begin(), std::min_element(face.begin(), face.end()), face.end());
    for (size_t a = 1; a + 1 < face.size(); ++a) {
      t.triangles.push_back({face[0], face[a], face[a + 1]});
      if (a >= 2) diagonals.insert({std::min(face[0], face[a]), std::max(face[0], face[a])});
    }
  }
  for (const auto& e : p.edges()) t.edges.push_back({e[0], e[1], false});
  for (const auto& d : diagonals) t.edges.push_back({d[0], d[1], true});
  std::sort(t.edges.begin(), t.edges.end(),
            [](const BoundaryEdge& a, const BoundaryEdge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  return t;
}

VertexPolyhedron convex_hull(const std::vector<Vec3>& input, double tol) {
  if (input.size() < 4) throw Error(Errc::BadTopology, "convex hull needs at least 4 points");
  const double scale = std::max(spread_radius(input), 1e-300);
  const double eps = tol * scale;
  std::vector<Vec3> points;
  for (const Vec3& p : input) {
    if (std::none_of(points.begin(), points.end(), [&](const Vec3& q) { return (q - p).norm() <= eps; })) {
      points.push_back(p);
    }
  }
  const int n = static_cast<int>(points.size());

  struct Plane {
    Vec3 normal;
    double offset;
  };
  std::vector<Plane> planes;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        Vec3 nrm = (points[b] - points[a]).cross(points[c] - points[a]);
        if (nrm.norm() <= 1e-12 * scale * scale) continue;
        nrm.normalize();
        double off = nrm.dot(points[a]);
        double hi = -std::numeric_limits<double>::infinity();
        double lo = std::numeric_limits<double>::infinity();
        for (const Vec3& q : points) {
          hi = std::max(hi, nrm.dot(q) - off);
          lo = std::min(lo, nrm.dot(q) - off);
        }
        if (hi > eps && lo < -eps) continue;
        if (hi > eps) {
          nrm = -nrm;
          off = -off;
        }
        const bool known = std::any_of(planes.begin(), planes.end(), [&](const Plane& pl) {
          return (pl.normal - nrm).norm() < 1e-9 && std::abs(pl.offset - off) <= eps;
        });
        if (!known) planes.push_back({nrm, off});
      }
    }
  }

  std::vector<int> on_hull(n, 0);
  std::vector<std::vector<int>> raw_faces;
  for (const Plane& pl : planes) {
    std::vector<int> face;
    for (int v = 0; v < n; ++v) {
      if (std::abs(pl.normal.dot(points[v]) - pl.offset) <= eps) face.push_back(v);
    }
    const std::vector<int> corners = planar_hull(face, points, pl.normal, 1e-12 * scale * scale);
    for (int v : corners) on_hull[v] = 1;
    raw_faces.push_back(corners);
  }

  VertexPolyhedron hull;
  std::vector<int> remap(n, -1);
  for (int v = 0; v < n; ++v) {
    if (on_hull[v]) {
      remap[v] = hull.vertex_count();
      hull.vertices.push_back(points[v]);
    }
  }
  for (const auto& f : raw_faces) {
    std::vector<int> g;
    for (int v : f) g.push_back(remap[v]);
    hull.faces.push_back(g);
  }
  return hull;
}

double enclosed_volume(const VertexPolyhedron& p) {
  double vol = 0.0;
  for (const auto& f : p.faces) {
    for (size_t a = 1; a + 1 < f.size(); ++a) vol += det3(p.vertices[f[0]], p.vertices[f[a]], p.vertices[f[a + 1]]);
  }
  return vol / 6.0;
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Vec3 vec3_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(Errc::InvalidInput, "expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

LoadResult parse_polyhedron_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("vertices") || !j.contains("faces")) {
    throw Error(Errc::InvalidInput, "polyhedron JSON needs \"vertices\" and \"faces\"");
  }
  LoadResult out;
  try {
    for (const auto& v : j["vertices"]) out.polyhedron.vertices.push_back(vec3_from(v));
    for (const auto& f : j["faces"]) out.polyhedron.faces.push_back(f.get<std::vector<int>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidInput, std::string("bad polyhedron field: ") + e.what());
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "vertices" && key != "faces") out.warnings.push_back("unknown field \"" + key + "\" ignored");
  }
  return out;
}

LoadResult read_polyhedron_json(const std::string& path) { return parse_polyhedron_json(slurp(path)); }

std::string polyhedron_to_json(const VertexPolyhedron& p) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const Vec3& v : p.vertices) j["vertices"].push_back({v.x(), v.y(), v.z()});
  j["faces"] = p.faces;
  return j.dump();
}

LoadResult parse_obj(std::istream& in) {
  LoadResult out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw Error(Errc::InvalidInput, "bad vertex on line " + std::to_string(lineno));
      out.polyhedron.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> face;
      std::string tok;
      while (ls >> tok) {
        const int raw = std::stoi(tok.substr(0, tok.find('/')));
        const int nv = out.polyhedron.vertex_count();
        const int idx = raw > 0 ? raw - 1 : nv + raw;
        if (idx < 0 || idx >= nv) throw Error(Errc::InvalidInput, "face index out of range on line " + std::to_string(lineno));
        face.push_back(idx);
      }
      out.polyhedron.faces.push_back(face);
    } else {
      out.warnings.push_back("record \"" + tag + "\" ignored on line " + std::to_string(lineno));
    }
  }
  return out;
}

LoadResult read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidInput, "cannot open " + path);
  return parse_obj(in);
}

SupportPolyhedron parse_support_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
  if (!j.contains("normals") || !j.contains("heights")) {
    throw Error(Errc::InvalidInput, "support JSON needs \"normals\" and \"heights\"");
  }
  SupportPolyhedron s;
  for (const auto& n : j["normals"]) s.normals.push_back(vec3_from(n).normalized());
  const auto h = j["heights"].get<std::vector<double>>();
  if (h.size() != s.normals.size()) throw Error(Errc::InvalidInput, "normals and heights differ in length");
  s.heights = Eigen::Map<const VecX>(h.data(), static_cast<Eigen::Index>(h.size()));
  return s;
}

}  // namespace rigidlab
