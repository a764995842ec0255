#include "rigidlab/gauss_rigidity.hpp"

#include "rigidlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rigidlab {

namespace {

struct PairGeometry {
  double c = 0.0;  // cos φ_ij
  double s = 0.0;  // sin φ_ij
};

PairGeometry pair_geometry(const Vec3& ni, const Vec3& nj) {
  const double c = ni.dot(nj);
  const double s = ni.cross(nj).norm();
  if (s < 1e-12) throw Error(Errc::DegenerateAngle, "adjacent faces with parallel normals");
  return {c, s};
}

std::vector<std::vector<int>> neighbor_cycles(int n, const std::vector<std::array<int, 3>>& triples) {
  std::vector<std::map<int, int>> next(n);
  for (const auto& t : triples) {
    for (int r = 0; r < 3; ++r) {
      const int a = t[r], b = t[(r + 1) % 3], c = t[(r + 2) % 3];
      if (!next[a].emplace(b, c).second) {
        throw Error(Errc::BadTopology, "face " + std::to_string(a) + " sees neighbour " + std::to_string(b) + " twice");
      }
    }
  }
  std::vector<std::vector<int>> cycles(n);
  for (int i = 0; i < n; ++i) {
    if (next[i].size() < 3) throw Error(Errc::EmptyFacet, "facet " + std::to_string(i) + " has no area");
    int j = next[i].begin()->first;
    for (size_t step = 0; step < next[i].size(); ++step) {
      cycles[i].push_back(j);
      const auto it = next[i].find(j);
      if (it == next[i].end()) throw Error(Errc::BadTopology, "open neighbour cycle at face " + std::to_string(i));
      j = it->second;
    }
    if (j != cycles[i].front()) throw Error(Errc::BadTopology, "neighbour cycle of face " + std::to_string(i));
  }
  return cycles;
}

void fill(OrthoschemeDecomposition& d) {
  const int n = d.size();
  d.q_face.resize(n);
  d.h_pair.clear();
  d.q_pair.clear();
  d.h_corner.clear();
  d.q_corner.clear();
  for (int i = 0; i < n; ++i) d.q_face[i] = d.h[i] * d.normals[i];

  for (int i = 0; i < n; ++i) {
    for (int j : d.neighbors[i]) {
      const auto [c, s] = pair_geometry(d.normals[i], d.normals[j]);
      d.h_pair[{i, j}] = (d.h[j] - c * d.h[i]) / s;
      if (i < j) {
        const double den = 1.0 - c * c;
        const Vec3 q = ((d.h[i] - c * d.h[j]) / den) * d.normals[i] + ((d.h[j] - c * d.h[i]) / den) * d.normals[j];
        d.q_pair[{i, j}] = q;
        d.q_pair[{j, i}] = q;
      }
    }
  }

  for (const auto& t : d.vertex_triples) {
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r) m.row(r) = d.normals[t[r]].transpose();
    const Vec3 q = m.partialPivLu().solve(Vec3(d.h[t[0]], d.h[t[1]], d.h[t[2]]));
    static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (const auto& p : perms) {
      const int i = t[p[0]], j = t[p[1]], k = t[p[2]];
      Vec3 e = d.normals[i].cross(d.normals[j]).normalized();
      if (e.dot(d.normals[k]) < 0) e = -e;
      d.h_corner[{i, j, k}] = q.dot(e);
      d.q_corner[{i, j, k}] = q;
    }
  }
}

double cot(double x) { return std::cos(x) / std::sin(x); }

}  // namespace

double OrthoschemeDecomposition::edge_length(int i, int j) const {
  const auto [k, l] = edge_ends(i, j);
  return hijk(i, j, k) + hijk(i, j, l);
}

std::pair<int, int> OrthoschemeDecomposition::edge_ends(int i, int j) const {
  const auto& nb = neighbors.at(i);
  const auto it = std::find(nb.begin(), nb.end(), j);
  if (it == nb.end()) throw Error(Errc::InvalidInput, "faces are not adjacent");
  const size_t a = static_cast<size_t>(std::distance(nb.begin(), it));
  return {nb[(a + 1) % nb.size()], nb[(a + nb.size() - 1) % nb.size()]};
}

OrthoschemeDecomposition OrthoschemeDecomposition::at_heights(const VecX& heights) const {
  if (heights.size() != size()) throw Error(Errc::IndexMismatch, "height vector has the wrong length");
  OrthoschemeDecomposition out;
  out.normals = normals;
  out.h = heights;
  out.vertex_triples = vertex_triples;
  out.neighbors = neighbors;
  fill(out);
  return out;
}

SupportPolyhedron with_combinatorics(const SupportPolyhedron& s) {
  if (s.combinatorics) return s;
  SupportPolyhedron out = s;
  out.combinatorics = vertex_combinatorics(from_support(s), s.normals);
  return out;
}

OrthoschemeDecomposition decompose(const SupportPolyhedron& s, ChamberMode mode) {
  const SupportPolyhedron sc = with_combinatorics(s);
  if (mode == ChamberMode::Reject && !sc.combinatorics->is_simple()) {
    throw Error(Errc::NonSimpleWithoutChamber,
                std::to_string(sc.combinatorics->resolved_vertices) + " vertices lie on more than three faces");
  }
  OrthoschemeDecomposition d;
  d.normals = sc.normals;
  d.h = sc.heights;
  d.vertex_triples = sc.combinatorics->vertex_triples;
  d.neighbors = neighbor_cycles(d.size(), d.vertex_triples);
  fill(d);
  return d;
}

double volume(const OrthoschemeDecomposition& d) {
  double sum = 0.0;
  for (const auto& [key, hijk] : d.h_corner) sum += d.h[key[0]] * d.hij(key[0], key[1]) * hijk;
  return sum / 6.0;
}

VecX face_areas(const OrthoschemeDecomposition& d) {
  VecX a = VecX::Zero(d.size());
  for (int i = 0; i < d.size(); ++i) {
    for (int j : d.neighbors[i]) a[i] += 0.5 * d.hij(i, j) * d.edge_length(i, j);
  }
  return a;
}

double pyramid_volume(const OrthoschemeDecomposition& d) { return d.h.dot(face_areas(d)) / 3.0; }

double PolygonSupportState::area() const {
  double a = 0.0;
  for (int j = 0; j < size(); ++j) a += 0.5 * supports[j] * lengths[j];
  return a;
}

PolygonSupportState PolygonSupportState::from_normals(std::vector<Eigen::Vector2d> normals, std::vector<double> supports) {
  const int m = static_cast<int>(normals.size());
  if (m < 3 || static_cast<int>(supports.size()) != m) throw Error(Errc::InvalidInput, "polygon needs m >= 3 edges");
  PolygonSupportState p;
  p.normals = std::move(normals);
  p.supports = std::move(supports);
  p.exterior.resize(m);
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    const Eigen::Vector2d& a = p.normals[j];
    const Eigen::Vector2d& b = p.normals[(j + 1) % m];
    double ang = std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
    if (ang <= 0.0) ang += 2.0 * M_PI;
    p.exterior[j] = ang;
    total += ang;
  }
  if (std::abs(total - 2.0 * M_PI) > 1e-9) throw Error(Errc::DegenerateAngle, "edge normals do not turn once around");
  const SymMatrix h = polygon_hessian(p.exterior);
  const VecX g = Eigen::Map<const VecX>(p.supports.data(), m);
  const VecX l = h * g;
  p.lengths.assign(l.data(), l.data() + m);
  return p;
}

PolygonSupportState PolygonSupportState::regular(int m, double support) {
  std::vector<Eigen::Vector2d> normals;
  for (int j = 0; j < m; ++j) normals.emplace_back(std::cos(2.0 * M_PI * j / m), std::sin(2.0 * M_PI * j / m));
  return from_normals(std::move(normals), std::vector<double>(m, support));
}

SymMatrix polygon_hessian(const std::vector<double>& exterior) {
  const int m = static_cast<int>(exterior.size());
  if (m < 3) throw Error(Errc::InvalidInput, "polygon needs m >= 3 edges");
  for (int j = 0; j < m; ++j) {
    if (std::abs(std::sin(exterior[j])) < 1e-12) {
      throw Error(Errc::DegenerateAngle, "exterior angle " + std::to_string(j) + " has vanishing sine");
    }
  }
  SymMatrix h(m);
  for (int j = 0; j < m; ++j) {
    const int prev = (j + m - 1) % m;
    h.set(j, j, -(cot(exterior[prev]) + cot(exterior[j])));
    h.set(j, (j + 1) % m, 1.0 / std::sin(exterior[j]));
  }
  return h;
}

SymMatrix polygon_hessian(const PolygonSupportState& p) { return polygon_hessian(p.exterior); }

PolygonSupportState face_polygon(const OrthoschemeDecomposition& d, int i) {
  const Vec3& n = d.normals[i];
  const Vec3 seed = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = (seed - seed.dot(n) * n).normalized();
  const Vec3 w = n.cross(u);
  std::vector<Eigen::Vector2d> mu;
  std::vector<double> g;
  for (int j : d.neighbors[i]) {
    const Vec3 m = (d.normals[j] - d.normals[i].dot(d.normals[j]) * d.normals[i]).normalized();
    mu.emplace_back(m.dot(u), m.dot(w));
    g.push_back(d.hij(i, j));
  }
  return PolygonSupportState::from_normals(std::move(mu), std::move(g));
}

MatX face_support_map(const OrthoschemeDecomposition& d, int i) {
  const auto& nb = d.neighbors[i];
  MatX phi = MatX::Zero(static_cast<int>(nb.size()), d.size());
  for (size_t a = 0; a < nb.size(); ++a) {
    const auto [c, s] = pair_geometry(d.normals[i], d.normals[nb[a]]);
    phi(a, nb[a]) += 1.0 / s;
    phi(a, i) -= c / s;
  }
  return phi;
}

SymMatrix volume_hessian(const OrthoschemeDecomposition& d) {
  const int n = d.size();
  MatX jac(n, n);
  for (int i = 0; i < n; ++i) {
    const MatX phi = face_support_map(d, i);
    const SymMatrix m = polygon_hessian(face_polygon(d, i));
    // ∂A_i/∂h = Φ_iᵀ D²A_i Φ_i h since A_i is quadratic in the h_ij.
    jac.row(i) = (phi.transpose() * (m.dense() * (phi * d.h))).transpose();
  }
  return SymMatrix::symmetrized(jac);
}

SymMatrix volume_hessian(const SupportPolyhedron& s, ChamberMode mode) { return volume_hessian(decompose(s, mode)); }

MatX translation_basis(const std::vector<Vec3>& normals) {
  MatX t(static_cast<int>(normals.size()), 3);
  for (size_t i = 0; i < normals.size(); ++i) t.row(i) = normals[i].transpose();
  return t;
}

GaussRigidityReport gauss_verdict(const SupportPolyhedron& s, const Tolerances& tol, ChamberMode mode) {
  const OrthoschemeDecomposition d = decompose(s, mode);
  GaussRigidityReport r;
  r.hessian = volume_hessian(d);
  r.spectrum = corank_signature(r.hessian, tol);
  r.trivial_basis = translation_basis(d.normals);
  const double hmax = std::max(r.hessian.max_abs(), 1e-300);
  r.trivial_residual = (r.hessian.dense() * r.trivial_basis).cwiseAbs().maxCoeff() / hmax;
  const VecX a = face_areas(d);
  r.homogeneity_residual = (r.hessian * d.h - 2.0 * a).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  r.kernel_angle = r.spectrum.corank == 3 ? subspace_angle(r.spectrum.kernel_basis, r.trivial_basis) : M_PI / 2;
  r.rigid = r.spectrum.corank == 3;
  return r;
}

BasicLemmaResiduals lemma_basic_check(const SupportPolyhedron& s, const VecX& h_dot) {
  const OrthoschemeDecomposition d = decompose(s);
  const OrthoschemeDecomposition v = d.at_heights(h_dot);
  BasicLemmaResiduals r;
  for (int i = 0; i < d.size(); ++i) {
    for (int j : d.neighbors[i]) {
      if (j < i) continue;
      const double lhs = h_dot[i] * d.hij(i, j) + h_dot[j] * d.hij(j, i);
      const double rhs = d.h[i] * v.hij(i, j) + d.h[j] * v.hij(j, i);
      r.edge = std::max(r.edge, std::abs(lhs - rhs));
    }
  }
  for (const auto& t : d.vertex_triples) {
    for (int rot = 0; rot < 3; ++rot) {
      const int i = t[rot], j = t[(rot + 1) % 3], k = t[(rot + 2) % 3];
      const double lhs = v.hij(i, j) * d.hijk(i, j, k) + v.hij(i, k) * d.hijk(i, k, j);
      const double rhs = d.hij(i, j) * v.hijk(i, j, k) + d.hij(i, k) * v.hijk(i, k, j);
      r.corner = std::max(r.corner, std::abs(lhs - rhs));
    }
  }
  return r;
}

VecX area_second_variation(const OrthoschemeDecomposition& d, const VecX& h_dot) {
  const OrthoschemeDecomposition v = d.at_heights(h_dot);
  VecX out = VecX::Zero(d.size());
  for (int i = 0; i < d.size(); ++i) {
    for (int j : d.neighbors[i]) out[i] += v.hij(i, j) * v.edge_length(i, j);
  }
  return out;
}

}  // namespace rigidlab
