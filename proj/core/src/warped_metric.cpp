#include "rigidlab/warped_metric.hpp"

#include "rigidlab/errors.hpp"
#include "rigidlab/spherical_link.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace rigidlab {

namespace {

std::string triple_name(int i, int j, int k) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ", " + std::to_string(k) + ")";
}

bool strict_triangle(double a, double b, double c) { return a > 0 && b > 0 && c > 0 && a < b + c && b < a + c && c < a + b; }

double cot(double x) { return std::cos(x) / std::sin(x); }

std::vector<WarpedEdge> edges_of(const std::vector<std::array<int, 3>>& triangles) {
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : triangles) {
    for (int a = 0; a < 3; ++a) {
      const int i = t[a], j = t[(a + 1) % 3];
      if (i == j) throw Error(Errc::BadTopology, "triangle with repeated vertex");
      if (++directed[{i, j}] > 1) {
        throw Error(Errc::BadTopology, "directed edge " + std::to_string(i) + "->" + std::to_string(j) + " used twice");
      }
    }
  }
  std::vector<WarpedEdge> edges;
  for (const auto& [key, count] : directed) {
    if (!directed.count({key.second, key.first})) {
      throw Error(Errc::BadTopology, "edge " + std::to_string(key.first) + "-" + std::to_string(key.second) + " has one side");
    }
    if (key.first < key.second) edges.push_back({key.first, key.second, 0.0, false});
  }
  return edges;
}

}  // namespace

int WarpedPolyhedron::edge_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  const auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(i, j),
                                   [](const WarpedEdge& e, const std::pair<int, int>& k) { return std::tie(e.i, e.j) < std::tie(k.first, k.second); });
  if (it == edges.end() || it->i != i || it->j != j) {
    throw Error(Errc::InvalidInput, "no edge " + std::to_string(i) + "-" + std::to_string(j));
  }
  return static_cast<int>(std::distance(edges.begin(), it));
}

WarpedPolyhedron WarpedPolyhedron::with_radii(const VecX& radii) const {
  if (radii.size() != r.size()) throw Error(Errc::IndexMismatch, "radius vector has the wrong length");
  WarpedPolyhedron out = *this;
  out.r = radii;
  out.positions.clear();
  return out;
}

void check_admissible(const WarpedPolyhedron& w) {
  double scale = w.r.cwiseAbs().maxCoeff();
  for (const auto& e : w.edges) scale = std::max(scale, e.length);
  for (const auto& t : w.triangles) {
    const int i = t[0], j = t[1], k = t[2];
    const double ri = w.r[i], rj = w.r[j], rk = w.r[k];
    const double lij = w.length(i, j), ljk = w.length(j, k), lik = w.length(i, k);
    const bool faces_ok = strict_triangle(ri, rj, lij) && strict_triangle(rj, rk, ljk) && strict_triangle(ri, rk, lik) &&
                          strict_triangle(lij, ljk, lik);
    if (!faces_ok) throw Error(Errc::DegenerateTetrahedron, "face inequality fails in " + triple_name(i, j, k));
    Eigen::Matrix3d g;
    g << ri * ri, 0.5 * (ri * ri + rj * rj - lij * lij), 0.5 * (ri * ri + rk * rk - lik * lik),  //
        0, rj * rj, 0.5 * (rj * rj + rk * rk - ljk * ljk),                                     //
        0, 0, rk * rk;
    g(1, 0) = g(0, 1);
    g(2, 0) = g(0, 2);
    g(2, 1) = g(1, 2);
    const double s3 = scale * scale * scale;
    if (!(g.determinant() > 1e-12 * s3 * s3)) {
      throw Error(Errc::DegenerateTetrahedron, "Cayley-Menger determinant vanishes in " + triple_name(i, j, k));
    }
  }
}

bool is_admissible(const WarpedPolyhedron& w) {
  try {
    check_admissible(w);
    return true;
  } catch (const Error&) {
    return false;
  }
}

WarpedPolyhedron build(const TriangulatedBoundary& t, const Vec3& apex) {
  WarpedPolyhedron w;
  w.triangles = t.triangles;
  const int n = t.base.vertex_count();
  w.positions.resize(n);
  w.r.resize(n);
  for (int i = 0; i < n; ++i) {
    w.positions[i] = t.base.vertices[i] - apex;
    w.r[i] = w.positions[i].norm();
  }
  const double scale = w.r.maxCoeff();
  for (const auto& tri : w.triangles) {
    const Vec3& a = w.positions[tri[0]];
    const Vec3& b = w.positions[tri[1]];
    const Vec3& c = w.positions[tri[2]];
    const Vec3 nrm = (b - a).cross(c - a).normalized();
    if (!(nrm.dot(a) > 1e-9 * scale)) throw Error(Errc::ApexNotInterior, "apex on or beyond face " + triple_name(tri[0], tri[1], tri[2]));
  }
  w.edges = edges_of(w.triangles);
  for (auto& e : w.edges) e.length = (t.base.vertices[e.i] - t.base.vertices[e.j]).norm();
  for (const auto& be : t.edges) {
    if (be.diagonal) w.edges[w.edge_index(be.i, be.j)].diagonal = true;
  }
  check_admissible(w);
  return w;
}

WarpedPolyhedron build_from_metric(const std::vector<std::array<int, 3>>& triangles,
                                   const std::map<std::pair<int, int>, double>& lengths, const VecX& r,
                                   bool require_admissible) {
  WarpedPolyhedron w;
  w.triangles = triangles;
  w.edges = edges_of(triangles);
  int n = 0;
  for (const auto& t : triangles) n = std::max(n, *std::max_element(t.begin(), t.end()) + 1);
  if (r.size() != n) throw Error(Errc::IndexMismatch, "need one radius per vertex");
  w.r = r;
  for (auto& e : w.edges) {
    const auto it = lengths.find({e.i, e.j});
    if (it == lengths.end()) throw Error(Errc::InvalidInput, "missing length " + std::to_string(e.i) + "-" + std::to_string(e.j));
    e.length = it->second;
  }
  for (const auto& t : triangles) {
    if (!strict_triangle(w.length(t[0], t[1]), w.length(t[1], t[2]), w.length(t[0], t[2]))) {
      throw Error(Errc::InvalidTriangle, "boundary triangle " + triple_name(t[0], t[1], t[2]));
    }
  }
  if (require_admissible) check_admissible(w);
  return w;
}

WarpedState evaluate(const WarpedPolyhedron& w) {
  check_admissible(w);
  const int n = w.size();
  const size_t ne = w.edges.size();
  WarpedState st;
  st.omega = VecX::Zero(n);
  st.beta.assign(ne, 0.0);
  st.gamma.assign(ne, 0.0);
  st.rho_ij.assign(ne, 0.0);
  st.rho_ji.assign(ne, 0.0);
  st.phi.assign(ne, 0.0);

  for (size_t e = 0; e < ne; ++e) {
    const auto& ed = w.edges[e];
    st.phi[e] = planar_angle(ed.length, w.r[ed.i], w.r[ed.j]);
    st.rho_ij[e] = planar_angle(w.r[ed.j], w.r[ed.i], ed.length);
    st.rho_ji[e] = planar_angle(w.r[ed.i], w.r[ed.j], ed.length);
  }
  auto rho = [&](int a, int b) {
    const int e = w.edge_index(a, b);
    return a < b ? st.rho_ij[e] : st.rho_ji[e];
  };

  for (const auto& t : w.triangles) {
    for (int rot = 0; rot < 3; ++rot) {
      const int i = t[rot], j = t[(rot + 1) % 3], k = t[(rot + 2) % 3];
      const int eij = w.edge_index(i, j), eik = w.edge_index(i, k), ejk = w.edge_index(j, k);
      // Apex link: vertex p_i sits opposite the side φ_jk.
      st.omega[i] += sph_angle(st.phi[ejk], st.phi[eij], st.phi[eik]);
      // Link at p_i: the dihedral along p_ip_j sits opposite ρ_ik.
      const double theta = planar_angle(w.edges[ejk].length, w.edges[eij].length, w.edges[eik].length);
      const double dihedral = sph_angle(rho(i, k), rho(i, j), theta);
      (i < j ? st.beta : st.gamma)[eij] = dihedral;
    }
  }
  st.kappa = VecX::Constant(n, 2.0 * M_PI) - st.omega;
  st.lambda.resize(ne);
  for (size_t e = 0; e < ne; ++e) st.lambda[e] = M_PI - st.beta[e] - st.gamma[e];
  return st;
}

VecX curvatures(const WarpedPolyhedron& w) { return evaluate(w).kappa; }

HilbertEinsteinValue hilbert_einstein_terms(const WarpedPolyhedron& w) {
  const WarpedState st = evaluate(w);
  HilbertEinsteinValue v;
  v.value = w.r.dot(st.kappa);
  VecX k_total = st.kappa;
  for (size_t e = 0; e < w.edges.size(); ++e) {
    const auto& ed = w.edges[e];
    v.value += ed.length * st.lambda[e];
    k_total[ed.i] += std::cos(st.rho_ij[e]) * st.lambda[e];
    k_total[ed.j] += std::cos(st.rho_ji[e]) * st.lambda[e];
  }
  v.via_total = w.r.dot(k_total);
  v.deviation = std::abs(v.value - v.via_total) / std::max(std::abs(v.value), 1e-300);
  return v;
}

double hilbert_einstein(const WarpedPolyhedron& w) {
  const HilbertEinsteinValue v = hilbert_einstein_terms(w);
  if (v.deviation > 1e-10 && std::abs(v.value - v.via_total) > 1e-14) {
    std::ostringstream msg;
    msg << "HE evaluations disagree: " << v.value << " vs " << v.via_total;
    throw Error(Errc::InvalidInput, msg.str());
  }
  return v.value;
}

VecX he_gradient(const WarpedPolyhedron& w) { return curvatures(w); }

SymMatrix he_hessian(const WarpedPolyhedron& w, const WarpedState& st) {
  SymMatrix h(w.size());
  for (size_t e = 0; e < w.edges.size(); ++e) {
    const auto& ed = w.edges[e];
    const double off = (cot(st.beta[e]) + cot(st.gamma[e])) / (ed.length * std::sin(st.rho_ij[e]) * std::sin(st.rho_ji[e]));
    h.add(ed.i, ed.j, off);
    h.add(ed.i, ed.i, -std::cos(st.phi[e]) * off);
    h.add(ed.j, ed.j, -std::cos(st.phi[e]) * off);
  }
  return h;
}

SymMatrix he_hessian(const WarpedPolyhedron& w) { return he_hessian(w, evaluate(w)); }

std::vector<Vec3> develop(const WarpedPolyhedron& w) {
  check_admissible(w);
  const int n = w.size();
  std::vector<Vec3> p(n);
  std::vector<bool> placed(n, false);

  // x with |x| = r_c, |x − a| = d_a, |x − b| = d_b and det(a, b, x) > 0.
  auto place = [&](const Vec3& a, const Vec3& b, double rc, double da, double db) {
    const Vec3 axb = a.cross(b);
    Eigen::Matrix2d g;
    g << a.dot(a), a.dot(b), a.dot(b), b.dot(b);
    const Eigen::Vector2d rhs(0.5 * (rc * rc + a.dot(a) - da * da), 0.5 * (rc * rc + b.dot(b) - db * db));
    const Eigen::Vector2d ab = g.inverse() * rhs;
    const Vec3 in_plane = ab[0] * a + ab[1] * b;
    const double z2 = std::max(rc * rc - in_plane.squaredNorm(), 0.0);
    return Vec3(in_plane + std::sqrt(z2) / axb.norm() * axb);
  };

  const auto& t0 = w.triangles.front();
  const int i0 = t0[0], j0 = t0[1];
  p[i0] = Vec3(w.r[i0], 0, 0);
  const double phi = planar_angle(w.length(i0, j0), w.r[i0], w.r[j0]);
  p[j0] = w.r[j0] * Vec3(std::cos(phi), std::sin(phi), 0);
  placed[i0] = placed[j0] = true;

  std::vector<bool> done(w.triangles.size(), false);
  bool progress = true;
  while (progress) {
    progress = false;
    for (size_t f = 0; f < w.triangles.size(); ++f) {
      if (done[f]) continue;
      const auto& t = w.triangles[f];
      for (int rot = 0; rot < 3; ++rot) {
        const int a = t[rot], b = t[(rot + 1) % 3], c = t[(rot + 2) % 3];
        if (placed[a] && placed[b]) {
          if (!placed[c]) {
            p[c] = place(p[a], p[b], w.r[c], w.length(a, c), w.length(b, c));
            placed[c] = true;
          }
          done[f] = true;
          progress = true;
          break;
        }
      }
    }
  }
  if (std::find(placed.begin(), placed.end(), false) != placed.end()) {
    throw Error(Errc::BadTopology, "boundary triangulation is not connected");
  }
  return p;
}

MatX metric_trivial_basis(const WarpedPolyhedron& w) {
  const std::vector<Vec3> p = w.positions.empty() ? develop(w) : w.positions;
  MatX t(w.size(), 3);
  for (int i = 0; i < w.size(); ++i) t.row(i) = (p[i] / w.r[i]).transpose();
  return t;
}

MetricRigidityReport metric_verdict(const WarpedPolyhedron& w, const Tolerances& tol) {
  const WarpedState st = evaluate(w);
  MetricRigidityReport rep;
  rep.hessian = he_hessian(w, st);
  rep.spectrum = corank_signature(rep.hessian, tol);
  rep.trivial_basis = metric_trivial_basis(w);
  rep.trivial_residual =
      (rep.hessian.dense() * rep.trivial_basis).cwiseAbs().maxCoeff() / std::max(rep.hessian.max_abs(), 1e-300);
  rep.kernel_angle = rep.spectrum.corank == 3 ? subspace_angle(rep.spectrum.kernel_basis, rep.trivial_basis) : M_PI / 2;
  rep.max_abs_kappa = st.kappa.cwiseAbs().maxCoeff();
  rep.rigid = rep.spectrum.corank == 3;
  return rep;
}

namespace {

std::vector<double> split_cosines_ij(const WarpedState& st) {
  std::vector<double> s(st.rho_ij.size());
  for (size_t e = 0; e < s.size(); ++e) s[e] = std::cos(st.rho_ij[e]);
  return s;
}

std::vector<double> split_cosines_ji(const WarpedState& st) {
  std::vector<double> s(st.rho_ji.size());
  for (size_t e = 0; e < s.size(); ++e) s[e] = std::cos(st.rho_ji[e]);
  return s;
}

struct Rates {
  WarpedState at;
  VecX kappa_dot;
  std::vector<double> lambda_dot, s_ij_dot, s_ji_dot;
};

Rates rates(const WarpedPolyhedron& w, const VecX& r_dot, double step) {
  const double norm = r_dot.cwiseAbs().maxCoeff();
  const double h = norm > 0 ? step * w.r.cwiseAbs().maxCoeff() / norm : step;
  const WarpedState plus = evaluate(w.with_radii(w.r + h * r_dot));
  const WarpedState minus = evaluate(w.with_radii(w.r - h * r_dot));
  Rates out;
  out.at = evaluate(w);
  out.kappa_dot = (plus.kappa - minus.kappa) / (2 * h);
  const size_t ne = w.edges.size();
  out.lambda_dot.resize(ne);
  out.s_ij_dot.resize(ne);
  out.s_ji_dot.resize(ne);
  const auto sp_ij = split_cosines_ij(plus), sm_ij = split_cosines_ij(minus);
  const auto sp_ji = split_cosines_ji(plus), sm_ji = split_cosines_ji(minus);
  for (size_t e = 0; e < ne; ++e) {
    out.lambda_dot[e] = (plus.lambda[e] - minus.lambda[e]) / (2 * h);
    out.s_ij_dot[e] = (sp_ij[e] - sm_ij[e]) / (2 * h);
    out.s_ji_dot[e] = (sp_ji[e] - sm_ji[e]) / (2 * h);
  }
  return out;
}

}  // namespace

double edge_split_residual(const WarpedPolyhedron& w) {
  const WarpedState st = evaluate(w);
  double worst = 0.0;
  for (size_t e = 0; e < w.edges.size(); ++e) {
    const auto& ed = w.edges[e];
    const double split = w.r[ed.i] * std::cos(st.rho_ij[e]) + w.r[ed.j] * std::cos(st.rho_ji[e]);
    worst = std::max(worst, std::abs(ed.length - split) / ed.length);
  }
  return worst;
}

double curvature_rate_residual(const WarpedPolyhedron& w, const VecX& r_dot, double step) {
  const Rates rt = rates(w, r_dot, step);
  VecX sum = rt.kappa_dot;
  for (size_t e = 0; e < w.edges.size(); ++e) {
    const auto& ed = w.edges[e];
    sum[ed.i] += std::cos(rt.at.rho_ij[e]) * rt.lambda_dot[e];
    sum[ed.j] += std::cos(rt.at.rho_ji[e]) * rt.lambda_dot[e];
  }
  return sum.cwiseAbs().maxCoeff();
}

double split_rate_residual(const WarpedPolyhedron& w, const VecX& r_dot, double step) {
  const Rates rt = rates(w, r_dot, step);
  double worst = 0.0;
  for (size_t e = 0; e < w.edges.size(); ++e) {
    const auto& ed = w.edges[e];
    const double v = r_dot[ed.i] * std::cos(rt.at.rho_ij[e]) + r_dot[ed.j] * std::cos(rt.at.rho_ji[e]) +
                     w.r[ed.i] * rt.s_ij_dot[e] + w.r[ed.j] * rt.s_ji_dot[e];
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

SecondVariation second_variation_identity(const WarpedPolyhedron& w, const VecX& r_dot, double step) {
  const Rates rt = rates(w, r_dot, step);
  SecondVariation sv;
  sv.quadratic = he_hessian(w, rt.at).quadratic_form(r_dot);
  sv.curvature = r_dot.dot(rt.kappa_dot);
  for (size_t e = 0; e < w.edges.size(); ++e) {
    const auto& ed = w.edges[e];
    sv.link += (w.r[ed.i] * rt.s_ij_dot[e] + w.r[ed.j] * rt.s_ji_dot[e]) * rt.lambda_dot[e];
  }
  sv.deviation = std::max({std::abs(sv.quadratic - sv.curvature), std::abs(sv.quadratic - sv.link),
                           std::abs(sv.curvature - sv.link)});
  return sv;
}

VecX cone_defects(const WarpedPolyhedron& w) {
  VecX d = VecX::Constant(w.size(), 2.0 * M_PI);
  for (const auto& t : w.triangles) {
    for (int rot = 0; rot < 3; ++rot) {
      const int i = t[rot], j = t[(rot + 1) % 3], k = t[(rot + 2) % 3];
      d[i] -= planar_angle(w.length(j, k), w.length(i, j), w.length(i, k));
    }
  }
  return d;
}

std::string edge_diagnostics_csv(const WarpedPolyhedron& w) {
  const WarpedState st = evaluate(w);
  std::string out = "i,j,length,lambda,rho_ij,rho_ji\n";
  char buf[256];
  for (size_t e = 0; e < w.edges.size(); ++e) {
    const auto& ed = w.edges[e];
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g\n", ed.i, ed.j, ed.length, st.lambda[e], st.rho_ij[e],
                  st.rho_ji[e]);
    out += buf;
  }
  return out;
}

}  // namespace rigidlab
