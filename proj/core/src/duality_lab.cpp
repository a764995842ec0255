#include "rigidlab/duality_lab.hpp"

#include "rigidlab/errors.hpp"
#include "rigidlab/gauss_rigidity.hpp"
#include "rigidlab/warped_metric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <random>
#include <set>
#include <thread>

namespace rigidlab {

namespace {

// Angle between unit vectors, accurate near 0 and π.
double arc(const Vec4& a, const Vec4& b) { return std::atan2((a - b).norm() * (a + b).norm(), 2.0 * a.dot(b)); }

double tangent_angle(const Vec4& at, const Vec4& a, const Vec4& b) {
  const Vec4 ta = (a - a.dot(at) * at).normalized();
  const Vec4 tb = (b - b.dot(at) * at).normalized();
  return std::atan2((ta - tb).norm() * (ta + tb).norm(), 2.0 * ta.dot(tb));
}

std::set<std::array<int, 3>> sorted_triples(const std::vector<std::array<int, 3>>& triples) {
  std::set<std::array<int, 3>> out;
  for (auto t : triples) {
    std::sort(t.begin(), t.end());
    out.insert(t);
  }
  return out;
}

int worker_count(int shards) {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("RIGIDLAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::min(n, shards);
}

}  // namespace

HessianDuality hessian_duality(const VertexPolyhedron& p) {
  const SupportPolyhedron q = polar_dual(p);
  const VertexPolyhedron qv = from_support(q);
  if (qv.face_count() != p.vertex_count()) {
    throw Error(Errc::IndexMismatch, "polar dual has " + std::to_string(qv.face_count()) + " facets for " +
                                         std::to_string(p.vertex_count()) + " vertices");
  }
  const Combinatorics geometric = vertex_combinatorics(qv, q.normals);
  if (sorted_triples(geometric.vertex_triples) != sorted_triples(q.combinatorics->vertex_triples)) {
    throw Error(Errc::IndexMismatch, "dual vertex triples differ from the primal triangles");
  }
  HessianDuality d;
  d.he = he_hessian(build(triangulate(p), Vec3::Zero()));
  d.vol = volume_hessian(q);
  d.deviation = (d.he.dense() - d.vol.dense()).cwiseAbs().maxCoeff() / std::max(d.he.max_abs(), 1e-300);
  return d;
}

double hessian_duality_check(const VertexPolyhedron& p) { return hessian_duality(p).deviation; }

bool SphericalPolytope::contains(const Vec4& x) const {
  return std::all_of(normals.begin(), normals.end(), [&](const Vec4& u) { return x.dot(u) <= 0.0; });
}

double SphericalPolytope::boundary_area() const {
  double a = 0.0;
  for (double f : facet_areas) a += f;
  return a;
}

double SphericalPolytope::length_pairing() const {
  double s = 0.0;
  for (const auto& e : edges) s += e.length * e.lambda;
  return s;
}

int SphericalPolytope::edge_between_facets(int f, int g) const {
  if (f > g) std::swap(f, g);
  for (size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].f == f && edges[e].g == g) return static_cast<int>(e);
  }
  return -1;
}

SphericalPolytope build_spherical(const std::vector<Vec4>& input, double tol) {
  SphericalPolytope sp;
  for (const Vec4& u : input) {
    if (!(u.norm() > 0.0) || !u.allFinite()) throw Error(Errc::InvalidInput, "zero or non-finite normal");
    sp.normals.push_back(u.normalized());
  }
  const int n = static_cast<int>(sp.normals.size());
  Eigen::MatrixXd u(std::max(n, 1), 4);
  u.setZero();
  for (int k = 0; k < n; ++k) u.row(k) = sp.normals[k].transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(u);
  if (n < 4 || svd.singularValues()[3] < 1e-10) {
    throw Error(Errc::AntipodalPair, "normals do not span R^4, the polytope contains antipodal points");
  }

  const double feas = 1e-9;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        Eigen::Matrix<double, 3, 4> m;
        m.row(0) = sp.normals[a].transpose();
        m.row(1) = sp.normals[b].transpose();
        m.row(2) = sp.normals[c].transpose();
        const Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> s3(m, Eigen::ComputeFullV);
        if (s3.singularValues()[2] < 1e-10) continue;
        Vec4 x = s3.matrixV().col(3);
        auto worst = [&](const Vec4& y) {
          double w = -1.0;
          for (const Vec4& uk : sp.normals) w = std::max(w, y.dot(uk));
          return w;
        };
        if (worst(x) > feas) x = -x;
        if (worst(x) > feas) continue;
        if (std::none_of(sp.vertices.begin(), sp.vertices.end(), [&](const Vec4& v) { return (v - x).norm() < 1e-8; })) {
          sp.vertices.push_back(x);
        }
      }
    }
  }
  if (sp.vertices.size() < 4) throw Error(Errc::EmptyInterior, "fewer than four vertices");
  Vec4 centre = Vec4::Zero();
  for (const Vec4& v : sp.vertices) centre += v;
  if (centre.norm() < 1e-12) throw Error(Errc::EmptyInterior, "vertices balance out");
  centre.normalize();
  for (const Vec4& uk : sp.normals) {
    if (centre.dot(uk) > -tol) throw Error(Errc::EmptyInterior, "no point satisfies every constraint strictly");
  }

  sp.facet_vertices.assign(n, {});
  for (int k = 0; k < n; ++k) {
    for (int v = 0; v < static_cast<int>(sp.vertices.size()); ++v) {
      if (std::abs(sp.vertices[v].dot(sp.normals[k])) <= feas) sp.facet_vertices[k].push_back(v);
    }
    if (sp.facet_vertices[k].size() < 3) throw Error(Errc::EmptyFacet, "constraint " + std::to_string(k) + " is redundant");
  }

  for (int f = 0; f < n; ++f) {
    for (int g = f + 1; g < n; ++g) {
      std::vector<int> common;
      std::set_intersection(sp.facet_vertices[f].begin(), sp.facet_vertices[f].end(), sp.facet_vertices[g].begin(),
                            sp.facet_vertices[g].end(), std::back_inserter(common));
      if (common.size() < 2) continue;
      if (common.size() > 2) throw Error(Errc::BadTopology, "facets share more than an edge");
      SphericalEdge e;
      e.a = common[0];
      e.b = common[1];
      e.f = f;
      e.g = g;
      const Vec4& va = sp.vertices[e.a];
      const Vec4& vb = sp.vertices[e.b];
      e.length = arc(va, vb);
      // Inward tangents of the two facets, orthogonal to the edge's plane.
      Eigen::Matrix<double, 4, 2> span;
      span.col(0) = va;
      span.col(1) = vb;
      const Eigen::HouseholderQR<Eigen::Matrix<double, 4, 2>> qr(span);
      const Eigen::Matrix<double, 4, 2> basis = qr.householderQ() * Eigen::Matrix<double, 4, 2>::Identity();
      auto inward = [&](int facet) {
        Vec4 c = Vec4::Zero();
        for (int v : sp.facet_vertices[facet]) c += sp.vertices[v];
        return Vec4((c - basis * (basis.transpose() * c)).normalized());
      };
      const Vec4 tf = inward(f), tg = inward(g);
      e.lambda = M_PI - std::atan2((tf - tg).norm() * (tf + tg).norm(), 2.0 * tf.dot(tg));
      sp.edges.push_back(e);
    }
  }

  sp.facet_areas.assign(n, 0.0);
  for (int f = 0; f < n; ++f) {
    std::map<int, std::vector<int>> nbr;
    for (const auto& e : sp.edges) {
      if (e.f == f || e.g == f) {
        nbr[e.a].push_back(e.b);
        nbr[e.b].push_back(e.a);
      }
    }
    double angles = 0.0;
    for (int v : sp.facet_vertices[f]) {
      const auto& w = nbr[v];
      if (w.size() != 2) throw Error(Errc::BadTopology, "facet " + std::to_string(f) + " is not a polygon");
      angles += tangent_angle(sp.vertices[v], sp.vertices[w[0]], sp.vertices[w[1]]);
    }
    sp.facet_areas[f] = angles - (static_cast<double>(sp.facet_vertices[f].size()) - 2.0) * M_PI;
  }
  return sp;
}

SphericalPolytope dual(const SphericalPolytope& sp) { return build_spherical(sp.vertices); }

SphericalPolytope orthant_simplex() {
  std::vector<Vec4> u;
  for (int k = 0; k < 4; ++k) u.push_back(-Vec4::Unit(k));
  return build_spherical(u);
}

SphericalPolytope spherical_cube(double t) {
  std::vector<Vec4> u;
  for (int i = 0; i < 3; ++i) {
    for (double sgn : {1.0, -1.0}) {
      Vec4 v = Vec4::Zero();
      v[i] = sgn;
      v[3] = -t;
      u.push_back(v);
    }
  }
  return build_spherical(u);
}

DualityPairing duality_pairing(const SphericalPolytope& p, const SphericalPolytope& pd) {
  if (p.edges.size() != pd.edges.size() || p.vertices.size() != pd.normals.size()) {
    throw Error(Errc::IndexMismatch, "dual has a different face count");
  }
  auto vertex_of = [&](const Vec4& u) {
    for (size_t v = 0; v < pd.vertices.size(); ++v) {
      if ((pd.vertices[v] - u).norm() < 1e-8) return static_cast<int>(v);
    }
    throw Error(Errc::IndexMismatch, "facet normal is not a dual vertex");
  };
  DualityPairing r;
  for (const auto& e : p.edges) {
    const int de = pd.edge_between_facets(e.a, e.b);
    if (de < 0) throw Error(Errc::IndexMismatch, "edge has no dual edge");
    const auto& d = pd.edges[de];
    const std::set<int> ends{vertex_of(p.normals[e.f]), vertex_of(p.normals[e.g])};
    if (ends != std::set<int>{d.a, d.b}) throw Error(Errc::IndexMismatch, "dual edge joins the wrong vertices");
    r.length_vs_dual_lambda = std::max(r.length_vs_dual_lambda, std::abs(e.length - d.lambda));
    r.lambda_vs_dual_length = std::max(r.lambda_vs_dual_length, std::abs(e.lambda - d.length));
  }
  return r;
}

double gauss_bonnet_residual(const SphericalPolytope& p, const SphericalPolytope& pd) {
  return p.boundary_area() + pd.boundary_area() - 4.0 * M_PI;
}

MonteCarloCounts sample_volumes(const SphericalPolytope& p, const SphericalPolytope& pd, std::uint64_t samples,
                                std::uint64_t seed) {
  constexpr int shards = 64;
  std::vector<MonteCarloCounts> part(shards);
  std::atomic<int> next{0};
  auto work = [&]() {
    for (int s = next++; s < shards; s = next++) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(s)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> g;
      MonteCarloCounts c;
      c.samples = samples / shards + (static_cast<std::uint64_t>(s) < samples % shards ? 1 : 0);
      for (std::uint64_t k = 0; k < c.samples; ++k) {
        Vec4 x(g(rng), g(rng), g(rng), g(rng));
        // Membership is scale-invariant, so x need not be normalized.
        if (p.contains(x)) ++c.in_p;
        if (pd.contains(x)) ++c.in_dual;
      }
      part[s] = c;
    }
  };
  const int workers = worker_count(shards);
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  MonteCarloCounts total;
  for (const auto& c : part) {
    total.samples += c.samples;
    total.in_p += c.in_p;
    total.in_dual += c.in_dual;
  }
  return total;
}

McMullenEstimate mcmullen_pi2_check(const SphericalPolytope& p, std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) throw Error(Errc::InvalidInput, "need at least one sample");
  const SphericalPolytope pd = dual(p);
  const MonteCarloCounts c = sample_volumes(p, pd, samples, seed);
  const double n = static_cast<double>(c.samples);
  const double sphere = 2.0 * M_PI * M_PI;
  McMullenEstimate m;
  m.samples = c.samples;
  m.seed = seed;
  m.vol_p = sphere * static_cast<double>(c.in_p) / n;
  m.vol_dual = sphere * static_cast<double>(c.in_dual) / n;
  m.pairing = 0.5 * p.length_pairing();
  m.lhs = m.vol_p + m.pairing + m.vol_dual;
  // P and P* meet only on their boundaries, so the combined indicator is Bernoulli.
  const double q = static_cast<double>(c.in_p + c.in_dual) / n;
  m.std_error = sphere * std::sqrt(std::max(q * (1.0 - q), 1.0 / n) / n);
  m.sigmas = std::abs(m.lhs - M_PI * M_PI) / m.std_error;
  m.pass = m.sigmas <= 4.0;
  return m;
}

SteinerEstimate steiner_checks(const SphericalPolytope& p, std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) throw Error(Errc::InvalidInput, "need at least one sample");
  const SphericalPolytope pd = dual(p);
  const MonteCarloCounts c = sample_volumes(p, pd, samples, seed);
  const double n = static_cast<double>(c.samples);
  const double q = static_cast<double>(c.in_p + c.in_dual) / n;  // (Vol + Vol*)/2π²
  const double areas = (p.boundary_area() + pd.boundary_area()) / (8.0 * M_PI);
  const double lengths = p.length_pairing() / (4.0 * M_PI * M_PI);
  SteinerEstimate s;
  s.sum = q + areas + lengths;
  s.alternating = -q + areas - lengths;
  s.std_error = std::sqrt(std::max(q * (1.0 - q), 1.0 / n) / n);
  s.pass = std::abs(s.sum - 1.0) <= 4.0 * s.std_error && std::abs(s.alternating) <= 4.0 * s.std_error;
  return s;
}

CircleSteiner steiner_circle(double length) {
  if (!(length > 0.0 && length < M_PI)) throw Error(Errc::InvalidInput, "arc length must lie in (0, pi)");
  const double p = length / (2.0 * M_PI);           // ‖P‖
  const double pd = (M_PI - length) / (2.0 * M_PI);  // ‖P*‖
  const double ends = 2.0 * 0.5 * 0.5;               // two endpoints paired with dual endpoints
  CircleSteiner c;
  c.sum = pd + ends + p;
  c.alternating = -pd + ends - p;
  return c;
}

ShearBendResult shear_bend_transfer(const VertexPolyhedron& p, const std::vector<Vec3>& q) {
  if (static_cast<int>(q.size()) != p.vertex_count()) throw Error(Errc::IndexMismatch, "need one velocity per vertex");
  double scale = 1.0;
  for (const Vec3& v : q) scale = std::max(scale, v.norm());
  for (const auto& e : p.edges()) {
    const Vec3 d = p.vertices[e[0]] - p.vertices[e[1]];
    if (std::abs(d.dot(q[e[0]] - q[e[1]])) > 1e-9 * d.squaredNorm() * scale) {
      throw Error(Errc::NotIsometric, "edge " + std::to_string(e[0]) + "-" + std::to_string(e[1]) + " changes length");
    }
  }

  ShearBendResult r;
  r.screws.resize(p.face_count());
  r.h_dot.resize(p.face_count());
  std::map<std::pair<int, int>, int> face_of;
  for (int f = 0; f < p.face_count(); ++f) {
    const auto& face = p.faces[f];
    const int k = static_cast<int>(face.size());
    Eigen::MatrixXd a(3 * k, 6);
    VecX b(3 * k);
    for (int v = 0; v < k; ++v) {
      const Vec3& x = p.vertices[face[v]];
      Eigen::Matrix3d cross;
      cross << 0, -x.z(), x.y(), x.z(), 0, -x.x(), -x.y(), x.x(), 0;
      a.block<3, 3>(3 * v, 0) = -cross;  // η × x = −[x]_× η
      a.block<3, 3>(3 * v, 3) = Eigen::Matrix3d::Identity();
      b.segment<3>(3 * v) = q[face[v]];
      face_of[{face[v], face[(v + 1) % k]}] = f;
    }
    const VecX sol = a.colPivHouseholderQr().solve(b);
    const double res = (a * sol - b).cwiseAbs().maxCoeff();
    r.screw_residual = std::max(r.screw_residual, res);
    if (res > 1e-8 * scale) throw Error(Errc::InconsistentScrew, "face " + std::to_string(f));
    r.screws[f].eta = sol.head<3>();
    r.screws[f].tau = sol.tail<3>();
    r.h_dot[f] = r.screws[f].eta.dot(p.face_normal(f));
  }
  for (const auto& e : p.edges()) {
    const int f = face_of.at({e[0], e[1]});
    const int g = face_of.at({e[1], e[0]});
    const Vec3 d = (p.vertices[e[1]] - p.vertices[e[0]]).normalized();
    r.parallel_residual = std::max(r.parallel_residual, (r.screws[f].eta - r.screws[g].eta).cross(d).norm());
  }
  r.area_residual = (volume_hessian(to_support(p)) * r.h_dot).cwiseAbs().maxCoeff();
  return r;
}

}  // namespace rigidlab
