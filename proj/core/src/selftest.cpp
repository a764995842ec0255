#include "rigidlab/selftest.hpp"

#include "rigidlab/duality_lab.hpp"
#include "rigidlab/errors.hpp"
#include "rigidlab/gauss_rigidity.hpp"
#include "rigidlab/reconstruction_solvers.hpp"
#include "rigidlab/solids.hpp"
#include "rigidlab/spherical_link.hpp"
#include "rigidlab/warped_metric.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

namespace rigidlab {

namespace {

// Worst residual against a bound, plus any hard failures.
struct Tally {
  double worst = 0.0;
  double bound = 0.0;
  int trials = 0;
  int failures = 0;
  std::string first_failure;

  explicit Tally(double b) : bound(b) {}

  void residual(double r, const std::string& what) {
    ++trials;
    if (!(r <= bound)) fail(what + " residual " + std::to_string(r));
    if (std::isfinite(r)) worst = std::max(worst, r);
    else worst = r;
  }
  void require(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }
  void fail(const std::string& what) {
    if (failures++ == 0) first_failure = what;
  }
};

Vec3 centroid(const VertexPolyhedron& p) {
  Vec3 c = Vec3::Zero();
  for (const Vec3& v : p.vertices) c += v;
  return c / p.vertex_count();
}

// An interior apex away from the origin.
Vec3 off_centre_apex(const VertexPolyhedron& p) { return 0.5 * centroid(p) + 0.05 * Vec3(1.0, -0.6, 0.8); }

VecX random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

VecX jitter(const VecX& r, double amp, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VecX out = r;
  for (int i = 0; i < r.size(); ++i) out[i] *= 1.0 + amp * u(rng);
  return out;
}

WarpedPolyhedron jittered(const WarpedPolyhedron& w, double amp, std::mt19937_64& rng) {
  for (;;) {
    WarpedPolyhedron out = w.with_radii(jitter(w.r, amp, rng));
    if (is_admissible(out)) return out;
  }
}

WarpedSphericalPolygon random_flat_link(int m, std::mt19937_64& rng, double rho_lo, double rho_hi) {
  std::uniform_real_distribution<double> ur(rho_lo, rho_hi);
  std::uniform_real_distribution<double> ua(0.5, 1.5);
  std::vector<double> rho(m), w(m);
  double sum = 0.0;
  for (int j = 0; j < m; ++j) {
    rho[j] = ur(rng);
    sum += (w[j] = ua(rng));
  }
  for (double& x : w) x *= 2.0 * M_PI / sum;
  return WarpedSphericalPolygon::flat(rho, w);
}

SphericalTriangleState random_triangle(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.15, M_PI - 0.15);
  for (;;) {
    const double a = u(rng), b = u(rng), c = u(rng);
    if (a < b + c - 0.1 && b < a + c - 0.1 && c < a + b - 0.1 && a + b + c < 2 * M_PI - 0.3) {
      return SphericalTriangleState::from_sides(a, b, c);
    }
  }
}

// 1. Gauss rigidity.
void gauss_rigidity_criterion(const SelftestOptions& opt, Tally& t) {
  std::mt19937_64 rng(opt.seed);
  std::vector<std::pair<std::string, VertexPolyhedron>> cases{{"cube", solids::cube()},
                                                              {"dodecahedron", solids::dodecahedron()}};
  for (int k = 0; k < 10; ++k) cases.emplace_back("random simple #" + std::to_string(k), solids::random_simple(6 + k, rng));
  for (const auto& [name, p] : cases) {
    const GaussRigidityReport r = gauss_verdict(to_support(p), opt.tol);
    t.require(r.spectrum.corank == 3, name + ": corank " + std::to_string(r.spectrum.corank));
    t.residual(r.kernel_angle, name + " kernel angle");
  }
}

// 2. Metric rigidity with two apexes.
void metric_rigidity_criterion(const SelftestOptions& opt, Tally& t) {
  std::mt19937_64 rng(opt.seed + 1);
  std::vector<std::pair<std::string, VertexPolyhedron>> cases{
      {"tetrahedron", solids::tetrahedron()}, {"cube", solids::cube()}, {"icosahedron", solids::icosahedron()}};
  for (int k = 0; k < 10; ++k) {
    cases.emplace_back("random simplicial #" + std::to_string(k), solids::random_simplicial(6 + k, rng));
  }
  for (const auto& [name, p] : cases) {
    for (const Vec3& apex : {Vec3(Vec3::Zero()), off_centre_apex(p)}) {
      const MetricRigidityReport r = metric_verdict(build(triangulate(p), apex), opt.tol);
      t.require(r.spectrum.corank == 3, name + ": corank " + std::to_string(r.spectrum.corank));
      t.residual(r.kernel_angle, name + " kernel angle");
    }
  }
}

// 3. Circulant spectra of regular polygons and regular links.
void circulant_criterion(const SelftestOptions&, Tally& t) {
  for (int m = 3; m <= 12; ++m) {
    const double a = 2.0 * M_PI / m;
    std::vector<double> closed;
    for (int k = 1; k <= m; ++k) closed.push_back(2.0 * (std::cos(k * a) - std::cos(a)) / std::sin(a));
    std::sort(closed.begin(), closed.end());
    const SpectrumSummary poly = eigen_sym(polygon_hessian(PolygonSupportState::regular(m)));
    for (int k = 0; k < m; ++k) t.residual(std::abs(poly.eigenvalues[k] - closed[k]), "polygon m=" + std::to_string(m));
    for (double rho : {0.6, 1.2, 2.0}) {
      const SpectrumSummary link = eigen_sym(d2k_matrix(WarpedSphericalPolygon::regular(m, rho)));
      const double s2 = std::sin(rho) * std::sin(rho);
      for (int k = 0; k < m; ++k) {
        t.residual(std::abs(link.eigenvalues[k] - closed[k] / s2), "link m=" + std::to_string(m));
      }
    }
  }
}

// 4. D²HE(P) = D²Vol(P*).
void duality_criterion(const SelftestOptions& opt, Tally& t) {
  std::mt19937_64 rng(opt.seed + 3);
  t.residual(hessian_duality_check(solids::tetrahedron()), "tetrahedron");
  t.residual(hessian_duality_check(solids::octahedron()), "octahedron");
  for (int k = 0; k < 10; ++k) {
    t.residual(hessian_duality_check(solids::random_simplicial(6 + k, rng)), "random simplicial #" + std::to_string(k));
  }
}

// 5. Schläfli gradients against finite differences.
void gradient_criterion(const SelftestOptions& opt, Tally& t) {
  std::mt19937_64 rng(opt.seed + 4);
  for (int k = 0; k < 10; ++k) {
    const SupportPolyhedron s = with_combinatorics(to_support(solids::random_simple(6 + k, rng)));
    const ScalarField vol = [&](const VecX& h) { return enclosed_volume(from_support(s.with_heights(h))); };
    const VecX fd = fd_gradient(vol, s.heights, opt.tol);
    t.residual(rel_max_deviation(face_areas(decompose(s)), fd), "dVol/dh");
  }
  for (int k = 0; k < 10; ++k) {
    const VertexPolyhedron p = solids::random_simplicial(6 + k, rng);
    const WarpedPolyhedron w = jittered(build(triangulate(p), k % 2 ? off_centre_apex(p) : Vec3::Zero()), 0.02, rng);
    const ScalarField he = [&](const VecX& r) { return hilbert_einstein(w.with_radii(r)); };
    t.residual(rel_max_deviation(he_gradient(w), fd_gradient(he, w.r, opt.tol)), "dHE/dr");
  }
}

// 6. Variation identities, 100 trials each.
void identity_criterion(const SelftestOptions& opt, Tally& t, std::string& detail) {
  constexpr int kTrials = 100;
  std::mt19937_64 rng(opt.seed + 5);
  double worst[6] = {0, 0, 0, 0, 0, 0};
  auto note = [&](int k, double r, const char* what) {
    worst[k] = std::max(worst[k], r);
    t.residual(r, what);
  };

  for (int k = 0; k < kTrials; ++k) {
    const SupportPolyhedron s = with_combinatorics(to_support(solids::random_simple(6 + k % 8, rng)));
    const BasicLemmaResiduals b = lemma_basic_check(s, random_vector(s.size(), rng));
    note(0, std::max(b.edge, b.corner), "basic lemma");
  }

  std::vector<WarpedPolyhedron> states;
  for (int k = 0; k < 20; ++k) {
    const VertexPolyhedron p = solids::random_simplicial(6 + k % 7, rng);
    const WarpedPolyhedron w0 = build(triangulate(p), k % 2 ? off_centre_apex(p) : Vec3::Zero());
    for (int j = 0; j < kTrials / 20; ++j) states.push_back(jittered(w0, 0.02, rng));
  }
  for (const WarpedPolyhedron& w : states) {
    const VecX rd = random_vector(w.size(), rng).normalized();
    note(1, edge_split_residual(w), "edge split");
    note(2, curvature_rate_residual(w, rd), "curvature rate");
    note(3, split_rate_residual(w, rd), "split rate");
    const SecondVariation sv = second_variation_identity(w, rd);
    note(4, sv.deviation / std::max(1.0, std::abs(sv.quadratic)), "second variation");
  }

  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < kTrials; ++k) {
    note(5, dot_abc_residual(random_triangle(rng), u(rng), u(rng)), "spherical angle variation");
  }

  char buf[256];
  std::snprintf(buf, sizeof buf, "basic %.1e, split %.1e, curvature rate %.1e, split rate %.1e, HE'' %.1e, angles %.1e",
                worst[0], worst[1], worst[2], worst[3], worst[4], worst[5]);
  detail = buf;
}

// 7. D²K(s⁰, s⁰) = 2 Area(S*_E) on flat links.
void dual_area_criterion(const SelftestOptions& opt, Tally& t, std::string& detail) {
  std::mt19937_64 rng(opt.seed + 6);
  int obtuse = 0;
  for (int k = 0; k < 24; ++k) {
    const WarpedSphericalPolygon p = random_flat_link(3 + k % 8, rng, 0.3, 2.2);
    if (*std::max_element(p.rho.begin(), p.rho.end()) > M_PI / 2) ++obtuse;
    const DualAreaResult r = dual_area_identity(p);
    t.residual(std::abs(r.lhs - r.rhs), "flat link");
  }
  t.require(obtuse > 0, "no link with a radial side beyond pi/2");
  detail = std::to_string(obtuse) + " links with some rho > pi/2";
}

// 8. Spherical identities.
void spherical_criterion(const SelftestOptions& opt, Tally& t, std::string& detail) {
  const std::vector<std::pair<std::string, SphericalPolytope>> cases{
      {"orthant simplex", orthant_simplex()}, {"spherical cube 0.3", spherical_cube(0.3)}};
  double worst_sigma = 0.0;
  for (const auto& [name, p] : cases) {
    const SphericalPolytope pd = dual(p);
    t.residual(std::abs(gauss_bonnet_residual(p, pd)), name + " Gauss-Bonnet");
    for (std::uint64_t s = 0; s < 3; ++s) {
      const std::uint64_t seed = opt.seed + 100 * s;
      const McMullenEstimate m = mcmullen_pi2_check(p, static_cast<std::uint64_t>(opt.samples), seed);
      t.require(m.pass, name + ": pi^2 identity off by " + std::to_string(m.sigmas) + " sigma");
      worst_sigma = std::max(worst_sigma, m.sigmas);
      const SteinerEstimate st = steiner_checks(p, static_cast<std::uint64_t>(opt.samples), seed + 1);
      t.require(st.pass, name + ": Steiner sums outside 4 sigma");
      worst_sigma = std::max({worst_sigma, std::abs(st.sum - 1.0) / st.std_error, std::abs(st.alternating) / st.std_error});
    }
  }
  for (double l : {0.2, 1.0, 2.5}) {
    const CircleSteiner c = steiner_circle(l);
    t.residual(std::max(std::abs(c.sum - 1.0), std::abs(c.alternating)), "circle Steiner");
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst Monte Carlo deviation %.2f sigma at %lld samples", worst_sigma,
                static_cast<long long>(opt.samples));
  detail = buf;
}

// 9. Minkowski solver.
void minkowski_criterion(const SelftestOptions&, Tally& t, std::string& detail) {
  auto axis = [](std::array<double, 6> c) {
    MinkowskiProblem mp;
    for (int k = 0; k < 3; ++k) {
      mp.normals.push_back(Vec3::Unit(k));
      mp.normals.push_back(-Vec3::Unit(k));
    }
    mp.areas = Eigen::Map<const VecX>(c.data(), 6);
    return mp;
  };
  const MinkowskiResult cube = minkowski_solve(axis({1, 1, 1, 1, 1, 1}));
  t.require(cube.trace.status == SolveStatus::Converged, "cube did not converge");
  for (int i = 0; i < 6; ++i) {
    const double rel = std::abs(cube.polyhedron.heights[i] - 0.5) / 0.5;
    if (rel > 1e-9) t.fail("cube support " + std::to_string(i) + " off by " + std::to_string(rel));
  }
  const MinkowskiResult box = minkowski_solve(axis({4, 4, 1, 1, 1, 1}));
  t.require(box.trace.status == SolveStatus::Converged, "box did not converge");
  t.require(box.trace.iterations() <= 100, "box took " + std::to_string(box.trace.iterations()) + " iterations");
  t.residual(cube.max_area_error, "cube areas");
  t.residual(box.max_area_error, "box areas");
  detail = "box in " + std::to_string(box.trace.iterations()) + " iterations";
}

// 10. Alexandrov continuation.
void alexandrov_criterion(const SelftestOptions& opt, Tally& t, std::string& detail) {
  std::mt19937_64 rng(opt.seed + 9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int most = 0;
  double worst_kappa = 0.0;
  for (const auto& [name, p] : {std::pair<std::string, VertexPolyhedron>{"tetrahedron", solids::tetrahedron()},
                                {"cube", solids::cube()}}) {
    std::vector<std::vector<double>> lambdas;
    for (int start = 0; start < 2; ++start) {
      AlexandrovProblem ap = alexandrov_problem(p, Vec3::Zero());
      for (int i = 0; i < ap.r_init.size(); ++i) ap.r_init[i] *= 1.0 + 0.01 * u(rng);
      const AlexandrovResult r = alexandrov_continuation(ap);
      const double kinf = evaluate(r.polyhedron).kappa.cwiseAbs().maxCoeff();
      worst_kappa = std::max(worst_kappa, kinf);
      most = std::max(most, r.trace.iterations());
      t.require(r.trace.status == SolveStatus::Converged, name + ": " + to_string(r.trace.status));
      t.require(kinf <= 1e-10, name + ": kappa " + std::to_string(kinf));
      t.require(r.trace.iterations() <= 30, name + ": " + std::to_string(r.trace.iterations()) + " iterations");
      lambdas.push_back(evaluate(r.polyhedron).lambda);
    }
    double d = 0.0;
    for (size_t e = 0; e < lambdas[0].size(); ++e) d = std::max(d, std::abs(lambdas[0][e] - lambdas[1][e]));
    t.residual(d, name + " dihedral agreement");
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max |kappa| %.1e, at most %d iterations", worst_kappa, most);
  detail = buf;
}

struct Spec {
  const char* title;
  double bound;
  double budget;
};

constexpr Spec kSpecs[kCriterionCount] = {
    {"corank-3 Gauss rigidity", 1e-6, 5.0},
    {"corank-3 metric rigidity", 1e-6, 10.0},
    {"circulant spectra", 1e-10, 0.0},
    {"Hessian duality", 1e-7, 0.0},
    {"gradient checks", 1e-6, 0.0},
    {"variation identities", 1e-7, 0.0},
    {"dual-area identity", 1e-9, 0.0},
    {"spherical identities", 1e-9, 60.0},
    {"Minkowski solver", 1e-6, 0.0},
    {"Alexandrov continuation", 1e-7, 0.0},
};

}  // namespace

CriterionResult run_criterion(int id, const SelftestOptions& opt) {
  if (id < 1 || id > kCriterionCount) throw Error(Errc::InvalidInput, "criterion id must be 1..10");
  const Spec& sp = kSpecs[id - 1];
  CriterionResult out;
  out.id = id;
  out.title = sp.title;
  out.budget_seconds = sp.budget;
  Tally t(sp.bound);
  std::string detail;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: gauss_rigidity_criterion(opt, t); break;
      case 2: metric_rigidity_criterion(opt, t); break;
      case 3: circulant_criterion(opt, t); break;
      case 4: duality_criterion(opt, t); break;
      case 5: gradient_criterion(opt, t); break;
      case 6: identity_criterion(opt, t, detail); break;
      case 7: dual_area_criterion(opt, t, detail); break;
      case 8: spherical_criterion(opt, t, detail); break;
      case 9: minkowski_criterion(opt, t, detail); break;
      case 10: alexandrov_criterion(opt, t, detail); break;
    }
  } catch (const std::exception& e) {
    t.fail(std::string("exception: ") + e.what());
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.worst = t.worst;
  out.bound = t.bound;
  out.trials = t.trials;
  out.pass = t.failures == 0;
  if (sp.budget > 0 && out.seconds > sp.budget) {
    out.pass = false;
    if (t.failures == 0) t.first_failure = "over the time budget";
  }
  out.detail = out.pass ? detail : t.first_failure;
  return out;
}

std::vector<CriterionResult> run_acceptance(const SelftestOptions& opt, const std::vector<int>& only) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (only.empty() || std::find(only.begin(), only.end(), id) != only.end()) out.push_back(run_criterion(id, opt));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "criterion %2d %s  %-26s worst %.2e <= %.0e  (%d checks, %.2f s", r.id,
                r.pass ? "PASS" : "FAIL", r.title.c_str(), r.worst, r.bound, r.trials, r.seconds);
  std::string line = buf;
  if (r.budget_seconds > 0) {
    std::snprintf(buf, sizeof buf, " of %.0f s", r.budget_seconds);
    line += buf;
  }
  line += ")";
  if (!r.detail.empty()) line += "  " + r.detail;
  return line;
}

}  // namespace rigidlab
