#include <doctest.h>

#include "rigidlab/duality_lab.hpp"
#include "rigidlab/errors.hpp"
#include "rigidlab/gauss_rigidity.hpp"
#include "rigidlab/solids.hpp"

#include <cmath>
#include <cstdlib>
#include <random>

using namespace rigidlab;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidInput;
}

// Rotates the spherical polytope by a random orthogonal 4x4 matrix.
SphericalPolytope rotated(const SphericalPolytope& sp, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = g(rng);
  const Eigen::Matrix4d q = Eigen::HouseholderQR<Eigen::Matrix4d>(m).householderQ();
  std::vector<Vec4> u;
  for (const Vec4& n : sp.normals) u.push_back(q * n);
  return build_spherical(u);
}

}  // namespace

TEST_CASE("Hessian duality on regular and perturbed solids") {
  CHECK(hessian_duality_check(solids::tetrahedron()) < 1e-7);
  CHECK(hessian_duality_check(solids::octahedron()) < 1e-7);
  CHECK(hessian_duality_check(solids::icosahedron()) < 1e-7);
  CHECK(hessian_duality_check(solids::cube()) < 1e-7);
  std::mt19937_64 rng(41);
  // Hexahedral vertices: a perturbed cube, triangulated on the primal side.
  CHECK(hessian_duality_check(solids::perturb_vertices(solids::cube(), 0.05, rng)) < 1e-7);
  for (int t = 0; t < 10; ++t) CHECK(hessian_duality_check(solids::random_simplicial(6 + t, rng)) < 1e-7);
}

TEST_CASE("Hessian duality entries are the shared closed form") {
  const HessianDuality d = hessian_duality(solids::octahedron());
  // Octahedron, circumradius 1: the dual is the cube of edge 2 with h = 1, so
  // D²Vol is twice the adjacency matrix of the octahedral graph.
  const SpectrumSummary sp = eigen_sym(d.vol);
  CHECK(sp.eigenvalues.back() == doctest::Approx(8.0));
  CHECK(sp.eigenvalues.front() == doctest::Approx(-4.0));
}

TEST_CASE("Hessian duality needs the origin inside") {
  CHECK(code_of([] { hessian_duality_check(solids::cube().translated(Vec3(0.6, 0, 0))); }) == Errc::OriginNotInterior);
}

TEST_CASE("orthant simplex is self-dual") {
  const SphericalPolytope p = orthant_simplex();
  const SphericalPolytope pd = dual(p);
  CHECK(p.vertices.size() == 4);
  CHECK(p.edges.size() == 6);
  for (const auto& e : p.edges) {
    CHECK(e.length == doctest::Approx(M_PI / 2));
    CHECK(e.lambda == doctest::Approx(M_PI / 2));
  }
  for (double a : p.facet_areas) CHECK(a == doctest::Approx(M_PI / 2));
  const DualityPairing pr = duality_pairing(p, pd);
  CHECK(pr.length_vs_dual_lambda < 1e-9);
  CHECK(pr.lambda_vs_dual_length < 1e-9);
  CHECK(std::abs(gauss_bonnet_residual(p, pd)) < 1e-9);
}

TEST_CASE("spherical cube pairs with an octahedron-like dual") {
  for (double t : {0.05, 0.3, 0.8, 2.0}) {
    const SphericalPolytope p = spherical_cube(t);
    const SphericalPolytope pd = dual(p);
    CHECK(p.vertices.size() == 8);
    CHECK(p.edges.size() == 12);
    CHECK(pd.vertices.size() == 6);
    CHECK(pd.normals.size() == 8);
    const DualityPairing pr = duality_pairing(p, pd);
    CHECK(pr.length_vs_dual_lambda < 1e-9);
    CHECK(pr.lambda_vs_dual_length < 1e-9);
    CHECK(std::abs(gauss_bonnet_residual(p, pd)) < 1e-9);
  }
}

TEST_CASE("double dual recovers the facet planes") {
  std::mt19937_64 rng(42);
  const SphericalPolytope p = rotated(spherical_cube(0.4), rng);
  const SphericalPolytope pdd = dual(dual(p));
  REQUIRE(pdd.normals.size() == p.normals.size());
  for (const Vec4& u : p.normals) {
    double best = 1e9;
    for (const Vec4& v : pdd.normals) best = std::min(best, (u - v).norm());
    CHECK(best < 1e-9);
  }
}

TEST_CASE("Gauss-Bonnet on random spherical polytopes") {
  std::mt19937_64 rng(43);
  int built = 0;
  for (int t = 0; t < 40 && built < 10; ++t) {
    // Random Euclidean polytope lifted to the cap around the north pole.
    const VertexPolyhedron e = solids::random_simplicial(6 + t % 5, rng);
    std::vector<Vec4> u;
    const SupportPolyhedron s = to_support(e);
    for (int i = 0; i < s.size(); ++i) u.emplace_back(s.normals[i].x(), s.normals[i].y(), s.normals[i].z(), -0.4 * s.heights[i]);
    const SphericalPolytope p = build_spherical(u);
    const SphericalPolytope pd = dual(p);
    CHECK(std::abs(gauss_bonnet_residual(p, pd)) < 1e-9);
    const DualityPairing pr = duality_pairing(p, pd);
    CHECK(pr.length_vs_dual_lambda < 1e-9);
    ++built;
  }
  CHECK(built == 10);
}

TEST_CASE("spherical construction errors") {
  std::vector<Vec4> three{-Vec4::Unit(0), -Vec4::Unit(1), -Vec4::Unit(2)};
  CHECK(code_of([&] { build_spherical(three); }) == Errc::AntipodalPair);
  std::vector<Vec4> flat{-Vec4::Unit(0), -Vec4::Unit(1), -Vec4::Unit(2), Vec4(1, 1, 1, 0)};
  CHECK(code_of([&] { build_spherical(flat); }) == Errc::AntipodalPair);
  std::vector<Vec4> empty{Vec4::Unit(0), -Vec4::Unit(0), -Vec4::Unit(1), -Vec4::Unit(2), -Vec4::Unit(3)};
  CHECK_THROWS_AS(build_spherical(empty), Error);
}

TEST_CASE("orthant volume by sampling") {
  const SphericalPolytope p = orthant_simplex();
  const MonteCarloCounts c = sample_volumes(p, dual(p), 400000, 3);
  const double frac = static_cast<double>(c.in_p) / c.samples;
  CHECK(c.samples == 400000);
  CHECK(std::abs(frac - 1.0 / 16) < 4 * std::sqrt(1.0 / 16 * 15.0 / 16 / c.samples));
}

TEST_CASE("sampling is deterministic and independent of the thread count") {
  const SphericalPolytope p = spherical_cube(0.5);
  const SphericalPolytope pd = dual(p);
  const MonteCarloCounts a = sample_volumes(p, pd, 100001, 9);
  setenv("RIGIDLAB_THREADS", "1", 1);
  const MonteCarloCounts b = sample_volumes(p, pd, 100001, 9);
  unsetenv("RIGIDLAB_THREADS");
  CHECK(a.samples == 100001);
  CHECK(a.in_p == b.in_p);
  CHECK(a.in_dual == b.in_dual);
  const MonteCarloCounts c = sample_volumes(p, pd, 100001, 10);
  CHECK((c.in_p != a.in_p || c.in_dual != a.in_dual));
}

TEST_CASE("McMullen identity within four standard errors") {
  for (const SphericalPolytope& p : {orthant_simplex(), spherical_cube(0.05), spherical_cube(0.7)}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const McMullenEstimate m = mcmullen_pi2_check(p, 1000000, seed);
      CHECK(m.pass);
      CHECK(m.sigmas <= 4.0);
    }
  }
  const McMullenEstimate tiny = mcmullen_pi2_check(spherical_cube(0.05), 1000000, 5);
  CHECK(tiny.vol_p < 0.01);
  CHECK(tiny.vol_dual == doctest::Approx(M_PI * M_PI - tiny.pairing).epsilon(0.01));
  CHECK(mcmullen_pi2_check(orthant_simplex(), 1000000, 4).pairing == doctest::Approx(3 * M_PI * M_PI / 4));
}

TEST_CASE("Steiner sums") {
  for (double l : {0.1, 1.0, M_PI / 2, 3.0}) {
    const CircleSteiner c = steiner_circle(l);
    CHECK(c.sum == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(c.alternating) < 1e-15);
  }
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const SteinerEstimate s = steiner_checks(orthant_simplex(), 1000000, seed);
    CHECK(s.pass);
    CHECK(std::abs(s.sum - 1.0) <= 4 * s.std_error);
    CHECK(std::abs(s.alternating) <= 4 * s.std_error);
  }
}

TEST_CASE("shear-bend transfer of rigid motions") {
  const VertexPolyhedron cube = solids::cube();
  const SupportPolyhedron s = to_support(cube);
  const Vec3 eta = Vec3(1, 1, 1).normalized();
  std::vector<Vec3> rot, trans;
  for (const Vec3& p : cube.vertices) {
    rot.push_back(eta.cross(p));
    trans.push_back(Vec3(0.3, -0.2, 0.5));
  }
  const ShearBendResult r = shear_bend_transfer(cube, rot);
  for (int f = 0; f < cube.face_count(); ++f) {
    CHECK((r.screws[f].eta - eta).norm() < 1e-12);
    CHECK(r.h_dot[f] == doctest::Approx(eta.dot(s.normals[f])));
  }
  CHECK(r.parallel_residual < 1e-12);
  CHECK(r.area_residual < 1e-8);

  const ShearBendResult t = shear_bend_transfer(cube, trans);
  CHECK(t.h_dot.cwiseAbs().maxCoeff() < 1e-12);
  for (const auto& sc : t.screws) CHECK(sc.eta.norm() < 1e-12);
}

TEST_CASE("shear-bend transfer on random polyhedra") {
  std::mt19937_64 rng(44);
  for (int k = 0; k < 5; ++k) {
    const VertexPolyhedron p = solids::random_simple(8 + k, rng);
    const Vec3 eta = solids::random_unit_vector(rng);
    const Vec3 tau = solids::random_unit_vector(rng);
    std::vector<Vec3> q;
    for (const Vec3& v : p.vertices) q.push_back(eta.cross(v) + tau);
    const ShearBendResult r = shear_bend_transfer(p, q);
    CHECK(r.area_residual < 1e-8);
    CHECK(r.parallel_residual < 1e-10);
    // A rigid motion yields a translation of the supports.
    CHECK(project_out(r.h_dot, orthonormalize(translation_basis(to_support(p).normals))).norm() < 1e-10);
  }
}

TEST_CASE("shear-bend rejects stretching velocities") {
  const VertexPolyhedron cube = solids::cube();
  std::vector<Vec3> q;
  for (const Vec3& p : cube.vertices) q.push_back(0.1 * p);
  CHECK(code_of([&] { shear_bend_transfer(cube, q); }) == Errc::NotIsometric);
}
