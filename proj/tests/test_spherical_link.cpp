#include <doctest.h>

#include "rigidlab/errors.hpp"
#include "rigidlab/spherical_link.hpp"

#include <cmath>
#include <random>

using namespace rigidlab;

namespace {

SphericalTriangleState random_triangle(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.15, M_PI - 0.15);
  for (;;) {
    const double a = u(rng), b = u(rng), c = u(rng);
    if (a < b + c - 0.1 && b < a + c - 0.1 && c < a + b - 0.1 && a + b + c < 2 * M_PI - 0.3) {
      return SphericalTriangleState::from_sides(a, b, c);
    }
  }
}

// Boundary vertex j of a link drawn around the north pole.
Vec3 link_vertex(double rho, double theta) {
  return {std::sin(rho) * std::cos(theta), std::sin(rho) * std::sin(theta), std::cos(rho)};
}

// Angle at v between the great arcs towards a and b.
double vertex_angle(const Vec3& v, const Vec3& a, const Vec3& b) {
  const Vec3 ta = (a - a.dot(v) * v).normalized();
  const Vec3 tb = (b - b.dot(v) * v).normalized();
  return std::acos(std::clamp(ta.dot(tb), -1.0, 1.0));
}

WarpedSphericalPolygon random_flat_link(int m, std::mt19937_64& rng, double rho_lo, double rho_hi) {
  std::uniform_real_distribution<double> ur(rho_lo, rho_hi);
  std::uniform_real_distribution<double> ua(0.5, 1.5);
  std::vector<double> rho(m), w(m);
  double sum = 0.0;
  for (int j = 0; j < m; ++j) {
    rho[j] = ur(rng);
    w[j] = ua(rng);
    sum += w[j];
  }
  for (double& x : w) x *= 2.0 * M_PI / sum;
  return WarpedSphericalPolygon::flat(rho, w);
}

// Shoelace area of the polygon {y : ⟨y, P_j⟩ ≤ 1}, P_j = tan ρ_j (cos θ_j, sin θ_j).
double shoelace_dual_area(const WarpedSphericalPolygon& p) {
  const int m = p.size();
  std::vector<Eigen::Vector2d> n(m);
  std::vector<double> g(m);
  double theta = 0.0;
  for (int j = 0; j < m; ++j) {
    n[j] = Eigen::Vector2d(std::cos(theta), std::sin(theta));
    g[j] = std::cos(p.rho[j]) / std::sin(p.rho[j]);
    theta += p.central[j];
  }
  std::vector<Eigen::Vector2d> corner(m);
  for (int j = 0; j < m; ++j) {
    const int k = (j + 1) % m;
    Eigen::Matrix2d a;
    a.row(0) = n[j].transpose();
    a.row(1) = n[k].transpose();
    corner[j] = a.inverse() * Eigen::Vector2d(g[j], g[k]);
  }
  double area = 0.0;
  for (int j = 0; j < m; ++j) {
    const auto& u = corner[j];
    const auto& v = corner[(j + 1) % m];
    area += 0.5 * (u.x() * v.y() - u.y() * v.x());
  }
  return area;
}

VecX as_vec(const std::vector<double>& v) { return Eigen::Map<const VecX>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

TEST_CASE("right-angled equilateral triangle") {
  const auto t = SphericalTriangleState::from_sides(M_PI / 2, M_PI / 2, M_PI / 2);
  CHECK(t.alpha == doctest::Approx(M_PI / 2).epsilon(1e-15));
  CHECK(t.beta == doctest::Approx(M_PI / 2).epsilon(1e-15));
  const auto d = sph_angle_derivs(M_PI / 2, M_PI / 2, M_PI / 2);
  CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(d[1]) <= 1e-15);
  CHECK(std::abs(d[2]) <= 1e-15);
}

TEST_CASE("angle derivatives against central differences") {
  auto check = [](double a, double b, double c) {
    const auto d = sph_angle_derivs(a, b, c);
    const double h = 1e-6;
    const double fa = (sph_angle(a + h, b, c) - sph_angle(a - h, b, c)) / (2 * h);
    const double fb = (sph_angle(a, b + h, c) - sph_angle(a, b - h, c)) / (2 * h);
    const double fc = (sph_angle(a, b, c + h) - sph_angle(a, b, c - h)) / (2 * h);
    const double scale = std::max({std::abs(fa), std::abs(fb), std::abs(fc), 1.0});
    CHECK(std::abs(d[0] - fa) <= 1e-7 * scale);
    CHECK(std::abs(d[1] - fb) <= 1e-7 * scale);
    CHECK(std::abs(d[2] - fc) <= 1e-7 * scale);
  };
  check(M_PI / 3, M_PI / 3, M_PI / 3);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = random_triangle(rng);
    check(t.a, t.b, t.c);
  }
}

TEST_CASE("two expressions for the opposite-side derivative coincide") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = random_triangle(rng);
    CHECK(std::abs(1.0 / (std::sin(t.b) * std::sin(t.gamma)) - 1.0 / (std::sin(t.c) * std::sin(t.beta))) <=
          1e-12 * (1.0 / (std::sin(t.b) * std::sin(t.gamma))));
  }
}

TEST_CASE("cosine and sine rules") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = random_triangle(rng);
    CHECK(t.cosine_rule_residual() <= 1e-12);
    CHECK(t.sine_rule_residual() <= 1e-12);
  }
}

TEST_CASE("angle variations with one fixed side") {
  const auto eq = SphericalTriangleState::from_sides(M_PI / 2, M_PI / 2, M_PI / 2);
  CHECK(dot_abc_residual(eq, 1.0, -1.0) <= 1e-10);
  CHECK(dot_abc_residual(eq, 0.0, 0.0) == 0.0);
  std::mt19937_64 rng(29);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = random_triangle(rng);
    CHECK(dot_abc_residual(t, g(rng), g(rng)) <= 1e-9);
  }
}

TEST_CASE("invalid triangles are rejected") {
  CHECK_THROWS_AS(sph_angle(0.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(sph_angle(2.5, 1.0, 1.0), Error);
  CHECK_THROWS_AS(sph_angle(3.0, 3.0, 3.0), Error);
  CHECK_THROWS_AS(planar_angle(3.0, 1.0, 1.0), Error);
  try {
    sph_angle(M_PI, 1.0, 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidTriangle);
  }
  CHECK(planar_angle(1.0, 1.0, 1.0) == doctest::Approx(M_PI / 3));
  CHECK(planar_angle(5.0, 3.0, 4.0) == doctest::Approx(M_PI / 2));
}

TEST_CASE("total curvature of simple links") {
  SUBCASE("cube corner seen from the center") {
    const double rho = std::acos(1.0 / std::sqrt(3.0));
    const auto p = WarpedSphericalPolygon::from_arcs({M_PI / 2, M_PI / 2, M_PI / 2}, {rho, rho, rho});
    CHECK(std::abs(p.kappa) <= 1e-12);
    for (double l : p.lambda) CHECK(l == doctest::Approx(M_PI / 2).epsilon(1e-12));
    CHECK(total_curvature(p) == doctest::Approx(3.0 / std::sqrt(3.0) * M_PI / 2).epsilon(1e-12));
    CHECK(p.convex);
  }
  SUBCASE("flat boundary") {
    const auto p = WarpedSphericalPolygon::flat({M_PI / 2, M_PI / 2, M_PI / 2, M_PI / 2}, {1.0, 2.0, 1.5, 2 * M_PI - 4.5});
    for (double l : p.lambda) CHECK(std::abs(l) <= 1e-12);
    CHECK(std::abs(p.kappa) <= 1e-12);
    CHECK(std::abs(total_curvature(p)) <= 1e-12);
  }
  SUBCASE("regular link against vector geometry") {
    for (int m = 3; m <= 8; ++m) {
      const double rho = 0.7;
      const auto p = WarpedSphericalPolygon::regular(m, rho);
      const Vec3 v0 = link_vertex(rho, 0.0);
      const double inner = vertex_angle(v0, link_vertex(rho, 2 * M_PI / m), link_vertex(rho, -2 * M_PI / m));
      const double expected = m * std::cos(rho) * (M_PI - inner);
      CHECK(total_curvature(p) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("first variation of the total curvature") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_flat_link(3 + trial % 5, rng, 0.6, 1.3);
    VecX s = as_vec(p.s());
    VecX sd(p.size());
    for (int j = 0; j < p.size(); ++j) sd[j] = g(rng);
    const double h = 1e-6;
    const double fd = (total_curvature(p.with_s(s + h * sd)) - total_curvature(p.with_s(s - h * sd))) / (2 * h);
    CHECK(std::abs(fd - sd.dot(as_vec(p.lambda))) <= 1e-7 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("D2K matches the Jacobian of lambda in s") {
  std::mt19937_64 rng(37);
  const Tolerances tol;
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_flat_link(3 + trial % 6, rng, 0.5, 1.4);
    // Move off the flat state: the formulas hold everywhere.
    std::vector<double> r = p.rho;
    r[0] += 0.05;
    p = p.with_rho(r);
    const VectorField lam = [&p](const VecX& s) { return as_vec(p.with_s(s).lambda); };
    const MatX fd = fd_jacobian(lam, as_vec(p.s()), tol);
    CHECK(rel_max_deviation(d2k_matrix(p).dense(), fd) <= 1e-6);
  }
}

TEST_CASE("regular link spectrum") {
  for (int m = 3; m <= 12; ++m) {
    const double rho = 0.9;
    const auto p = WarpedSphericalPolygon::regular(m, rho);
    const SpectrumSummary s = eigen_sym(d2k_matrix(p));
    std::vector<double> expected;
    const double t = 2 * M_PI / m;
    for (int k = 1; k <= m; ++k)
      expected.push_back(2 * (std::cos(k * t) - std::cos(t)) / (std::sin(t) * std::sin(rho) * std::sin(rho)));
    std::sort(expected.begin(), expected.end());
    for (int k = 0; k < m; ++k) CHECK(std::abs(s.eigenvalues[k] - expected[k]) <= 1e-10);
    CHECK(s.n_pos == 1);
    CHECK(s.n_zero == 2);
    CHECK(s.n_neg == m - 3);
  }
}

TEST_CASE("signature and kernel of irregular flat links") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 3 + trial % 8;
    const auto p = random_flat_link(m, rng, 0.4, 2.2);
    const SymMatrix h = d2k_matrix(p);
    const SpectrumSummary s = eigen_sym(h);
    CHECK(s.n_pos == 1);
    CHECK(s.corank == 2);
    CHECK(s.n_neg == m - 3);
    CHECK(subspace_angle(s.kernel_basis, link_motion_basis(p)) <= 1e-7);
  }
  // Cube corner with perturbed radial sides, kept flat.
  const double rho = std::acos(1.0 / std::sqrt(3.0));
  const std::vector<double> thirds(3, 2 * M_PI / 3);
  const auto q = WarpedSphericalPolygon::flat({rho + 0.03, rho - 0.02, rho + 0.01}, thirds);
  const SpectrumSummary s = eigen_sym(d2k_matrix(q));
  CHECK(s.n_pos == 1);
  CHECK(s.corank == 2);
  CHECK(s.n_neg == 0);
}

TEST_CASE("a warped link has no two-dimensional kernel") {
  // Same boundary arcs as the cube corner but warped: κ ≠ 0 splits the
  // motion kernel into eigenvalues of order κ.
  const double rho = std::acos(1.0 / std::sqrt(3.0));
  const auto q = WarpedSphericalPolygon::from_arcs({M_PI / 2, M_PI / 2, M_PI / 2}, {rho + 0.03, rho - 0.02, rho + 0.01});
  CHECK(q.kappa > 0.01);
  const SpectrumSummary s = eigen_sym(d2k_matrix(q));
  CHECK(s.n_pos == 1);
  CHECK(s.corank == 0);
  CHECK(std::abs(s.eigenvalues[0]) <= 2.0 * q.kappa);
  CHECK(std::abs(s.eigenvalues[1]) <= 2.0 * q.kappa);
}

TEST_CASE("dual area identity") {
  SUBCASE("square pyramid apex") {
    const auto p = WarpedSphericalPolygon::regular(4, M_PI / 4);
    const DualAreaResult r = dual_area_identity(p);
    CHECK(r.lhs == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(r.rhs == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(shoelace_dual_area(p) == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("equatorial limit") {
    const auto p = WarpedSphericalPolygon::regular(5, M_PI / 2);
    const DualAreaResult r = dual_area_identity(p);
    CHECK(std::abs(r.lhs) <= 1e-12);
    CHECK(std::abs(r.rhs) <= 1e-12);
  }
  SUBCASE("cube corner") {
    const double rho = std::acos(1.0 / std::sqrt(3.0));
    const auto p = WarpedSphericalPolygon::from_arcs({M_PI / 2, M_PI / 2, M_PI / 2}, {rho, rho, rho});
    CHECK(dual_area_identity(p).deviation <= 1e-9);
  }
  SUBCASE("random flat links including obtuse radial sides") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 25; ++trial) {
      const auto p = random_flat_link(3 + trial % 7, rng, 0.3, 2.0);
      const DualAreaResult r = dual_area_identity(p);
      CHECK(r.deviation <= 1e-9);
      CHECK(std::abs(r.rhs - 2.0 * shoelace_dual_area(p)) <= 1e-9 * std::max(1.0, std::abs(r.rhs)));
    }
  }
  SUBCASE("warped links are rejected") {
    const auto p = WarpedSphericalPolygon::from_arcs({1.0, 1.0, 1.0}, {0.8, 0.8, 0.8});
    CHECK_THROWS_AS(dual_area_identity(p), Error);
  }
}

TEST_CASE("second variation is non-positive on the curvature-preserving directions") {
  std::mt19937_64 rng(47);
  std::normal_distribution<double> g;

  SUBCASE("kernel direction") {
    const auto p = random_flat_link(6, rng, 0.6, 1.3);
    const MatX k = link_motion_basis(p);
    const NegativityResult r = key_negativity_check(p, VecX(k.col(0) + 0.3 * k.col(1)));
    CHECK(std::abs(r.value) <= 1e-10);
    CHECK(r.max_lambda_dot <= 1e-8);
    CHECK_FALSE(r.violation);
  }
  SUBCASE("cube corner: the constraint leaves only kernel directions") {
    const double rho = std::acos(1.0 / std::sqrt(3.0));
    const auto p = WarpedSphericalPolygon::from_arcs({M_PI / 2, M_PI / 2, M_PI / 2}, {rho, rho, rho});
    for (int trial = 0; trial < 10; ++trial) {
      VecX sd(3);
      sd << g(rng), g(rng), g(rng);
      const NegativityResult r = key_negativity_check(p, sd);
      CHECK_FALSE(r.violation);
      CHECK(r.kernel_distance <= 1e-9);
    }
  }
  SUBCASE("cube corner with face diagonals") {
    // Vertex where three face diagonals meet: six boundary arcs alternating
    // edge / diagonal, flat diagonals carry no dihedral angle.
    const double re = std::acos(1.0 / std::sqrt(3.0));
    const double rd = std::acos(std::sqrt(2.0 / 3.0));
    const auto p = WarpedSphericalPolygon::from_arcs(
        {M_PI / 4, M_PI / 4, M_PI / 4, M_PI / 4, M_PI / 4, M_PI / 4}, {re, rd, re, rd, re, rd});
    CHECK(std::abs(p.kappa) <= 1e-12);
    for (int trial = 0; trial < 20; ++trial) {
      VecX sd(6);
      for (int j = 0; j < 6; ++j) sd[j] = g(rng);
      const NegativityResult r = key_negativity_check(p, sd);
      CHECK_FALSE(r.violation);
      CHECK(r.value < -1e-6);
    }
  }
  SUBCASE("pairing with the base point") {
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = random_flat_link(4 + trial % 5, rng, 0.5, 1.9);
      const VecX s0 = as_vec(p.s());
      VecX sd(p.size());
      for (int j = 0; j < p.size(); ++j) sd[j] = g(rng);
      const double h = 1e-6;
      const VecX lam_dot = (as_vec(p.with_s(s0 + h * sd).lambda) - as_vec(p.with_s(s0 - h * sd).lambda)) / (2 * h);
      CHECK(std::abs(d2k_matrix(p).bilinear_form(s0, sd) - lam_dot.dot(s0)) <= 1e-8 * std::max(1.0, lam_dot.norm()));
    }
  }
}
