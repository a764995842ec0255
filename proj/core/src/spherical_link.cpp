#include "rigidlab/spherical_link.hpp"

#include "rigidlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rigidlab {

namespace {

void check_spherical(double a, double b, double c) {
  const bool sides_ok = a > 0 && a < M_PI && b > 0 && b < M_PI && c > 0 && c < M_PI;
  const bool ineq_ok = a < b + c && b < a + c && c < a + b && a + b + c < 2.0 * M_PI;
  if (!sides_ok || !ineq_ok) {
    std::ostringstream msg;
    msg << "sides (" << a << ", " << b << ", " << c << ")";
    throw Error(Errc::InvalidTriangle, msg.str());
  }
}

double cot(double x) { return std::cos(x) / std::sin(x); }

}  // namespace

double sph_angle(double a, double b, double c) {
  check_spherical(a, b, c);
  const double s = 0.5 * (a + b + c);
  const double num = std::sin(s - b) * std::sin(s - c);
  const double den = std::sin(s) * std::sin(s - a);
  return 2.0 * std::atan2(std::sqrt(std::max(num, 0.0)), std::sqrt(std::max(den, 0.0)));
}

SphericalTriangleState SphericalTriangleState::from_sides(double a, double b, double c) {
  SphericalTriangleState t;
  t.a = a;
  t.b = b;
  t.c = c;
  t.alpha = sph_angle(a, b, c);
  t.beta = sph_angle(b, c, a);
  t.gamma = sph_angle(c, a, b);
  return t;
}

double SphericalTriangleState::cosine_rule_residual() const {
  auto r = [](double x, double y, double z, double ang) {
    return std::abs(std::cos(x) - std::cos(y) * std::cos(z) - std::sin(y) * std::sin(z) * std::cos(ang));
  };
  return std::max({r(a, b, c, alpha), r(b, c, a, beta), r(c, a, b, gamma)});
}

double SphericalTriangleState::sine_rule_residual() const {
  const double ra = std::sin(a) / std::sin(alpha);
  const double rb = std::sin(b) / std::sin(beta);
  const double rc = std::sin(c) / std::sin(gamma);
  return std::max({ra, rb, rc}) - std::min({ra, rb, rc});
}

std::array<double, 3> sph_angle_derivs(double a, double b, double c) {
  const double beta = sph_angle(b, c, a);
  const double gamma = sph_angle(c, a, b);
  return {1.0 / (std::sin(b) * std::sin(gamma)), -cot(gamma) / std::sin(b), -cot(beta) / std::sin(c)};
}

double dot_abc_residual(const SphericalTriangleState& t, double b_dot, double c_dot) {
  const auto da = sph_angle_derivs(t.a, t.b, t.c);  // α wrt (a, b, c)
  const auto db = sph_angle_derivs(t.b, t.c, t.a);  // β wrt (b, c, a)
  const auto dc = sph_angle_derivs(t.c, t.a, t.b);  // γ wrt (c, a, b)
  const double alpha_dot = da[1] * b_dot + da[2] * c_dot;
  const double beta_dot = db[0] * b_dot + db[1] * c_dot;
  const double gamma_dot = dc[2] * b_dot + dc[0] * c_dot;
  return std::abs(alpha_dot + beta_dot * std::cos(t.c) + gamma_dot * std::cos(t.b));
}

double planar_angle(double a, double b, double c) {
  const double s = 0.5 * (a + b + c);
  const double num = (s - b) * (s - c);
  const double den = s * (s - a);
  if (!(a > 0 && b > 0 && c > 0) || !(s - a > 0 && s - b > 0 && s - c > 0)) {
    std::ostringstream msg;
    msg << "planar sides (" << a << ", " << b << ", " << c << ")";
    throw Error(Errc::InvalidTriangle, msg.str());
  }
  return 2.0 * std::atan2(std::sqrt(num), std::sqrt(den));
}

std::vector<double> WarpedSphericalPolygon::s() const {
  std::vector<double> out(rho.size());
  std::transform(rho.begin(), rho.end(), out.begin(), [](double r) { return std::cos(r); });
  return out;
}

void WarpedSphericalPolygon::evaluate() {
  const int m = size();
  if (m < 3 || static_cast<int>(arcs.size()) != m) {
    throw Error(Errc::InvalidInput, "a link needs m >= 3 radial sides and m boundary arcs");
  }
  central.assign(m, 0.0);
  lambda.assign(m, M_PI);
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    const int k = (j + 1) % m;
    central[j] = sph_angle(arcs[j], rho[j], rho[k]);
    lambda[j] -= sph_angle(rho[k], rho[j], arcs[j]);
    lambda[k] -= sph_angle(rho[j], rho[k], arcs[j]);
    total += central[j];
  }
  kappa = 2.0 * M_PI - total;
  convex = std::all_of(lambda.begin(), lambda.end(), [](double l) { return l >= 0.0; });
}

WarpedSphericalPolygon WarpedSphericalPolygon::from_arcs(std::vector<double> arcs, std::vector<double> rho) {
  WarpedSphericalPolygon p;
  p.arcs = std::move(arcs);
  p.rho = std::move(rho);
  p.evaluate();
  return p;
}

WarpedSphericalPolygon WarpedSphericalPolygon::flat(const std::vector<double>& rho, const std::vector<double>& central) {
  const int m = static_cast<int>(rho.size());
  if (static_cast<int>(central.size()) != m) throw Error(Errc::InvalidInput, "rho and central angles differ in length");
  std::vector<double> arcs(m);
  for (int j = 0; j < m; ++j) {
    const int k = (j + 1) % m;
    const double c = std::cos(rho[j]) * std::cos(rho[k]) + std::sin(rho[j]) * std::sin(rho[k]) * std::cos(central[j]);
    arcs[j] = std::acos(std::clamp(c, -1.0, 1.0));
  }
  return from_arcs(std::move(arcs), rho);
}

WarpedSphericalPolygon WarpedSphericalPolygon::regular(int m, double rho) {
  return flat(std::vector<double>(m, rho), std::vector<double>(m, 2.0 * M_PI / m));
}

WarpedSphericalPolygon WarpedSphericalPolygon::with_rho(const std::vector<double>& r) const {
  return from_arcs(arcs, r);
}

WarpedSphericalPolygon WarpedSphericalPolygon::with_s(const VecX& s) const {
  std::vector<double> r(s.size());
  for (int j = 0; j < s.size(); ++j) {
    if (!(s[j] > -1.0 && s[j] < 1.0)) throw Error(Errc::InvalidTriangle, "radial cosine outside (-1, 1)");
    r[j] = std::acos(s[j]);
  }
  return with_rho(r);
}

double total_curvature(const WarpedSphericalPolygon& p) {
  double k = p.kappa;
  for (int j = 0; j < p.size(); ++j) k += std::cos(p.rho[j]) * p.lambda[j];
  return k;
}

SymMatrix d2k_matrix(const WarpedSphericalPolygon& p) {
  const int m = p.size();
  for (int j = 0; j < m; ++j) {
    if (std::abs(std::sin(p.central[j])) < 1e-12 || std::abs(std::sin(p.rho[j])) < 1e-12) {
      throw Error(Errc::DegenerateAngle, "vanishing sine at link position " + std::to_string(j));
    }
  }
  SymMatrix h(m);
  for (int j = 0; j < m; ++j) {
    const int prev = (j + m - 1) % m;
    const int next = (j + 1) % m;
    const double sr = std::sin(p.rho[j]);
    h.set(j, j, -(cot(p.central[prev]) + cot(p.central[j])) / (sr * sr));
    h.set(j, next, 1.0 / (std::sin(p.central[j]) * sr * std::sin(p.rho[next])));
  }
  return h;
}

MatX link_motion_basis(const WarpedSphericalPolygon& p) {
  const int m = p.size();
  MatX basis(m, 2);
  double theta = 0.0;
  for (int j = 0; j < m; ++j) {
    basis(j, 0) = std::sin(p.rho[j]) * std::cos(theta);
    basis(j, 1) = std::sin(p.rho[j]) * std::sin(theta);
    theta += p.central[j];
  }
  return basis;
}

double dual_polygon_double_area(const WarpedSphericalPolygon& p) {
  const int m = p.size();
  double twice = 0.0;
  for (int j = 0; j < m; ++j) {
    const double cj = cot(p.rho[j]);
    const double ck = cot(p.rho[(j + 1) % m]);
    const double a = p.central[j];
    twice += 2.0 * cj * ck / std::sin(a) - (cj * cj + ck * ck) * cot(a);
  }
  return twice;
}

DualAreaResult dual_area_identity(const WarpedSphericalPolygon& p, double flat_tol) {
  if (std::abs(p.kappa) > flat_tol) {
    std::ostringstream msg;
    msg << "defect " << p.kappa;
    throw Error(Errc::NotFlat, msg.str());
  }
  const SymMatrix h = d2k_matrix(p);
  const std::vector<double> s = p.s();
  const VecX sv = Eigen::Map<const VecX>(s.data(), static_cast<Eigen::Index>(s.size()));
  DualAreaResult r;
  r.lhs = h.quadratic_form(sv);
  r.rhs = dual_polygon_double_area(p);
  r.deviation = std::abs(r.lhs - r.rhs);
  return r;
}

NegativityResult key_negativity_check(const WarpedSphericalPolygon& p, const VecX& s_dot, double value_tol,
                                      double lambda_tol) {
  const SymMatrix h = d2k_matrix(p);
  const std::vector<double> s = p.s();
  const VecX sv = Eigen::Map<const VecX>(s.data(), static_cast<Eigen::Index>(s.size()));
  const VecX grad_kappa = -(h * sv);

  NegativityResult r;
  r.s_dot = s_dot;
  const double gg = grad_kappa.squaredNorm();
  if (gg > 0.0) r.s_dot -= (grad_kappa.dot(r.s_dot) / gg) * grad_kappa;
  const double norm = r.s_dot.norm();
  if (norm == 0.0) return r;
  r.s_dot /= norm;

  const VecX lambda_dot = h * r.s_dot;
  r.value = r.s_dot.dot(lambda_dot);
  r.max_lambda_dot = lambda_dot.cwiseAbs().maxCoeff();
  r.kernel_distance = project_out(r.s_dot, orthonormalize(link_motion_basis(p))).norm();
  r.violation = r.value > value_tol || (std::abs(r.value) <= value_tol && r.max_lambda_dot > lambda_tol);
  return r;
}

}  // namespace rigidlab
