#pragma once

#include "rigidlab/numeric_core.hpp"

#include <array>
#include <vector>

namespace rigidlab {

/// Spherical triangle with sides a, b, c and opposite angles α, β, γ.
struct SphericalTriangleState {
  double a = 0.0, b = 0.0, c = 0.0;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;

  /// Throws InvalidTriangle unless all sides lie in (0, π), the triangle
  /// inequalities hold strictly and a + b + c < 2π.
  static SphericalTriangleState from_sides(double a, double b, double c);

  /// max |cos a − cos b cos c − sin b sin c cos α| over the three rotations.
  double cosine_rule_residual() const;
  /// Spread of sin a / sin α over the three sides.
  double sine_rule_residual() const;
};

/// Angle opposite side a.
double sph_angle(double a, double b, double c);

/// (∂α/∂a, ∂α/∂b, ∂α/∂c) with α opposite a:
/// ∂α/∂a = 1/(sin b sin γ), ∂α/∂b = −cot γ / sin b, ∂α/∂c = −cot β / sin c.
std::array<double, 3> sph_angle_derivs(double a, double b, double c);

/// Side a fixed, sides b and c moving with ḃ, ċ. Returns
/// |α̇ + β̇ cos c + γ̇ cos b| with the rates assembled from the angle derivatives.
double dot_abc_residual(const SphericalTriangleState& t, double b_dot, double c_dot);

/// Euclidean triangle angle opposite side a (tangent half-angle form).
double planar_angle(double a, double b, double c);

/// Star of spherical triangles around a marked point. Triangle j has radial
/// sides ρ_j, ρ_{j+1} and boundary arc b_j; its angle at the marked point is
/// α_{j,j+1}. The boundary vertex j carries the angle π − λ_j.
struct WarpedSphericalPolygon {
  std::vector<double> arcs;  // b_j, fixed
  std::vector<double> rho;   // ρ_j

  // Derived by evaluate():
  std::vector<double> central;  // α_{j,j+1}
  std::vector<double> lambda;   // λ_j
  double kappa = 0.0;           // 2π − Σ α
  bool convex = true;           // all λ_j ≥ 0

  int size() const { return static_cast<int>(rho.size()); }
  std::vector<double> s() const;  // cos ρ_j

  /// Recomputes the derived fields; throws InvalidTriangle.
  void evaluate();

  static WarpedSphericalPolygon from_arcs(std::vector<double> arcs, std::vector<double> rho);
  /// Flat link (κ = 0) with the given radial sides and central angles
  /// (which must sum to 2π); the boundary arcs follow from the cosine rule.
  static WarpedSphericalPolygon flat(const std::vector<double>& rho, const std::vector<double>& central);
  static WarpedSphericalPolygon regular(int m, double rho);

  /// Copy with new radial sides (boundary arcs kept).
  WarpedSphericalPolygon with_rho(const std::vector<double>& rho) const;
  /// Copy with radial sides given through s_j = cos ρ_j.
  WarpedSphericalPolygon with_s(const VecX& s) const;
};

/// K = κ + Σ s_j λ_j.
double total_curvature(const WarpedSphericalPolygon& p);

/// Jacobian ∂λ/∂s = Hessian of K in the s coordinates. Cyclic tridiagonal:
/// diagonal −(cot α_{j−1,j} + cot α_{j,j+1})/sin²ρ_j,
/// off-diagonal 1/(sin α_{j,j+1} sin ρ_j sin ρ_{j+1}). Throws DegenerateAngle.
SymMatrix d2k_matrix(const WarpedSphericalPolygon& p);

/// Two vectors spanning the motions of the marked point:
/// ṡ_j = sin ρ_j cos θ_j and sin ρ_j sin θ_j, θ_j the cumulative central angle.
MatX link_motion_basis(const WarpedSphericalPolygon& p);

struct DualAreaResult {
  double lhs = 0.0;  // D²K(s, s)
  double rhs = 0.0;  // 2 · area of the Euclidean polar dual
  double deviation = 0.0;
};

/// Compares D²K(s⁰, s⁰) with twice the signed area of the polar dual polygon
/// drawn in the tangent plane at the marked point. Throws NotFlat.
DualAreaResult dual_area_identity(const WarpedSphericalPolygon& p, double flat_tol = 1e-9);

/// Twice the area of the polar dual from its quadrilateral decomposition,
/// Σ_j [2 c_j c_{j+1} / sin α − (c_j² + c_{j+1}²) cot α], c_j = cot ρ_j.
double dual_polygon_double_area(const WarpedSphericalPolygon& p);

struct NegativityResult {
  double value = 0.0;       // Σ ṡ_j λ̇_j for the projected, normalized ṡ
  double max_lambda_dot = 0.0;
  double kernel_distance = 0.0;  // ‖ṡ − projection onto ker D²K‖
  bool violation = false;
  VecX s_dot;  // the direction actually used
};

/// Projects ṡ onto {κ̇ = 0} using ∇κ = −D²K s, normalizes it, and evaluates
/// the second variation. Reports a violation when the value is positive or
/// vanishes while λ̇ does not.
NegativityResult key_negativity_check(const WarpedSphericalPolygon& p, const VecX& s_dot, double value_tol = 1e-10,
                                      double lambda_tol = 1e-8);

}  // namespace rigidlab
