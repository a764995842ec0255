#pragma once

#include "rigidlab/numeric_core.hpp"
#include "rigidlab/polyhedron_model.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace rigidlab {

using Vec4 = Eigen::Vector4d;

struct HessianDuality {
  SymMatrix he;    // D²HE(P) at r⁰, apex at the origin
  SymMatrix vol;   // D²Vol(P*) at h⁰ = 1/r⁰
  double deviation = 0.0;  // ‖D²HE − D²Vol‖_∞ / ‖D²HE‖_∞
};

/// Compares D²HE of the triangulated P with D²Vol of its polar dual under
/// vertex i ↔ facet i. Throws OriginNotInterior, IndexMismatch.
HessianDuality hessian_duality(const VertexPolyhedron& p);
double hessian_duality_check(const VertexPolyhedron& p);

struct SphericalEdge {
  int a = 0, b = 0;  // vertices, a < b
  int f = 0, g = 0;  // facets, f < g
  double length = 0.0;  // arc length of the edge
  double lambda = 0.0;  // exterior dihedral angle, from the facets' inward tangents
};

/// Convex polytope {x ∈ S³ : ⟨x, u_k⟩ ≤ 0 for all k}.
struct SphericalPolytope {
  std::vector<Vec4> normals;
  std::vector<Vec4> vertices;
  std::vector<std::vector<int>> facet_vertices;
  std::vector<SphericalEdge> edges;
  std::vector<double> facet_areas;  // by angle excess

  bool contains(const Vec4& x) const;
  double boundary_area() const;
  /// Σ over edges of ℓ_e · ℓ*_e with ℓ* = π − interior dihedral = λ.
  double length_pairing() const;
  int edge_between_facets(int f, int g) const;  // −1 if none
};

/// Throws AntipodalPair when the normals do not span ℝ⁴, EmptyInterior when
/// no point satisfies all constraints strictly, EmptyFacet for redundant normals.
SphericalPolytope build_spherical(const std::vector<Vec4>& normals, double tol = 1e-10);

/// Polar dual: facet a of P* has normal = vertex a of P.
SphericalPolytope dual(const SphericalPolytope& sp);

/// Orthant simplex {x_k ≥ 0}, volume π²/8.
SphericalPolytope orthant_simplex();
/// Cube-like polytope ±x_i ≤ t·x_4 around (0, 0, 0, 1).
SphericalPolytope spherical_cube(double t);

struct DualityPairing {
  double length_vs_dual_lambda = 0.0;  // max |ℓ_e − λ*_e|
  double lambda_vs_dual_length = 0.0;  // max |λ_e − ℓ*_e|
};

/// Matches edges through facet/vertex correspondence. Throws IndexMismatch.
DualityPairing duality_pairing(const SphericalPolytope& p, const SphericalPolytope& pd);

/// Area(∂P) + Area(∂P*) − 4π.
double gauss_bonnet_residual(const SphericalPolytope& p, const SphericalPolytope& pd);

struct MonteCarloCounts {
  std::uint64_t samples = 0;
  std::uint64_t in_p = 0;
  std::uint64_t in_dual = 0;
};

/// Uniform samples on S³ (normalized Gaussians), split into fixed shards
/// seeded from (seed, shard index). RIGIDLAB_THREADS caps the worker count;
/// the counts do not depend on it.
MonteCarloCounts sample_volumes(const SphericalPolytope& p, const SphericalPolytope& pd, std::uint64_t samples,
                                std::uint64_t seed);

struct McMullenEstimate {
  double vol_p = 0.0;
  double vol_dual = 0.0;
  double pairing = 0.0;  // ½ Σ ℓ ℓ*
  double lhs = 0.0;      // Vol + ½ Σ ℓ ℓ* + Vol*
  double std_error = 0.0;
  double sigmas = 0.0;   // |lhs − π²| / std_error
  bool pass = false;     // within 4σ
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

McMullenEstimate mcmullen_pi2_check(const SphericalPolytope& p, std::uint64_t samples, std::uint64_t seed);

struct SteinerEstimate {
  double sum = 0.0;          // Σ ‖F‖ ‖F^⊥‖, target 1
  double alternating = 0.0;  // Σ (−1)^dim F ‖F‖ ‖F^⊥‖, target 0
  double std_error = 0.0;
  bool pass = false;
};

SteinerEstimate steiner_checks(const SphericalPolytope& p, std::uint64_t samples, std::uint64_t seed);

/// Arc of length ℓ on S¹ and its dual arc of length π − ℓ.
struct CircleSteiner {
  double sum = 0.0;
  double alternating = 0.0;
};
CircleSteiner steiner_circle(double length);

struct Screw {
  Vec3 eta = Vec3::Zero();
  Vec3 tau = Vec3::Zero();
};

struct ShearBendResult {
  std::vector<Screw> screws;  // per face of p
  VecX h_dot;                 // ⟨η_i, ν_i⟩
  double parallel_residual = 0.0;  // max over edges of ‖(η_i − η_j) × e_ij‖
  double area_residual = 0.0;      // ‖D²Vol · ḣ‖_∞
  double screw_residual = 0.0;     // worst per-face least-squares residual
};

/// Converts an isometric vertex velocity field of p into a Gauss-image
/// preserving support velocity. Throws NotIsometric, InconsistentScrew.
ShearBendResult shear_bend_transfer(const VertexPolyhedron& p, const std::vector<Vec3>& q);

}  // namespace rigidlab
