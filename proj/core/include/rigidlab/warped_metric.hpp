#pragma once

#include "rigidlab/numeric_core.hpp"
#include "rigidlab/polyhedron_model.hpp"

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace rigidlab {

struct WarpedEdge {
  int i = 0;
  int j = 0;  // i < j
  double length = 0.0;
  bool diagonal = false;
};

/// Boundary triangulation with frozen edge lengths, coned to an apex by
/// tetrahedra (0, i, j, k). Only the radii r_i vary.
struct WarpedPolyhedron {
  std::vector<std::array<int, 3>> triangles;  // outward CCW
  std::vector<WarpedEdge> edges;              // sorted by (i, j)
  VecX r;
  /// p_i − apex when built from an embedding; empty for a bare metric.
  std::vector<Vec3> positions;

  int size() const { return static_cast<int>(r.size()); }
  int edge_index(int i, int j) const;
  double length(int i, int j) const { return edges[edge_index(i, j)].length; }
  WarpedPolyhedron with_radii(const VecX& radii) const;
};

/// r⁰_i = ‖p_i − apex‖, lengths from the embedding.
/// Throws ApexNotInterior, DegenerateTetrahedron.
WarpedPolyhedron build(const TriangulatedBoundary& t, const Vec3& apex);

/// Boundary metric given by triangles and lengths keyed (i, j) with i < j.
/// Throws BadTopology, InvalidTriangle, and DegenerateTetrahedron unless
/// `require_admissible` is false.
WarpedPolyhedron build_from_metric(const std::vector<std::array<int, 3>>& triangles,
                                   const std::map<std::pair<int, int>, double>& lengths, const VecX& r,
                                   bool require_admissible = true);

/// Angles of the warped polyhedron at its current radii. Per-edge vectors
/// are aligned with WarpedPolyhedron::edges.
struct WarpedState {
  VecX omega;  // cone angle around 0p_i
  VecX kappa;  // 2π − ω_i
  std::vector<double> lambda;  // π − β − γ
  std::vector<double> beta;    // dihedral along p_ip_j in the tetrahedron where i→j is positively oriented
  std::vector<double> gamma;   // same in the other tetrahedron
  std::vector<double> rho_ij;  // angle at p_i in triangle 0p_ip_j
  std::vector<double> rho_ji;
  std::vector<double> phi;     // angle at the apex in triangle 0p_ip_j
};

/// Checks triangle inequalities of every tetrahedron face and 36V² > 1e-12·scale⁶.
/// Throws DegenerateTetrahedron naming (i, j, k).
void check_admissible(const WarpedPolyhedron& w);
bool is_admissible(const WarpedPolyhedron& w);

WarpedState evaluate(const WarpedPolyhedron& w);

VecX curvatures(const WarpedPolyhedron& w);

struct HilbertEinsteinValue {
  double value = 0.0;      // Σ r_i κ_i + Σ ℓ_ij λ_ij
  double via_total = 0.0;  // Σ r_i K_i, K_i = κ_i + Σ_j s_ij λ_ij
  double deviation = 0.0;  // relative
};

HilbertEinsteinValue hilbert_einstein_terms(const WarpedPolyhedron& w);
/// Throws InvalidInput if the two evaluations disagree by more than 1e-10 relative.
double hilbert_einstein(const WarpedPolyhedron& w);

/// ∂HE/∂r_i = κ_i.
VecX he_gradient(const WarpedPolyhedron& w);

/// ∂κ_i/∂r_j: off-diagonal (cot β + cot γ)/(ℓ sin ρ_ij sin ρ_ji),
/// diagonal −Σ_j cos φ_ij times the off-diagonal entries of row i.
SymMatrix he_hessian(const WarpedPolyhedron& w);
SymMatrix he_hessian(const WarpedPolyhedron& w, const WarpedState& st);

/// Vertex positions relative to the apex reconstructed from r and ℓ by
/// gluing tetrahedra across shared faces. Consistent when κ = 0.
std::vector<Vec3> develop(const WarpedPolyhedron& w);

/// Columns (⟨e_k, p_i⟩/r_i)_i, positions developed when absent.
MatX metric_trivial_basis(const WarpedPolyhedron& w);

struct MetricRigidityReport {
  SymMatrix hessian;
  SpectrumSummary spectrum;
  MatX trivial_basis;
  double kernel_angle = 0.0;
  double trivial_residual = 0.0;  // ‖D²HE · T‖_max / ‖D²HE‖_max
  double max_abs_kappa = 0.0;
  bool rigid = false;
};

MetricRigidityReport metric_verdict(const WarpedPolyhedron& w, const Tolerances& tol);

/// max_ij |ℓ_ij − r_i s_ij − r_j s_ji| / ℓ_ij.
double edge_split_residual(const WarpedPolyhedron& w);

/// max_i |κ̇_i + Σ_j s_ij λ̇_ij| with rates from central differences along ṙ.
double curvature_rate_residual(const WarpedPolyhedron& w, const VecX& r_dot, double step = 1e-6);

/// max_ij |ṙ_i s_ij + ṙ_j s_ji + r_i ṡ_ij + r_j ṡ_ji|.
double split_rate_residual(const WarpedPolyhedron& w, const VecX& r_dot, double step = 1e-6);

struct SecondVariation {
  double quadratic = 0.0;  // ṙᵀ D²HE ṙ
  double curvature = 0.0;  // Σ ṙ_i κ̇_i
  double link = 0.0;       // Σ_i r_i Σ_j ṡ_ij λ̇_ij
  double deviation = 0.0;  // max pairwise difference
};

SecondVariation second_variation_identity(const WarpedPolyhedron& w, const VecX& r_dot, double step = 1e-6);

/// δ_i = 2π − total boundary angle at p_i.
VecX cone_defects(const WarpedPolyhedron& w);

/// Header "i,j,length,lambda,rho_ij,rho_ji", values printed with %.17g.
std::string edge_diagnostics_csv(const WarpedPolyhedron& w);

}  // namespace rigidlab
