#pragma once

#include "rigidlab/numeric_core.hpp"
#include "rigidlab/polyhedron_model.hpp"

#include <array>
#include <map>
#include <utility>
#include <vector>

namespace rigidlab {

enum class ChamberMode {
  Resolve,  // non-simple vertices use the fan-resolved simple combinatorics
  Reject,   // non-simple input raises NonSimpleWithoutChamber
};

/// Signed distances of the orthoscheme decomposition. Pair data are stored
/// per ordered adjacent pair (i, j); corner data per ordered triple (i, j, k)
/// with q_ijk a vertex of faces i, j, k.
struct OrthoschemeDecomposition {
  std::vector<Vec3> normals;
  VecX h;
  std::vector<std::array<int, 3>> vertex_triples;
  /// Neighbours of face i in cyclic order; the vertex between consecutive
  /// neighbours j, k is (i, j, k).
  std::vector<std::vector<int>> neighbors;

  std::vector<Vec3> q_face;                          // q_i
  std::map<std::pair<int, int>, double> h_pair;      // h_ij
  std::map<std::pair<int, int>, Vec3> q_pair;        // q_ij = q_ji
  std::map<std::array<int, 3>, double> h_corner;     // h_ijk
  std::map<std::array<int, 3>, Vec3> q_corner;       // q_ijk

  int size() const { return static_cast<int>(normals.size()); }
  double hij(int i, int j) const { return h_pair.at({i, j}); }
  double hijk(int i, int j, int k) const { return h_corner.at({i, j, k}); }
  /// ℓ_ij = h_ijk + h_ijl over the two endpoints of the edge.
  double edge_length(int i, int j) const;
  /// The two faces k, l with q_ijk, q_ijl the endpoints of edge ij.
  std::pair<int, int> edge_ends(int i, int j) const;

  /// Same combinatorics evaluated at other support numbers. The signed
  /// distances are linear in h, so at_heights(ḣ) yields their derivatives.
  OrthoschemeDecomposition at_heights(const VecX& h) const;
};

/// Attaches combinatorics (computed through from_support) when missing.
SupportPolyhedron with_combinatorics(const SupportPolyhedron& s);

OrthoschemeDecomposition decompose(const SupportPolyhedron& s, ChamberMode mode = ChamberMode::Resolve);

/// Vol = 1/6 Σ_{i,j,k} h_i h_ij h_ijk.
double volume(const OrthoschemeDecomposition& d);
/// Vol = 1/3 Σ h_i A_i.
double pyramid_volume(const OrthoschemeDecomposition& d);
/// A_i = 1/2 Σ_j h_ij ℓ_ij.
VecX face_areas(const OrthoschemeDecomposition& d);

/// Convex polygon in support form.
struct PolygonSupportState {
  std::vector<Eigen::Vector2d> normals;  // μ_j, unit
  std::vector<double> supports;          // g_j
  std::vector<double> exterior;          // α_{j,j+1}, angle from μ_j to μ_{j+1}
  std::vector<double> lengths;           // ℓ_j

  int size() const { return static_cast<int>(normals.size()); }
  double area() const;

  /// Normals must turn counter-clockwise by angles in (0, π) and close up.
  static PolygonSupportState from_normals(std::vector<Eigen::Vector2d> normals, std::vector<double> supports);
  static PolygonSupportState regular(int m, double support = 1.0);
};

/// D²A in the g coordinates: diagonal −(cot α_{j−1,j} + cot α_{j,j+1}),
/// off-diagonal 1/sin α_{j,j+1}. Throws DegenerateAngle if |sin α| < 1e-12.
SymMatrix polygon_hessian(const std::vector<double>& exterior);
SymMatrix polygon_hessian(const PolygonSupportState& p);

/// Face polygon of face i: in-plane edge normals and g_j = h_ij in the order
/// of d.neighbors[i].
PolygonSupportState face_polygon(const OrthoschemeDecomposition& d, int i);

/// The linear map Φ_i : h ↦ (h_ij)_j for face i (rows follow d.neighbors[i]).
MatX face_support_map(const OrthoschemeDecomposition& d, int i);

/// ∂A_i/∂h_j assembled face by face as (Φ_iᵀ D²A_i Φ_i h)ᵀ. Symmetrized.
SymMatrix volume_hessian(const OrthoschemeDecomposition& d);
SymMatrix volume_hessian(const SupportPolyhedron& s, ChamberMode mode = ChamberMode::Resolve);

/// Columns (⟨e_k, ν_i⟩)_i, k = 1..3.
MatX translation_basis(const std::vector<Vec3>& normals);

struct GaussRigidityReport {
  SymMatrix hessian;
  SpectrumSummary spectrum;
  MatX trivial_basis;
  double kernel_angle = 0.0;     // largest principal angle to the translation span
  double trivial_residual = 0.0;  // ‖D²Vol · T‖_max / ‖D²Vol‖_max
  double homogeneity_residual = 0.0;  // ‖D²Vol·h − 2A‖_∞ / ‖A‖_∞
  bool rigid = false;
};

GaussRigidityReport gauss_verdict(const SupportPolyhedron& s, const Tolerances& tol,
                                  ChamberMode mode = ChamberMode::Resolve);

struct BasicLemmaResiduals {
  double edge = 0.0;    // max over edges of |ḣ_i h_ij + ḣ_j h_ji − h_i ḣ_ij − h_j ḣ_ji|
  double corner = 0.0;  // max over (i, j, k) of |ḣ_ij h_ijk + ḣ_ik h_ikj − h_ij ḣ_ijk − h_ik ḣ_ikj|
};

BasicLemmaResiduals lemma_basic_check(const SupportPolyhedron& s, const VecX& h_dot);

/// Ä_i = Σ_{j,k} ḣ_ij ḣ_ijk for every face.
VecX area_second_variation(const OrthoschemeDecomposition& d, const VecX& h_dot);

}  // namespace rigidlab
