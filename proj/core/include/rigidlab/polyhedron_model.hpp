#pragma once

#include "rigidlab/numeric_core.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rigidlab {

/// Convex polyhedron in vertex form. Faces are vertex-index cycles ordered
/// counter-clockwise when seen from outside.
struct VertexPolyhedron {
  std::vector<Vec3> vertices;
  std::vector<std::vector<int>> faces;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }

  /// Undirected edges (i < j), sorted lexicographically.
  std::vector<std::array<int, 2>> edges() const;

  /// Largest vertex distance from the origin.
  double circumradius() const;

  /// Unit outward normal of a face (Newell's method).
  Vec3 face_normal(int f) const;
  double face_area(int f) const;
  Vec3 face_centroid(int f) const;

  VertexPolyhedron translated(const Vec3& a) const;
  VertexPolyhedron scaled(double factor) const;
};

struct ValidationReport {
  double max_convexity_residual = 0.0;  // max over faces/vertices of ⟨p, n_f⟩ − h_f
  int euler_characteristic = 0;
  int vertex_count = 0;
  int edge_count = 0;
  int face_count = 0;
  double min_face_area = 0.0;
};

/// Rejects non-convex or topologically broken input by throwing NonConvex or
/// BadTopology. The convexity tolerance is 1e-9 relative to the circumradius.
ValidationReport validate(const VertexPolyhedron& p);

/// Combinatorics of a support polyhedron, recorded as the simple vertices it
/// would have: oriented face triples (a, b, c) with det(ν_a, ν_b, ν_c) > 0.
/// Vertices of valence > 3 are split by a fan from their smallest face index;
/// the split introduces zero-length edges (the chamber-extension convention).
struct Combinatorics {
  std::vector<std::array<int, 3>> vertex_triples;
  int resolved_vertices = 0;

  bool is_simple() const { return resolved_vertices == 0; }
};

struct SupportPolyhedron {
  std::vector<Vec3> normals;
  VecX heights;
  std::optional<Combinatorics> combinatorics;

  int size() const { return static_cast<int>(normals.size()); }
  /// Support numbers of the translate by a: h_i + ⟨a, ν_i⟩.
  SupportPolyhedron translated(const Vec3& a) const;
  SupportPolyhedron with_heights(const VecX& h) const;
};

/// Face-vertex incidence of a vertex polyhedron turned into face triples.
Combinatorics vertex_combinatorics(const VertexPolyhedron& p, const std::vector<Vec3>& normals);

/// One (ν, h) per face, combinatorics taken from the vertex structure.
SupportPolyhedron to_support(const VertexPolyhedron& p);

/// Vertices as feasible intersections of three face planes. Throws Unbounded,
/// DegenerateSpan, or EmptyFacet (a listed facet has no area).
VertexPolyhedron from_support(const SupportPolyhedron& s, double tol = 1e-9);

/// Polar dual {⟨x, ν_i⟩ ≤ h_i} with ν_i = p_i/‖p_i‖ and h_i = 1/‖p_i‖, one facet
/// per vertex of p. Combinatorics come from the faces of p. Throws
/// OriginNotInterior.
SupportPolyhedron polar_dual(const VertexPolyhedron& p);

struct BoundaryEdge {
  int i = 0;
  int j = 0;  // i < j
  bool diagonal = false;
};

struct TriangulatedBoundary {
  VertexPolyhedron base;
  std::vector<std::array<int, 3>> triangles;  // outward CCW
  std::vector<BoundaryEdge> edges;

  int diagonal_count() const;
};

/// Fan triangulation from the lowest-index vertex of each face.
TriangulatedBoundary triangulate(const VertexPolyhedron& p);

/// Convex hull of a small point set by enumerating supporting planes through
/// point triples. Coplanar hull facets are merged into polygons. O(n⁴).
VertexPolyhedron convex_hull(const std::vector<Vec3>& points, double tol = 1e-10);

/// Volume via the divergence theorem over triangulated faces.
double enclosed_volume(const VertexPolyhedron& p);

struct LoadResult {
  VertexPolyhedron polyhedron;
  std::vector<std::string> warnings;
};

/// {"vertices": [[x,y,z],...], "faces": [[i0,i1,...],...]}, 0-based, outward
/// CCW. Unknown top-level fields are ignored and reported in `warnings`.
LoadResult parse_polyhedron_json(const std::string& text);
LoadResult read_polyhedron_json(const std::string& path);
std::string polyhedron_to_json(const VertexPolyhedron& p);

/// `v` and `f` records only; 1-based (or negative relative) indices.
LoadResult parse_obj(std::istream& in);
LoadResult read_obj(const std::string& path);

/// Support form file: {"normals": [[..],..], "heights": [..]}.
SupportPolyhedron parse_support_json(const std::string& text);

}  // namespace rigidlab
