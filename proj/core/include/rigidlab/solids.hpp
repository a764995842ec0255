#pragma once

#include "rigidlab/polyhedron_model.hpp"

#include <random>

namespace rigidlab::solids {

/// Axis-aligned box centered at the origin with edge lengths (a, b, c).
VertexPolyhedron box(double a, double b, double c);
VertexPolyhedron cube(double edge = 1.0);

// Platonic solids centered at the origin, scaled to the given circumradius.
VertexPolyhedron tetrahedron(double circumradius = 1.0);
VertexPolyhedron octahedron(double circumradius = 1.0);
VertexPolyhedron icosahedron(double circumradius = 1.0);
VertexPolyhedron dodecahedron(double circumradius = 1.0);

/// Right prism over a regular m-gon of circumradius 1, height `height`.
VertexPolyhedron prism(int m, double height = 1.0);

/// Convex hull of `n` random points on the unit sphere with pairwise
/// separation at least `min_separation`. The origin is interior and the
/// result is simplicial (points are in general position with probability 1).
VertexPolyhedron random_simplicial(int n, std::mt19937_64& rng, double min_separation = 0.3);

/// Polar dual of random_simplicial, returned in vertex form; simple.
VertexPolyhedron random_simple(int n_faces, std::mt19937_64& rng, double min_separation = 0.3);

/// Adds amplitude·U(−1, 1) to every support number. Retries until the
/// combinatorics match the input (the perturbed state stays in the chamber).
SupportPolyhedron perturb_support(const SupportPolyhedron& s, double amplitude, std::mt19937_64& rng);

/// Moves every vertex by amplitude·U(−1, 1)³ and takes the hull; the result is
/// simplicial for generic draws. Retries until the vertex count is unchanged.
VertexPolyhedron perturb_vertices(const VertexPolyhedron& p, double amplitude, std::mt19937_64& rng);

Vec3 random_unit_vector(std::mt19937_64& rng);

}  // namespace rigidlab::solids
