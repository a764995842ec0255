#pragma once

#include "rigidlab/numeric_core.hpp"
#include "rigidlab/polyhedron_model.hpp"
#include "rigidlab/warped_metric.hpp"

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace rigidlab {

enum class SolveStatus { Converged, MaxIterations, AdmissibilityLost, Diverged };

const char* to_string(SolveStatus s);

struct SolveStep {
  int iteration = 0;
  double merit = 0.0;      // Vol for Minkowski, ‖κ‖∞ for Alexandrov
  double step_norm = 0.0;
  double condition = 0.0;  // of the reduced Hessian / damped normal matrix
  double damping = 0.0;    // step length t for Minkowski, μ for Alexandrov
  bool delta_region = false;  // 0 < κ_i < δ_i for all i (Alexandrov only)
};

struct SolveTrace {
  std::vector<SolveStep> steps;  // steps[0] is the initial state
  SolveStatus status = SolveStatus::MaxIterations;
  std::string message;

  int iterations() const { return static_cast<int>(steps.size()) - 1; }
};

/// One row per iterate: iteration,merit,step_norm,condition,damping,delta_region,status.
/// Floats printed with %.17g.
std::string trace_dump(const SolveTrace& t);

struct MinkowskiProblem {
  std::vector<Vec3> normals;
  VecX areas;
};

/// {"normals": [[x,y,z],...], "areas": [...]}.
MinkowskiProblem parse_minkowski_json(const std::string& text);

struct MinkowskiOptions {
  double gradient_tol = 1e-13;  // ‖Zᵀ A‖ / ‖A‖ at the optimum
  int max_iterations = 100;
};

struct MinkowskiResult {
  SupportPolyhedron polyhedron;  // Steiner point at the origin
  SolveTrace trace;
  double theta = 0.0;  // A_i = θ C_i before rescaling
  double first_order_residual = 0.0;  // max |A_i/(θ C_i) − 1| before rescaling
  double max_area_error = 0.0;  // max |A_i/C_i − 1| of the result
};

/// Maximizes Vol on {Σ C_i h_i = 1} by Newton steps in the complement of
/// translations, then rescales so that A_i = C_i.
/// Throws ClosednessViolated, DegenerateSpan, InvalidInput.
MinkowskiResult minkowski_solve(const MinkowskiProblem& mp, const MinkowskiOptions& opt = {});

/// Σ over vertex triples of (Ω/4π) q, Ω the solid angle of the normal cone.
Vec3 steiner_point(const SupportPolyhedron& s);

struct AlexandrovProblem {
  std::vector<std::array<int, 3>> triangles;
  std::map<std::pair<int, int>, double> lengths;  // keyed i < j
  VecX r_init;
};

/// {"triangles": [[i,j,k],...], "lengths": {"i-j": l, ...}, "r_init": [...]}.
AlexandrovProblem parse_alexandrov_json(const std::string& text);

/// Problem for the boundary metric of an embedded polyhedron, radii from apex.
AlexandrovProblem alexandrov_problem(const VertexPolyhedron& p, const Vec3& apex);

struct AlexandrovOptions {
  double tol = 1e-10;  // on ‖κ‖∞
  int max_iterations = 50;
  int max_rejections = 40;
};

struct AlexandrovResult {
  WarpedPolyhedron polyhedron;
  SolveTrace trace;
};

/// Damped least squares on κ(r) = 0 with J = D²HE and (JᵀJ + μI)δ = −Jᵀκ.
/// Failures are reported through trace.status. Throws InvalidInput when a
/// boundary triangle is invalid or a cone angle reaches 2π.
AlexandrovResult alexandrov_continuation(const AlexandrovProblem& ap, const AlexandrovOptions& opt = {});

}  // namespace rigidlab
