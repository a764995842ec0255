#include <doctest.h>

#include "rigidlab/errors.hpp"
#include "rigidlab/gauss_rigidity.hpp"
#include "rigidlab/reconstruction_solvers.hpp"
#include "rigidlab/solids.hpp"

#include <cmath>
#include <functional>
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

MinkowskiProblem axis_problem(const std::array<double, 6>& c) {
  MinkowskiProblem mp;
  for (int k = 0; k < 3; ++k) {
    mp.normals.push_back(Vec3::Unit(k));
    mp.normals.push_back(-Vec3::Unit(k));
  }
  mp.areas = Eigen::Map<const VecX>(c.data(), 6);
  return mp;
}

VecX perturbed(const VecX& r, double amp, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VecX out = r;
  for (int i = 0; i < r.size(); ++i) out[i] *= 1.0 + amp * u(rng);
  return out;
}

Vec3 centroid(const VertexPolyhedron& p) {
  Vec3 c = Vec3::Zero();
  for (const Vec3& v : p.vertices) c += v;
  return c / p.vertex_count();
}

}  // namespace

TEST_CASE("Minkowski recovers the unit cube") {
  const MinkowskiResult r = minkowski_solve(axis_problem({1, 1, 1, 1, 1, 1}));
  CHECK(r.trace.status == SolveStatus::Converged);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(r.polyhedron.heights[i] - 0.5) <= 1e-9 * 0.5);
  CHECK(r.max_area_error <= 1e-9);
  CHECK(r.trace.iterations() <= 1);
}

TEST_CASE("Minkowski recovers the 4:1 box") {
  const MinkowskiResult r = minkowski_solve(axis_problem({4, 4, 1, 1, 1, 1}));
  CHECK(r.trace.status == SolveStatus::Converged);
  CHECK(r.trace.iterations() <= 100);
  CHECK(r.max_area_error <= 1e-6);
  CHECK(r.first_order_residual <= 1e-6);
  // A_x = bc = 4, A_y = ac = 1, A_z = ab = 1 gives a = 1/2, b = c = 2.
  const VecX& h = r.polyhedron.heights;
  CHECK(h[0] + h[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(h[2] + h[3] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(h[4] + h[5] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(steiner_point(r.polyhedron).norm() < 1e-12);
}

TEST_CASE("Minkowski recovers the regular octahedron") {
  MinkowskiProblem mp;
  for (int s = 0; s < 8; ++s) {
    mp.normals.push_back(Vec3(s & 1 ? -1 : 1, s & 2 ? -1 : 1, s & 4 ? -1 : 1).normalized());
  }
  mp.areas = VecX::Constant(8, 2.0);
  const MinkowskiResult r = minkowski_solve(mp);
  CHECK(r.trace.status == SolveStatus::Converged);
  // Edge a = √6 h, face area √3/4 a² = 3√3/2 h².
  const double h = std::sqrt(4.0 / (3.0 * std::sqrt(3.0)));
  for (int i = 0; i < 8; ++i) CHECK(r.polyhedron.heights[i] == doctest::Approx(h).epsilon(1e-9));
}

TEST_CASE("Minkowski recovers random polyhedra up to translation") {
  std::mt19937_64 rng(51);
  for (int k = 0; k < 6; ++k) {
    const SupportPolyhedron s = to_support(solids::random_simple(8 + k, rng));
    MinkowskiProblem mp{s.normals, face_areas(decompose(s))};
    const MinkowskiResult r = minkowski_solve(mp);
    CHECK(r.trace.status == SolveStatus::Converged);
    CHECK(r.max_area_error <= 1e-6);
    CHECK(r.first_order_residual <= 1e-6);
    // Reference shifted to its own Steiner point must coincide.
    const VecX ref = s.heights - translation_basis(s.normals) * steiner_point(s);
    CHECK((r.polyhedron.heights - ref).cwiseAbs().maxCoeff() < 1e-8);
    for (size_t i = 1; i < r.trace.steps.size(); ++i) CHECK(r.trace.steps[i].merit > r.trace.steps[i - 1].merit);
  }
}

TEST_CASE("Steiner point is translation equivariant") {
  std::mt19937_64 rng(52);
  const VertexPolyhedron p = solids::random_simple(10, rng);
  const Vec3 a(0.1, -0.2, 0.05);
  const Vec3 s0 = steiner_point(to_support(p));
  const Vec3 s1 = steiner_point(to_support(p.translated(a)));
  CHECK((s1 - s0 - a).norm() < 1e-12);
  CHECK(steiner_point(to_support(solids::cube())).norm() < 1e-14);
}

TEST_CASE("Minkowski input errors") {
  CHECK(code_of([] { minkowski_solve(axis_problem({2, 1, 1, 1, 1, 1})); }) == Errc::ClosednessViolated);
  MinkowskiProblem flat;
  for (int k = 0; k < 4; ++k) flat.normals.push_back(Vec3(std::cos(k * M_PI / 2), std::sin(k * M_PI / 2), 0));
  flat.areas = VecX::Ones(4);
  CHECK(code_of([&] { minkowski_solve(flat); }) == Errc::DegenerateSpan);
  CHECK(code_of([] { minkowski_solve(axis_problem({1, 1, 1, 1, 0, 0})); }) == Errc::InvalidInput);
  MinkowskiProblem three = axis_problem({1, 1, 1, 1, 1, 1});
  three.normals.resize(3);
  three.areas = VecX::Ones(3);
  CHECK(code_of([&] { minkowski_solve(three); }) == Errc::InvalidInput);
}

TEST_CASE("Minkowski JSON") {
  const MinkowskiProblem mp = parse_minkowski_json(
      R"({"normals": [[1,0,0],[-1,0,0],[0,1,0],[0,-1,0],[0,0,1],[0,0,-1]], "areas": [1,1,1,1,1,1]})");
  CHECK(mp.normals.size() == 6);
  CHECK(mp.areas.sum() == 6.0);
  CHECK(code_of([] { parse_minkowski_json("{\"normals\": [[1,0]], \"areas\": [1]}"); }) == Errc::InvalidInput);
  CHECK(code_of([] { parse_minkowski_json("[1, 2"); }) == Errc::InvalidInput);
}

TEST_CASE("Alexandrov from the embedded radii takes no step") {
  const AlexandrovProblem ap = alexandrov_problem(solids::cube(), Vec3(0.05, -0.02, 0.03));
  const AlexandrovResult r = alexandrov_continuation(ap);
  CHECK(r.trace.status == SolveStatus::Converged);
  CHECK(r.trace.iterations() == 0);
  const std::string csv = trace_dump(r.trace);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("Alexandrov converges from perturbed radii") {
  std::mt19937_64 rng(53);
  const VertexPolyhedron tet = solids::tetrahedron();
  for (const VertexPolyhedron& p : {tet, solids::cube()}) {
    for (int trial = 0; trial < 3; ++trial) {
      AlexandrovProblem ap = alexandrov_problem(p, Vec3::Zero());
      ap.r_init = perturbed(ap.r_init, 0.01, rng);
      const AlexandrovResult r = alexandrov_continuation(ap);
      CHECK(r.trace.status == SolveStatus::Converged);
      CHECK(r.trace.iterations() <= 30);
      CHECK(r.trace.steps.back().merit <= 1e-10);
      for (size_t i = 1; i < r.trace.steps.size(); ++i) CHECK(r.trace.steps[i].merit >= 0.0);
      // λ is the exterior dihedral angle of the regular tetrahedron.
      if (p.vertex_count() == 4) {
        for (double l : evaluate(r.polyhedron).lambda) CHECK(std::abs(l - (M_PI - std::acos(1.0 / 3.0))) < 1e-8);
      }
    }
  }
}

TEST_CASE("Alexandrov residual norm decreases") {
  std::mt19937_64 rng(54);
  AlexandrovProblem ap = alexandrov_problem(solids::icosahedron(), Vec3::Zero());
  ap.r_init = perturbed(ap.r_init, 0.02, rng);
  const AlexandrovResult r = alexandrov_continuation(ap);
  REQUIRE(r.trace.status == SolveStatus::Converged);
  // One LM step at a time; each accepted step lowers ‖κ‖₂.
  double prev = std::numeric_limits<double>::infinity();
  AlexandrovProblem step = ap;
  for (int it = 0; it < r.trace.iterations(); ++it) {
    const AlexandrovResult one = alexandrov_continuation(step, {1e-10, 1, 40});
    const double k2 = evaluate(one.polyhedron).kappa.norm();
    CHECK(k2 < prev);
    prev = k2;
    step.r_init = one.polyhedron.r;
  }
}

TEST_CASE("Alexandrov solutions agree on dihedral angles") {
  std::mt19937_64 rng(55);
  for (const VertexPolyhedron& p : {solids::tetrahedron(), solids::cube()}) {
    AlexandrovProblem a = alexandrov_problem(p, Vec3::Zero());
    AlexandrovProblem b = a;
    a.r_init = perturbed(a.r_init, 0.01, rng);
    b.r_init = perturbed(b.r_init, 0.01, rng);
    const WarpedState sa = evaluate(alexandrov_continuation(a).polyhedron);
    const WarpedState sb = evaluate(alexandrov_continuation(b).polyhedron);
    const WarpedState ref = evaluate(build(triangulate(p), Vec3::Zero()));
    for (size_t e = 0; e < sa.lambda.size(); ++e) {
      CHECK(std::abs(sa.lambda[e] - sb.lambda[e]) <= 1e-7);
      CHECK(std::abs(sa.lambda[e] - ref.lambda[e]) <= 1e-7);
    }
  }
}

TEST_CASE("Alexandrov tracks the invertibility region") {
  // Radii grown uniformly from an off-centre apex open the cone angles: κ < 0.
  const VertexPolyhedron p = solids::icosahedron();
  AlexandrovProblem ap = alexandrov_problem(p, 0.3 * centroid(p) + Vec3(0.1, 0, 0));
  ap.r_init *= 0.98;
  const AlexandrovResult r = alexandrov_continuation(ap);
  CHECK(r.trace.status == SolveStatus::Converged);
  CHECK(r.trace.steps.front().delta_region == false);
  CHECK(r.trace.steps.back().delta_region == false);
}

TEST_CASE("Alexandrov reports inadmissible starts") {
  AlexandrovProblem ap = alexandrov_problem(solids::cube(), Vec3::Zero());
  ap.r_init[0] = 5.0;
  const AlexandrovResult r = alexandrov_continuation(ap);
  CHECK(r.trace.status == SolveStatus::AdmissibilityLost);
  CHECK(r.trace.iterations() == 0);
  CHECK(r.trace.message.find("inadmissible") != std::string::npos);
  const std::string csv = trace_dump(r.trace);
  CHECK(csv.find("AdmissibilityLost") != std::string::npos);
  CHECK(csv.find("inf") != std::string::npos);
}

TEST_CASE("Alexandrov iteration limit") {
  std::mt19937_64 rng(56);
  AlexandrovProblem ap = alexandrov_problem(solids::cube(), Vec3::Zero());
  ap.r_init = perturbed(ap.r_init, 0.01, rng);
  const AlexandrovResult r = alexandrov_continuation(ap, {1e-10, 1, 40});
  CHECK(r.trace.status == SolveStatus::MaxIterations);
  CHECK(r.trace.iterations() == 1);
}

TEST_CASE("Alexandrov rejects bad metrics") {
  AlexandrovProblem ap = alexandrov_problem(solids::cube(), Vec3::Zero());
  ap.lengths.begin()->second = 10.0;
  CHECK(code_of([&] { alexandrov_continuation(ap); }) == Errc::InvalidTriangle);
}

TEST_CASE("trace dumps are bit-stable") {
  std::mt19937_64 rng(57);
  AlexandrovProblem ap = alexandrov_problem(solids::cube(), Vec3::Zero());
  ap.r_init = perturbed(ap.r_init, 0.01, rng);
  const std::string a = trace_dump(alexandrov_continuation(ap).trace);
  const std::string b = trace_dump(alexandrov_continuation(ap).trace);
  CHECK(a == b);
  CHECK(a.rfind("iteration,merit,step_norm,condition,damping,delta_region,status\n", 0) == 0);
  CHECK(a.find("Converged") != std::string::npos);
}

TEST_CASE("Alexandrov JSON") {
  const AlexandrovProblem ap = parse_alexandrov_json(R"({
    "triangles": [[0,2,1],[0,1,3],[0,3,2],[1,2,3]],
    "lengths": {"0-1": 1, "0-2": 1, "0-3": 1, "1-2": 1, "2-1": 1, "1-3": 1, "2-3": 1},
    "r_init": [0.62, 0.61, 0.6, 0.61]})");
  CHECK(ap.triangles.size() == 4);
  CHECK(ap.lengths.size() == 6);
  const AlexandrovResult r = alexandrov_continuation(ap);
  CHECK(r.trace.status == SolveStatus::Converged);
  CHECK(code_of([] { parse_alexandrov_json(R"({"triangles": [], "lengths": {"0_1": 1}, "r_init": []})"); }) ==
        Errc::InvalidInput);
  CHECK(code_of([] { parse_alexandrov_json(R"({"triangles": []})"); }) == Errc::InvalidInput);
}
