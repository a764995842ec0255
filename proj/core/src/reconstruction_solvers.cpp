#include "rigidlab/reconstruction_solvers.hpp"

#include "rigidlab/errors.hpp"
#include "rigidlab/gauss_rigidity.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

namespace rigidlab {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::AdmissibilityLost: return "AdmissibilityLost";
    case SolveStatus::Diverged: return "Diverged";
  }
  return "Unknown";
}

std::string trace_dump(const SolveTrace& t) {
  std::string out = "iteration,merit,step_norm,condition,damping,delta_region,status\n";
  char buf[320];
  for (const SolveStep& s : t.steps) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%d,%s\n", s.iteration, s.merit, s.step_norm, s.condition,
                  s.damping, s.delta_region ? 1 : 0, to_string(t.status));
    out += buf;
  }
  return out;
}

namespace {

nlohmann::json parse_object(const std::string& text) {
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object()) throw Error(Errc::InvalidInput, "expected a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

double condition_of(const MatX& m) {
  const Eigen::SelfAdjointEigenSolver<MatX> es(m, Eigen::EigenvaluesOnly);
  const VecX ev = es.eigenvalues().cwiseAbs();
  return ev.minCoeff() > 0 ? ev.maxCoeff() / ev.minCoeff() : std::numeric_limits<double>::infinity();
}

std::optional<OrthoschemeDecomposition> try_decompose(const std::vector<Vec3>& normals, const VecX& h) {
  SupportPolyhedron s;
  s.normals = normals;
  s.heights = h;
  try {
    return decompose(s);
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Solid angle of the cone spanned by unit vectors a, b, c.
double solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double num = std::abs(a.dot(b.cross(c)));
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

}  // namespace

MinkowskiProblem parse_minkowski_json(const std::string& text) {
  const nlohmann::json j = parse_object(text);
  if (!j.contains("normals") || !j.contains("areas")) {
    throw Error(Errc::InvalidInput, "Minkowski problem needs \"normals\" and \"areas\"");
  }
  MinkowskiProblem mp;
  try {
    for (const auto& n : j["normals"]) {
      if (!n.is_array() || n.size() != 3) throw Error(Errc::InvalidInput, "normals must be 3-vectors");
      mp.normals.emplace_back(n[0].get<double>(), n[1].get<double>(), n[2].get<double>());
    }
    const auto a = j["areas"].get<std::vector<double>>();
    mp.areas = Eigen::Map<const VecX>(a.data(), static_cast<Eigen::Index>(a.size()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidInput, std::string("bad Minkowski field: ") + e.what());
  }
  return mp;
}

Vec3 steiner_point(const SupportPolyhedron& s) {
  const OrthoschemeDecomposition d = decompose(s);
  Vec3 p = Vec3::Zero();
  for (const auto& t : d.vertex_triples) {
    const double omega = solid_angle(d.normals[t[0]], d.normals[t[1]], d.normals[t[2]]);
    p += omega / (4.0 * M_PI) * d.q_corner.at({t[0], t[1], t[2]});
  }
  return p;
}

MinkowskiResult minkowski_solve(const MinkowskiProblem& mp, const MinkowskiOptions& opt) {
  const int n = static_cast<int>(mp.normals.size());
  if (n < 4 || mp.areas.size() != n) throw Error(Errc::InvalidInput, "need n >= 4 normals with one area each");
  std::vector<Vec3> normals;
  for (const Vec3& v : mp.normals) {
    if (std::abs(v.norm() - 1.0) > 1e-9) throw Error(Errc::InvalidInput, "normals must be unit vectors");
    normals.push_back(v.normalized());
  }
  if ((mp.areas.array() <= 0.0).any()) throw Error(Errc::InvalidInput, "areas must be positive");
  const MatX t = translation_basis(normals);
  if (Eigen::JacobiSVD<MatX>(t).singularValues()[2] < 1e-9) throw Error(Errc::DegenerateSpan, "normals lie in a plane");
  const double total = mp.areas.sum();
  const Vec3 closure = t.transpose() * mp.areas;
  if (closure.norm() > 1e-9 * total) {
    throw Error(Errc::ClosednessViolated, "sum of C_i nu_i has norm " + std::to_string(closure.norm()));
  }

  // Orthonormal basis of {ḣ : Σ C_i ḣ_i = 0} ∩ translations^⊥.
  MatX m(n, 4);
  m.col(0) = mp.areas;
  m.rightCols(3) = t;
  const Eigen::HouseholderQR<MatX> qr(m);
  const MatX q = qr.householderQ();
  const MatX z = q.rightCols(n - 4);

  MinkowskiResult res;
  VecX h = VecX::Constant(n, 1.0 / total);
  auto d = try_decompose(normals, h);
  if (!d) throw Error(Errc::InvalidInput, "starting polytope is degenerate");
  double vol = volume(*d);
  res.trace.steps.push_back({0, vol, 0.0, 0.0, 0.0, false});
  res.trace.status = SolveStatus::MaxIterations;

  for (int it = 1;; ++it) {
    const VecX a = face_areas(*d);
    const VecX g = z.transpose() * a;
    if (g.norm() <= opt.gradient_tol * a.norm()) {
      res.trace.status = SolveStatus::Converged;
      break;
    }
    if (it > opt.max_iterations) break;
    const MatX r = z.transpose() * volume_hessian(*d).dense() * z;
    const VecX y = r.ldlt().solve(-g);
    const VecX dir = z * y;
    const double slope = g.dot(y);
    if (!(slope > 0.0)) {
      res.trace.status = SolveStatus::Diverged;
      res.trace.message = "reduced Hessian is not negative definite";
      break;
    }
    double step = 1.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k, step *= 0.5) {
      const VecX trial = h + step * dir;
      auto dt = try_decompose(normals, trial);  // a vanishing facet rejects the step
      if (!dt) continue;
      const double vt = volume(*dt);
      if (vt > vol + 1e-4 * step * slope || (vt > vol && k > 30)) {
        h = trial;
        d = std::move(dt);
        vol = vt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Rounding floor: no representable ascent left.
      res.trace.status = g.norm() <= 1e-9 * a.norm() ? SolveStatus::Converged : SolveStatus::Diverged;
      if (res.trace.status == SolveStatus::Diverged) res.trace.message = "line search failed";
      break;
    }
    res.trace.steps.push_back({it, vol, step * dir.norm(), condition_of(r), step, false});
  }
  if (res.trace.status != SolveStatus::Converged && res.trace.message.empty()) {
    res.trace.message = "iteration limit reached";
  }

  const VecX a = face_areas(*d);
  res.theta = 3.0 * vol;
  res.first_order_residual = (a.array() / (res.theta * mp.areas.array()) - 1.0).abs().maxCoeff();
  SupportPolyhedron out;
  out.normals = normals;
  out.heights = h / std::sqrt(res.theta);
  const Vec3 sp = steiner_point(out);
  out.heights -= t * sp;
  out = with_combinatorics(out);
  res.polyhedron = out;
  const VecX af = face_areas(decompose(out));
  res.max_area_error = (af.array() / mp.areas.array() - 1.0).abs().maxCoeff();
  return res;
}

AlexandrovProblem parse_alexandrov_json(const std::string& text) {
  const nlohmann::json j = parse_object(text);
  if (!j.contains("triangles") || !j.contains("lengths") || !j.contains("r_init")) {
    throw Error(Errc::InvalidInput, "Alexandrov problem needs \"triangles\", \"lengths\" and \"r_init\"");
  }
  AlexandrovProblem ap;
  try {
    ap.triangles = j["triangles"].get<std::vector<std::array<int, 3>>>();
    for (const auto& [key, value] : j["lengths"].items()) {
      int a = 0, b = 0;
      char tail = 0;
      if (std::sscanf(key.c_str(), "%d-%d%c", &a, &b, &tail) != 2 || a == b) {
        throw Error(Errc::InvalidInput, "length key \"" + key + "\" is not of the form i-j");
      }
      ap.lengths[{std::min(a, b), std::max(a, b)}] = value.get<double>();
    }
    const auto r = j["r_init"].get<std::vector<double>>();
    ap.r_init = Eigen::Map<const VecX>(r.data(), static_cast<Eigen::Index>(r.size()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidInput, std::string("bad Alexandrov field: ") + e.what());
  }
  return ap;
}

AlexandrovProblem alexandrov_problem(const VertexPolyhedron& p, const Vec3& apex) {
  const WarpedPolyhedron w = build(triangulate(p), apex);
  AlexandrovProblem ap;
  ap.triangles = w.triangles;
  for (const auto& e : w.edges) ap.lengths[{e.i, e.j}] = e.length;
  ap.r_init = w.r;
  return ap;
}

AlexandrovResult alexandrov_continuation(const AlexandrovProblem& ap, const AlexandrovOptions& opt) {
  AlexandrovResult res;
  WarpedPolyhedron w = build_from_metric(ap.triangles, ap.lengths, ap.r_init, false);
  const VecX delta = cone_defects(w);
  if ((delta.array() <= 0.0).any()) throw Error(Errc::InvalidInput, "a cone angle is not below 2*pi");
  res.polyhedron = w;
  SolveTrace& tr = res.trace;

  if (!is_admissible(w)) {
    tr.steps.push_back({0, std::numeric_limits<double>::infinity(), 0.0, 0.0, 0.0, false});
    tr.status = SolveStatus::AdmissibilityLost;
    try {
      check_admissible(w);
    } catch (const Error& e) {
      tr.message = std::string("initial radii are inadmissible: ") + e.what();
    }
    return res;
  }

  auto in_region = [&](const VecX& k) { return ((k.array() > 0.0) && (k.array() < delta.array())).all(); };
  WarpedState st = evaluate(w);
  tr.steps.push_back({0, st.kappa.cwiseAbs().maxCoeff(), 0.0, 0.0, 0.0, in_region(st.kappa)});
  tr.status = SolveStatus::MaxIterations;
  const int n = w.size();
  double mu = -1.0;

  for (int it = 1;; ++it) {
    if (st.kappa.cwiseAbs().maxCoeff() <= opt.tol) {
      tr.status = SolveStatus::Converged;
      break;
    }
    if (it > opt.max_iterations) {
      tr.message = "iteration limit reached";
      break;
    }
    const MatX j = he_hessian(w, st).dense();
    const MatX jtj = j.transpose() * j;
    const VecX g = j.transpose() * st.kappa;
    if (mu < 0) mu = 1e-6 * jtj.trace() / n;
    const double merit = st.kappa.norm();
    bool accepted = false, any_admissible = false;
    for (int rej = 0; rej <= opt.max_rejections; ++rej) {
      const MatX damped = jtj + mu * MatX::Identity(n, n);
      const VecX step = damped.ldlt().solve(-g);
      const WarpedPolyhedron trial = w.with_radii(w.r + step);
      if (is_admissible(trial)) {
        any_admissible = true;
        WarpedState ts = evaluate(trial);
        if (ts.kappa.norm() < merit) {
          w = trial;
          st = std::move(ts);
          tr.steps.push_back({it, st.kappa.cwiseAbs().maxCoeff(), step.norm(), condition_of(damped), mu, in_region(st.kappa)});
          mu /= 3.0;
          accepted = true;
          break;
        }
      }
      mu *= 10.0;
    }
    if (!accepted) {
      tr.status = any_admissible ? SolveStatus::Diverged : SolveStatus::AdmissibilityLost;
      tr.message = any_admissible ? "no damping reduces the curvature residual"
                                  : "every damped step leaves the admissible region";
      break;
    }
  }
  res.polyhedron = w;
  return res;
}

}  // namespace rigidlab
