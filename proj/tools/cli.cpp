#include "cli.hpp"

#include "report_json.hpp"

#include "rigidlab/duality_lab.hpp"
#include "rigidlab/errors.hpp"
#include "rigidlab/gauss_rigidity.hpp"
#include "rigidlab/polyhedron_model.hpp"
#include "rigidlab/reconstruction_solvers.hpp"
#include "rigidlab/selftest.hpp"
#include "rigidlab/spherical_link.hpp"
#include "rigidlab/warped_metric.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace rigidlab::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kSynopsis =
    "usage: rigidlab <command> [FILE] [--tol-zero X] [--fd-step X] [--samples N] [--seed S] [--out DIR]\n"
    "commands: analyze-gauss analyze-metric duality-check sphere-check minkowski alexandrov spectrum selftest\n";

struct RunConfig {
  std::string command;
  std::string input;
  Tolerances tol;
  std::int64_t samples = 1000000;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::vector<double> apex;  // analyze-metric
  int polygon = 0;           // spectrum --regular-polygon
  double rho = 0.0;          // spectrum --rho
  std::vector<int> criteria;  // selftest --criterion
};

struct Outcome {
  bool pass = true;
  std::string summary;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidInput, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const RunConfig& cfg, const std::string& name, const std::string& text) {
  fs::create_directories(cfg.out_dir);
  const fs::path p = fs::path(cfg.out_dir) / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(Errc::InvalidInput, "cannot write " + p.string());
  out << text;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Two-column table of the scalar entries of a report.
std::string render_table(const json& report) {
  size_t width = 0;
  for (auto it = report.begin(); it != report.end(); ++it) {
    if (!it.value().is_structured()) width = std::max(width, it.key().size());
  }
  std::string out;
  for (auto it = report.begin(); it != report.end(); ++it) {
    if (it.value().is_structured()) continue;
    std::string v = it.value().is_number_float() ? num(it.value().get<double>()) : it.value().dump();
    if (it.value().is_string()) v = it.value().get<std::string>();
    out += it.key() + std::string(width + 2 - it.key().size(), ' ') + v + "\n";
  }
  return out;
}

void write_report(const RunConfig& cfg, json report) {
  report["command"] = cfg.command;
  if (!cfg.input.empty()) report["input"] = cfg.input;
  report["tolerances"] = {{"zero_eig_rel", cfg.tol.zero_eig_rel}, {"fd_step", cfg.tol.fd_step}};
  write_text(cfg, cfg.command + ".json", dump_report(report));
  write_text(cfg, cfg.command + ".txt", render_table(report));
}

std::string eigen_csv(const SpectrumSummary& s) {
  std::string out = "k,eigenvalue\n";
  for (int k = 0; k < s.order(); ++k) out += std::to_string(k) + "," + num(s.eigenvalues[k]) + "\n";
  return out;
}

json spectrum_json(const SpectrumSummary& s) {
  return {{"eigenvalues", s.eigenvalues}, {"n_pos", s.n_pos},         {"n_zero", s.n_zero},
          {"n_neg", s.n_neg},             {"corank", s.corank},       {"threshold", s.threshold}};
}

VertexPolyhedron load_polyhedron(const std::string& path, std::ostream& err) {
  const bool obj = fs::path(path).extension() == ".obj";
  const LoadResult lr = obj ? read_obj(path) : read_polyhedron_json(path);
  for (const std::string& w : lr.warnings) err << "warning: " << w << "\n";
  validate(lr.polyhedron);
  return lr.polyhedron;
}

SphericalPolytope load_spherical(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("normals")) throw Error(Errc::InvalidInput, "spherical polytope needs \"normals\"");
  std::vector<Vec4> u;
  for (const auto& n : j["normals"]) {
    if (!n.is_array() || n.size() != 4) throw Error(Errc::InvalidInput, "spherical normals must be 4-vectors");
    u.emplace_back(n[0].get<double>(), n[1].get<double>(), n[2].get<double>(), n[3].get<double>());
  }
  return build_spherical(u);
}

Outcome analyze_gauss(const RunConfig& cfg, std::ostream& err) {
  const VertexPolyhedron p = load_polyhedron(cfg.input, err);
  const SupportPolyhedron s = with_combinatorics(to_support(p));
  const GaussRigidityReport r = gauss_verdict(s, cfg.tol);
  json rep;
  rep["faces"] = s.size();
  rep["resolved_vertices"] = s.combinatorics->resolved_vertices;
  rep["spectrum"] = spectrum_json(r.spectrum);
  rep["corank"] = r.spectrum.corank;
  rep["kernel_angle"] = r.kernel_angle;
  rep["trivial_residual"] = r.trivial_residual;
  rep["homogeneity_residual"] = r.homogeneity_residual;
  rep["verdict"] = r.rigid ? "rigid" : "not rigid";
  write_report(cfg, rep);
  write_text(cfg, cfg.command + "-eigenvalues.csv", eigen_csv(r.spectrum));
  return {r.rigid, "D2Vol corank " + std::to_string(r.spectrum.corank) + ", " + (r.rigid ? "rigid" : "not rigid")};
}

Outcome analyze_metric(const RunConfig& cfg, std::ostream& err) {
  const VertexPolyhedron p = load_polyhedron(cfg.input, err);
  Vec3 apex = Vec3::Zero();
  if (!cfg.apex.empty()) apex = Vec3(cfg.apex[0], cfg.apex[1], cfg.apex[2]);
  const TriangulatedBoundary tb = triangulate(p);
  const WarpedPolyhedron w = build(tb, apex);
  const MetricRigidityReport r = metric_verdict(w, cfg.tol);
  json rep;
  rep["vertices"] = w.size();
  rep["diagonals"] = tb.diagonal_count();
  rep["apex"] = {apex.x(), apex.y(), apex.z()};
  rep["spectrum"] = spectrum_json(r.spectrum);
  rep["corank"] = r.spectrum.corank;
  rep["kernel_angle"] = r.kernel_angle;
  rep["trivial_residual"] = r.trivial_residual;
  rep["max_abs_kappa"] = r.max_abs_kappa;
  rep["verdict"] = r.rigid ? "rigid" : "not rigid";
  write_report(cfg, rep);
  write_text(cfg, cfg.command + "-eigenvalues.csv", eigen_csv(r.spectrum));
  write_text(cfg, cfg.command + "-edges.csv", edge_diagnostics_csv(w));
  return {r.rigid, "D2HE corank " + std::to_string(r.spectrum.corank) + ", " + (r.rigid ? "rigid" : "not rigid")};
}

Outcome duality_check(const RunConfig& cfg, std::ostream& err) {
  const VertexPolyhedron p = load_polyhedron(cfg.input, err);
  const HessianDuality d = hessian_duality(p);
  const bool pass = d.deviation <= 1e-7;
  json rep;
  rep["deviation"] = d.deviation;
  rep["bound"] = 1e-7;
  rep["he_max_abs"] = d.he.max_abs();
  rep["vol_max_abs"] = d.vol.max_abs();
  rep["pass"] = pass;
  write_report(cfg, rep);
  char buf[96];
  std::snprintf(buf, sizeof buf, "|D2HE - D2Vol*| / |D2HE| = %.3e, %s", d.deviation, pass ? "pass" : "fail");
  return {pass, buf};
}

Outcome sphere_check(const RunConfig& cfg, std::ostream&) {
  const SphericalPolytope p = load_spherical(cfg.input);
  const SphericalPolytope pd = dual(p);
  const std::uint64_t samples = static_cast<std::uint64_t>(cfg.samples);
  const std::uint64_t seed = *cfg.seed;
  const double gb = gauss_bonnet_residual(p, pd);
  const McMullenEstimate m = mcmullen_pi2_check(p, samples, seed);
  const SteinerEstimate st = steiner_checks(p, samples, seed);
  const bool gb_pass = std::abs(gb) <= 1e-9;
  const bool pass = gb_pass && m.pass && st.pass;
  json rep;
  rep["seed"] = seed;
  rep["samples"] = samples;
  rep["gauss_bonnet"] = {{"residual", gb}, {"pass", gb_pass}};
  rep["pi2_identity"] = {{"estimate", m.lhs},      {"target", M_PI * M_PI}, {"stderr", m.std_error},
                         {"sigmas", m.sigmas},     {"vol", m.vol_p},        {"vol_dual", m.vol_dual},
                         {"pairing", m.pairing},   {"pass", m.pass}};
  rep["steiner"] = {{"sum", st.sum},
                    {"alternating", st.alternating},
                    {"stderr", st.std_error},
                    {"pass", st.pass}};
  rep["pass"] = pass;
  write_report(cfg, rep);
  char buf[160];
  std::snprintf(buf, sizeof buf, "pi^2 identity %.6f vs %.6f (%.2f sigma), Gauss-Bonnet %.1e, %s", m.lhs, M_PI * M_PI,
                m.sigmas, gb, pass ? "pass" : "fail");
  return {pass, buf};
}

Outcome minkowski(const RunConfig& cfg, std::ostream&) {
  const MinkowskiProblem mp = parse_minkowski_json(read_text(cfg.input));
  const MinkowskiResult r = minkowski_solve(mp);
  const bool pass = r.trace.status == SolveStatus::Converged && r.max_area_error <= 1e-6;
  json rep;
  rep["status"] = to_string(r.trace.status);
  rep["message"] = r.trace.message;
  rep["iterations"] = r.trace.iterations();
  rep["heights"] = std::vector<double>(r.polyhedron.heights.data(), r.polyhedron.heights.data() + r.polyhedron.size());
  rep["theta"] = r.theta;
  rep["first_order_residual"] = r.first_order_residual;
  rep["max_area_error"] = r.max_area_error;
  write_report(cfg, rep);
  write_text(cfg, cfg.command + "-trace.csv", trace_dump(r.trace));
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s in %d iterations, max |A/C - 1| = %.1e", to_string(r.trace.status),
                r.trace.iterations(), r.max_area_error);
  return {pass, buf};
}

Outcome alexandrov(const RunConfig& cfg, std::ostream&) {
  const AlexandrovProblem ap = parse_alexandrov_json(read_text(cfg.input));
  const AlexandrovResult r = alexandrov_continuation(ap);
  const bool pass = r.trace.status == SolveStatus::Converged;
  json rep;
  rep["status"] = to_string(r.trace.status);
  rep["message"] = r.trace.message;
  rep["iterations"] = r.trace.iterations();
  rep["radii"] = std::vector<double>(r.polyhedron.r.data(), r.polyhedron.r.data() + r.polyhedron.size());
  rep["max_abs_kappa"] = r.trace.steps.back().merit;
  if (is_admissible(r.polyhedron)) {
    const WarpedState st = evaluate(r.polyhedron);
    json edges = json::array();
    for (size_t e = 0; e < r.polyhedron.edges.size(); ++e) {
      edges.push_back({{"i", r.polyhedron.edges[e].i}, {"j", r.polyhedron.edges[e].j}, {"lambda", st.lambda[e]}});
    }
    rep["edges"] = edges;
  }
  write_report(cfg, rep);
  write_text(cfg, cfg.command + "-trace.csv", trace_dump(r.trace));
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s in %d iterations, max |kappa| = %.1e", to_string(r.trace.status),
                r.trace.iterations(), r.trace.steps.back().merit);
  return {pass, buf};
}

Outcome spectrum(const RunConfig& cfg, std::ostream&) {
  const int m = cfg.polygon;
  const double a = 2.0 * M_PI / m;
  const double scale = cfg.rho > 0 ? 1.0 / (std::sin(cfg.rho) * std::sin(cfg.rho)) : 1.0;
  std::vector<double> closed;
  for (int k = 1; k <= m; ++k) closed.push_back(scale * 2.0 * (std::cos(k * a) - std::cos(a)) / std::sin(a));
  const SymMatrix h = cfg.rho > 0 ? d2k_matrix(WarpedSphericalPolygon::regular(m, cfg.rho))
                                  : polygon_hessian(PolygonSupportState::regular(m));
  const SpectrumSummary s = eigen_sym(h);
  std::vector<double> sorted = closed;
  std::sort(sorted.begin(), sorted.end());
  double worst = 0.0;
  for (int k = 0; k < m; ++k) worst = std::max(worst, std::abs(s.eigenvalues[k] - sorted[k]));
  std::string csv = "k,closed_form\n";
  for (int k = 1; k <= m; ++k) csv += std::to_string(k) + "," + num(closed[k - 1]) + "\n";
  const bool pass = worst <= 1e-10;
  json rep;
  rep["m"] = m;
  if (cfg.rho > 0) rep["rho"] = cfg.rho;
  rep["closed_form"] = closed;
  rep["computed"] = s.eigenvalues;
  rep["max_abs_error"] = worst;
  rep["pass"] = pass;
  write_report(cfg, rep);
  write_text(cfg, cfg.command + ".csv", csv);
  char buf[96];
  std::snprintf(buf, sizeof buf, "m = %d, max |computed - closed form| = %.1e", m, worst);
  return {pass, buf};
}

Outcome selftest(const RunConfig& cfg, std::ostream& out) {
  SelftestOptions opt;
  opt.seed = *cfg.seed;
  opt.samples = cfg.samples;
  opt.tol = cfg.tol;
  json crit = json::array();
  int passed = 0, total = 0;
  for (const CriterionResult& r : run_acceptance(opt, cfg.criteria)) {
    out << format_line(r) << "\n";
    ++total;
    passed += r.pass;
    // Timings stay out of the JSON so reruns are byte-identical.
    crit.push_back({{"id", r.id},
                    {"title", r.title},
                    {"pass", r.pass},
                    {"worst", r.worst},
                    {"bound", r.bound},
                    {"checks", r.trials},
                    {"detail", r.detail}});
  }
  json rep;
  rep["seed"] = opt.seed;
  rep["samples"] = opt.samples;
  rep["criteria"] = crit;
  rep["passed"] = passed;
  rep["total"] = total;
  write_report(cfg, rep);
  return {passed == total, std::to_string(passed) + "/" + std::to_string(total) + " criteria pass"};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rigidity analyses of convex polyhedra", "rigidlab"};
  app.fallthrough();
  app.require_subcommand(1);
  RunConfig cfg;
  double tol_zero = cfg.tol.zero_eig_rel;
  double fd_step = cfg.tol.fd_step;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = app.add_option("--seed", seed, "Seed for Monte Carlo estimates");
  app.add_option("--tol-zero", tol_zero, "Relative threshold for zero eigenvalues")->check(CLI::PositiveNumber);
  app.add_option("--fd-step", fd_step, "Finite-difference step")->check(CLI::PositiveNumber);
  app.add_option("--samples", cfg.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out_dir, "Output directory for reports");

  auto file_command = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("file", cfg.input, "Input file")->required();
    return sub;
  };
  CLI::App* gauss = file_command("analyze-gauss", "D2Vol spectrum and Gauss rigidity verdict");
  CLI::App* metric = file_command("analyze-metric", "D2HE spectrum and metric rigidity verdict");
  metric->add_option("--apex", cfg.apex, "Apex position x y z (default origin)")->expected(3);
  CLI::App* duality = file_command("duality-check", "Compare D2HE(P) with D2Vol of the polar dual");
  CLI::App* sphere = file_command("sphere-check", "Spherical duality identities for a polytope in S3");
  CLI::App* mink = file_command("minkowski", "Solve a Minkowski problem");
  CLI::App* alex = file_command("alexandrov", "Realize a boundary metric by continuation");
  CLI::App* spec = app.add_subcommand("spectrum", "Closed-form circulant spectra");
  spec->add_option("--regular-polygon", cfg.polygon, "Number of sides m >= 3")->required()->check(CLI::Range(3, 1000));
  spec->add_option("--rho", cfg.rho, "Radial side of a regular link instead of a planar polygon")
      ->check(CLI::Range(0.0, M_PI));
  CLI::App* self = app.add_subcommand("selftest", "Run the acceptance criteria");
  self->add_option("--criterion", cfg.criteria, "Run only these criteria (1-10)")->check(CLI::Range(1, 10));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kPass;
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << kSynopsis;
    return kUsage;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.tol.zero_eig_rel = tol_zero;
  cfg.tol.fd_step = fd_step;
  if (*seed_opt) cfg.seed = seed;
  if ((sphere->parsed() || self->parsed()) && !cfg.seed) {
    err << cfg.command << ": --seed is required\n" << kSynopsis;
    return kUsage;
  }

  try {
    Outcome o;
    if (gauss->parsed()) o = analyze_gauss(cfg, err);
    else if (metric->parsed()) o = analyze_metric(cfg, err);
    else if (duality->parsed()) o = duality_check(cfg, err);
    else if (sphere->parsed()) o = sphere_check(cfg, err);
    else if (mink->parsed()) o = minkowski(cfg, err);
    else if (alex->parsed()) o = alexandrov(cfg, err);
    else if (spec->parsed()) o = spectrum(cfg, err);
    else o = selftest(cfg, out);
    out << cfg.command << ": " << o.summary << "\n";
    return o.pass ? kPass : kVerdictFail;
  } catch (const std::exception& e) {
    err << cfg.command << ": error: " << e.what() << "\n";
    return kError;
  }
}

}  // namespace rigidlab::cli
