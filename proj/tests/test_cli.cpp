#include <doctest.h>

#include "cli.hpp"
#include "report_json.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using rigidlab::cli::run;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(RIGIDLAB_DATA_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rigidlab_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("analyze-metric on the cube reports corank 3") {
  const fs::path dir = scratch("metric");
  const Run r = invoke({"analyze-metric", data("cube.json"), "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("corank 3") != std::string::npos);
  const auto rep = nlohmann::json::parse(slurp(dir / "analyze-metric.json"));
  CHECK(rep["corank"] == 3);
  CHECK(rep["verdict"] == "rigid");
  CHECK(fs::exists(dir / "analyze-metric-edges.csv"));
  CHECK(fs::exists(dir / "analyze-metric.txt"));
}

TEST_CASE("analyze-gauss verdicts") {
  const fs::path dir = scratch("gauss");
  CHECK(invoke({"analyze-gauss", data("cube.json"), "--out", dir.string()}).code == 0);
  // A huge zero threshold swallows the nonzero eigenvalues.
  CHECK(invoke({"analyze-gauss", data("cube.json"), "--tol-zero", "0.9", "--out", dir.string()}).code == 2);
}

TEST_CASE("spectrum of the regular pentagon") {
  const fs::path dir = scratch("spectrum");
  const Run r = invoke({"spectrum", "--regular-polygon", "5", "--out", dir.string()});
  CHECK(r.code == 0);
  std::istringstream csv(slurp(dir / "spectrum.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "k,closed_form");
  int rows = 0;
  while (std::getline(csv, line)) {
    const int k = std::stoi(line.substr(0, line.find(',')));
    const double v = std::stod(line.substr(line.find(',') + 1));
    const double a = 2 * M_PI / 5;
    CHECK(v == doctest::Approx(2 * (std::cos(k * a) - std::cos(a)) / std::sin(a)));
    ++rows;
  }
  CHECK(rows == 5);
}

TEST_CASE("sphere-check is reproducible") {
  const fs::path a = scratch("sphere_a");
  const fs::path b = scratch("sphere_b");
  const Run r = invoke({"sphere-check", data("simplex.json"), "--samples", "1000000", "--seed", "7", "--out", a.string()});
  CHECK(r.code == 0);
  CHECK(invoke({"sphere-check", data("simplex.json"), "--samples", "1000000", "--seed", "7", "--out", b.string()}).code == 0);
  CHECK(slurp(a / "sphere-check.json") == slurp(b / "sphere-check.json"));
  const auto rep = nlohmann::json::parse(slurp(a / "sphere-check.json"));
  CHECK(rep["seed"] == 7);
  CHECK(rep["pi2_identity"]["sigmas"].get<double>() <= 4.0);
}

TEST_CASE("solver commands") {
  const fs::path dir = scratch("solvers");
  const Run m = invoke({"minkowski", data("box_minkowski.json"), "--out", dir.string()});
  CHECK(m.code == 0);
  const auto mr = nlohmann::json::parse(slurp(dir / "minkowski.json"));
  CHECK(mr["status"] == "Converged");
  CHECK(mr["max_area_error"].get<double>() <= 1e-6);
  CHECK(slurp(dir / "minkowski-trace.csv").rfind("iteration,merit", 0) == 0);

  const Run a = invoke({"alexandrov", data("cube_alexandrov.json"), "--out", dir.string()});
  CHECK(a.code == 0);
  const auto ar = nlohmann::json::parse(slurp(dir / "alexandrov.json"));
  CHECK(ar["status"] == "Converged");
  CHECK(ar["max_abs_kappa"].get<double>() <= 1e-10);
}

TEST_CASE("duality-check") {
  const fs::path dir = scratch("duality");
  CHECK(invoke({"duality-check", data("octahedron.json"), "--out", dir.string()}).code == 0);
}

TEST_CASE("selftest subset") {
  const fs::path dir = scratch("selftest");
  const Run r = invoke({"selftest", "--criterion", "3", "--criterion", "9", "--seed", "7", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("criterion  3 PASS") != std::string::npos);
  CHECK(r.out.find("criterion  9 PASS") != std::string::npos);
  const auto rep = nlohmann::json::parse(slurp(dir / "selftest.json"));
  CHECK(rep["total"] == 2);
}

TEST_CASE("usage errors exit 64") {
  CHECK(invoke({}).code == 64);
  CHECK(invoke({"frobnicate"}).code == 64);
  CHECK(invoke({"analyze-gauss", data("cube.json"), "--bogus"}).code == 64);
  CHECK(invoke({"analyze-gauss"}).code == 64);
  CHECK(invoke({"sphere-check", data("simplex.json")}).code == 64);
  CHECK(invoke({"selftest"}).code == 64);
  CHECK(invoke({"spectrum", "--regular-polygon", "2"}).code == 64);
  const Run r = invoke({"analyze-gauss", data("cube.json"), "--tol-zero", "-1"});
  CHECK(r.code == 64);
  CHECK(r.err.find("usage: rigidlab") != std::string::npos);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("runtime errors exit 1") {
  const fs::path dir = scratch("errors");
  fs::create_directories(dir);
  const Run missing = invoke({"analyze-gauss", (dir / "nope.json").string(), "--out", dir.string()});
  CHECK(missing.code == 1);
  std::ofstream(dir / "dented.json") << R"({"vertices": [[0,0,0],[1,0,0],[0,1,0],[0,0,1],[0.1,0.1,0.1]],
    "faces": [[0,2,1],[0,1,3],[0,3,2],[1,2,3]]})";
  CHECK(invoke({"analyze-gauss", (dir / "dented.json").string(), "--out", dir.string()}).code == 1);
  std::ofstream(dir / "open.json") << R"({"normals": [[1,0,0],[-1,0,0],[0,1,0],[0,-1,0]], "areas": [1,1,1,1]})";
  const Run flat = invoke({"minkowski", (dir / "open.json").string(), "--out", dir.string()});
  CHECK(flat.code == 1);
  CHECK(flat.err.find("DegenerateSpan") != std::string::npos);
}

TEST_CASE("report JSON is sorted with 17 significant digits") {
  nlohmann::json j;
  j["zeta"] = 0.1;
  j["alpha"] = {{"b", 1}, {"a", 1.0 / 3.0}};
  j["list"] = {1.5, 2};
  j["inf"] = std::numeric_limits<double>::infinity();
  const std::string s = rigidlab::cli::dump_report(j);
  CHECK(s.find("\"alpha\"") < s.find("\"inf\""));
  CHECK(s.find("\"inf\"") < s.find("\"zeta\""));
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("0.33333333333333331") != std::string::npos);
  CHECK(s.find("[1.5, 2]") != std::string::npos);
  CHECK(s.find("\"inf\": \"inf\"") != std::string::npos);
  CHECK(nlohmann::json::parse(s)["alpha"]["a"].get<double>() == 1.0 / 3.0);
}
