#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "warpframe/cli.hpp"
#include "warpframe/io.hpp"
#include "warpframe/oracle.hpp"

using namespace warpframe;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("warpframe_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run tool(const std::string& args, const std::string& env = "") {
  const auto dir = fs::temp_directory_path();
  const auto o = (dir / "warpframe_cli_stdout").string(), e = (dir / "warpframe_cli_stderr").string();
  const std::string cmd = env + " \"" + std::string(WARPFRAME_TOOL) + "\" " + args + " > " + o + " 2> " + e;
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_text_file(o), read_text_file(e)};
}

std::string write_example(const fs::path& dir, const std::string& name, const GeometricData& d) {
  const auto p = (dir / (name + ".json")).string();
  save_data_file(d, p);
  return p;
}

}  // namespace

TEST_CASE("verify exit codes") {
  const auto dir = scratch("verify");
  const auto slice = write_example(dir, "slice", canonical_example("slice").data);
  auto r = tool("verify " + slice);
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("all residuals pass") != std::string::npos);

  auto broken = canonical_example("helix", {{"n", "2"}, {"extent", "17"}}).data;
  const std::size_t node = broken.grid.linear({8, 8});
  broken.fields.alpha[node * broken.m() * 4] += 0.1;
  broken.derivatives.clear();  // a perturbed field has no analytic derivative
  const auto bad = write_example(dir, "broken_alpha", broken);
  r = tool("verify " + bad + " --report json");
  CHECK(r.code == kExitFailed);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["pass"] == false);
  bool names_e = false;
  for (const auto& e : j["equations"])
    if (e["name"] == "E") names_e = e["pass"] == false;
  CHECK(names_e);

  CHECK(tool("verify " + (dir / "missing.json").string()).code == kExitIo);
  write_text_file((dir / "junk.json").string(), "{\"format_version\": 1}");
  CHECK(tool("verify " + (dir / "junk.json").string()).code == kExitIo);
  CHECK(tool("verify --example slice").code == kExitOk);
  CHECK(tool("verify --example torus").code == kExitIo);
  CHECK(tool("verify " + slice + " --tol -1").code == kExitIo);
  CHECK(tool("verify " + slice + " --h-refine 3").code == kExitIo);
  CHECK(tool("frobnicate").code == kExitIo);
}

TEST_CASE("validate reports invariant violations with exit 2") {
  const auto dir = scratch("validate");
  auto d = canonical_example("slice").data;
  CHECK(tool("validate " + write_example(dir, "ok", d)).code == kExitOk);
  d.fields.alpha[40 * 4 + 1] += 0.1;
  const auto r = tool("validate " + write_example(dir, "asym", d));
  CHECK(r.code == kExitFailed);
  CHECK(r.err.find("alpha is not symmetric") != std::string::npos);
}

TEST_CASE("reconstruct writes files and records the refinement ratio") {
  const auto dir = scratch("reconstruct");
  const auto helix = write_example(dir, "helix", canonical_example("helix").data);
  const auto r = tool("reconstruct " + helix + " --h-refine 2 --out-dir " + dir.string());
  REQUIRE(r.code == kExitOk);
  CHECK(fs::exists(dir / "immersion.csv"));
  CHECK(fs::exists(dir / "immersion_h2.csv"));
  CHECK(fs::exists(dir / "frames.json"));
  CHECK(fs::exists(dir / "frames_h2.json"));
  const auto rep = read_json_file((dir / "report.json").string());
  CHECK(rep["levels"].size() == 2);
  CHECK(rep["defect_ratio"].get<double>() == doctest::Approx(4.0).epsilon(0.15));

  const auto sdir = scratch("reconstruct_slice");
  const auto slice = write_example(sdir, "slice", canonical_example("slice").data);
  REQUIRE(tool("reconstruct " + slice + " --out-dir " + sdir.string()).code == kExitOk);
  const auto srep = read_json_file((sdir / "report.json").string());
  CHECK(srep["levels"][0]["immersion_report"]["max_quadric_defect"].get<double>() <= 1e-8);
}

TEST_CASE("reconstruct rejects a base frame outside the admissible set") {
  const auto dir = scratch("bad_b0");
  const auto d = canonical_example("helix").data;
  const auto helix = write_example(dir, "helix", d);
  Eigen::MatrixXd B0 = Eigen::MatrixXd::Identity(d.spec.size(), d.spec.size());
  B0(0, 1) = 0.3;
  const auto b0 = (dir / "bad_B0.json").string();
  write_text_file(b0, frame_matrix_to_json(B0).dump());
  const auto r = tool("reconstruct " + helix + " --base-frame " + b0 + " --out-dir " + dir.string());
  CHECK(r.code == kExitFailed);
  CHECK(r.err.find("base frame is not in Z(x0)") != std::string::npos);
}

TEST_CASE("reconstruct refuses data that fails verification unless forced") {
  const auto dir = scratch("force");
  auto d = canonical_example("great_subsphere", {{"r", "0.8"}}).data;
  d.fields.alpha[d.grid.linear({8, 8}) * d.m() * 4] += 0.1;
  d.derivatives.clear();
  const auto p = write_example(dir, "bent", d);
  CHECK(tool("reconstruct " + p + " --out-dir " + dir.string()).code == kExitFailed);
  CHECK(tool("reconstruct " + p + " --force --out-dir " + dir.string()).code == kExitFailed);
}

TEST_CASE("non-finite input blows up the integrator with exit 3") {
  const auto dir = scratch("blowup");
  auto d = canonical_example("helix").data;
  d.fields.omega_bundle[7 * 4 + 1] = 1e308;  // skew pair (u, v) = (0, 1) at node 7
  d.fields.omega_bundle[7 * 4 + 2] = -1e308;
  d.derivatives.clear();
  const auto p = write_example(dir, "huge", d);
  CHECK(tool("reconstruct " + p + " --force --out-dir " + dir.string()).code == kExitBlowUp);
}

TEST_CASE("roundtrip on the examples") {
  const auto dir = scratch("roundtrip");
  CHECK(tool("roundtrip --example slice --out-dir " + dir.string()).code == kExitOk);
  CHECK(tool("roundtrip --example helix --param n=2 --param extent=17 --h-refine 2 --out-dir " + dir.string()).code ==
        kExitOk);
  auto d = canonical_example("slice").data;
  d.source.reset();
  CHECK(tool("roundtrip " + write_example(dir, "anon", d)).code == kExitIo);
}

TEST_CASE("examples command") {
  const auto dir = scratch("examples");
  auto r = tool("examples");
  CHECK(r.code == kExitOk);
  for (const auto& name : example_names()) CHECK(r.out.find(name) != std::string::npos);
  REQUIRE(tool("examples --out-dir " + dir.string()).code == kExitOk);
  for (const auto& name : example_names()) {
    const auto back = load_data_file((dir / (name + ".json")).string());
    CHECK(serialize(back) == serialize(canonical_example(name).data));
  }
  r = tool("examples --example helix --param n=2 --param extent=9");
  REQUIRE(r.code == kExitOk);
  CHECK(parse_data(nlohmann::json::parse(r.out)).grid.extents == std::vector<int>{9, 9});
}

TEST_CASE("output is independent of the worker count") {
  const auto a = tool("verify --example helix --param n=2 --report json", "WARPFRAME_THREADS=1");
  const auto b = tool("verify --example helix --param n=2 --report json", "WARPFRAME_THREADS=5");
  CHECK(a.code == b.code);
  CHECK(a.out == b.out);
}

TEST_CASE("emitted point sets and frames round trip bit-exactly") {
  const auto dir = scratch("formats");
  REQUIRE(tool("reconstruct --example lorentz_cylinder --out-dir " + dir.string()).code == kExitOk);
  const auto ex = canonical_example("lorentz_cylinder");
  const std::string csv = read_text_file((dir / "immersion.csv").string());
  const auto imm = immersion_from_csv(csv, ex.data.spec, ex.data.grid);
  CHECK(immersion_to_csv(imm) == csv);

  const std::string fj = read_text_file((dir / "frames.json").string());
  auto withframes = imm;
  withframes.frames = frames_from_json(nlohmann::json::parse(fj));
  CHECK(withframes.frames.size() == ex.data.grid.node_count());
  CHECK(frames_to_json(withframes).dump() == fj);

  CHECK_THROWS_AS(immersion_from_csv("node,x\n0,1\n", ex.data.spec, ex.data.grid), SchemaError);
  CHECK_THROWS_AS(frames_from_json(nlohmann::json::object()), SchemaError);
}

TEST_CASE("RunConfig validation") {
  RunConfig c;
  c.command = "verify";
  CHECK_NOTHROW(c.validate());
  c.h_refine = 4;
  CHECK_NOTHROW(c.validate());
  c.h_refine = 3;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.h_refine = 1;
  c.tol = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  std::ostringstream out, err;
  RunConfig e;
  e.command = "examples";
  CHECK(run_command(e, out, err) == kExitOk);
  CHECK(out.str().find("helix") != std::string::npos);
}
