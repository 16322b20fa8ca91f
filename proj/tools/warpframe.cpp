#include <iostream>

#include "CLI11.hpp"
#include "warpframe/cli.hpp"

int main(int argc, char** argv) {
  using namespace warpframe;
  CLI::App app{"Verify and reconstruct submanifolds of warped products eps I x_a M^N(c)"};
  app.require_subcommand(1);

  RunConfig config;
  double tol = 0.0;
  std::string report = "text", example, base_frame, out, out_dir;
  std::vector<std::string> params;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("inputs", config.inputs, "GeometricData document(s)");
    sub->add_option("--tol", tol, "Residual tolerance override");
    sub->add_option("--h-refine", config.h_refine, "Grid refinement factor (1, 2 or 4)");
    sub->add_option("--renorm-interval", config.renorm_interval, "Lattice distance between renormalizations");
    sub->add_flag("--no-renorm", "Disable renormalization onto the group");
    sub->add_flag("--force", config.force, "Reconstruct even when verification fails");
    sub->add_flag("--fd", config.finite_difference, "Finite-difference derivatives even when analytic ones are stored");
    sub->add_option("--report", report, "Report format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--example", example, "Run a named oracle fixture inline");
    sub->add_option("--param", params, "Fixture parameter key=value (repeatable)");
    sub->add_option("--base-frame", base_frame, "frame_matrix document with B0");
    sub->add_option("--out", out, "Write the report (or example document) here");
    sub->add_option("--out-dir", out_dir, "Directory for reconstruction files");
  };
  for (const char* name : {"validate", "verify", "reconstruct", "roundtrip", "examples"}) add_common(app.add_subcommand(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitIo;
  }

  auto* sub = app.get_subcommands().front();
  config.command = sub->get_name();
  if (sub->count("--tol")) config.tol = tol;
  config.renormalize = sub->count("--no-renorm") == 0;
  config.format = report == "json" ? ReportFormat::json : ReportFormat::text;
  if (!example.empty()) config.example = example;
  if (!base_frame.empty()) config.base_frame = base_frame;
  if (!out.empty()) config.out = out;
  if (!out_dir.empty()) config.out_dir = out_dir;
  for (const auto& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "--param expects key=value, got '" << kv << "'\n";
      return kExitIo;
    }
    config.params[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return run_command(config, std::cout, std::cerr);
}
