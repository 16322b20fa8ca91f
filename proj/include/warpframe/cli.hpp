#pragma once

// Command implementations behind the warpframe tool, plus the point-cloud and
// frame formats it writes.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "warpframe/immersion.hpp"
#include "warpframe/oracle.hpp"

namespace warpframe {

enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitFailed = 2, kExitBlowUp = 3 };

enum class ReportFormat { text, json };

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::optional<double> tol;
  int h_refine = 1;
  int renorm_interval = 16;
  bool renormalize = true;
  bool force = false;
  bool finite_difference = false;
  ReportFormat format = ReportFormat::text;
  std::optional<std::string> example;
  Params params;
  std::optional<std::string> base_frame;
  std::optional<std::string> out;      // report or document path
  std::optional<std::string> out_dir;  // directory for reconstruction files

  /// Throws std::invalid_argument on a bad tolerance or refinement factor.
  void validate() const;
};

int validate_command(const RunConfig& config, std::ostream& out, std::ostream& err);
int verify_command(const RunConfig& config, std::ostream& out, std::ostream& err);
int reconstruct_command(const RunConfig& config, std::ostream& out, std::ostream& err);
int roundtrip_command(const RunConfig& config, std::ostream& out, std::ostream& err);
int examples_command(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Dispatch on config.command.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

/// CSV: node, grid indices i0.., f_0..f_N, t. Numbers in shortest round-trip form.
std::string immersion_to_csv(const ImmersionField& imm);
/// Reads points back; spec and grid must be supplied since the CSV does not carry them.
ImmersionField immersion_from_csv(const std::string& text, const SignatureSpec& spec, const ChartGrid& grid);

/// Frames as {"format_version", "kind": "immersion_frames", "size", "nodes", "data"}.
nlohmann::json frames_to_json(const ImmersionField& imm);
std::vector<Eigen::MatrixXd> frames_from_json(const nlohmann::json& j);

nlohmann::json frame_field_diagnostics(const FrameField& field);

}  // namespace warpframe
