#include "warpframe/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "warpframe/frame_solver.hpp"
#include "warpframe/io.hpp"
#include "warpframe/verifier.hpp"

namespace warpframe {

void RunConfig::validate() const {
  if (tol && !(*tol > 0.0)) throw std::invalid_argument("--tol must be positive");
  if (h_refine != 1 && h_refine != 2 && h_refine != 4) throw std::invalid_argument("--h-refine must be 1, 2 or 4");
  if (renormalize && renorm_interval < 1) throw std::invalid_argument("--renorm-interval must be positive");
}

namespace {

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view s) {
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw SchemaError("bad number in CSV: '" + std::string(s) + "'");
  return x;
}

struct Level {
  int factor = 1;
  GeometricData data;
  std::optional<ExplicitImmersion> truth;
};

Params level_params(Params p, int factor) {
  if (factor == 1) return p;
  const int extent = std::stoi(p.at("extent"));
  const double h = std::stod(p.at("h"));
  p["extent"] = std::to_string((extent - 1) * factor + 1);
  p["h"] = shortest(h / factor);
  return p;
}

/// The input document (or inline example) at refinement `factor`, with the generating
/// immersion when the provenance is known.
Level load_level(const RunConfig& config, int factor) {
  Level out;
  out.factor = factor;
  if (config.example) {
    const auto base = example_immersion(*config.example, config.params);
    const Params resolved = base.tag->params;
    auto ex = canonical_example(*config.example, level_params(resolved, factor));
    out.data = std::move(ex.data);
    out.truth = std::move(ex.immersion);
    return out;
  }
  if (config.inputs.empty()) throw std::invalid_argument("no input document (give a path or --example NAME)");
  GeometricData data = load_data_file(config.inputs.front());
  if (factor > 1) data = refine_example(data, factor);
  if (data.source) out.truth = example_immersion(data.source->family, data.source->params);
  out.data = std::move(data);
  return out;
}

VerifyOptions verify_options(const RunConfig& config) {
  VerifyOptions v;
  v.tol = config.tol;
  v.mode = config.finite_difference ? DerivativeMode::finite_difference : DerivativeMode::prefer_analytic;
  return v;
}

void emit(const RunConfig& config, std::ostream& out, const nlohmann::json& j, const std::string& text) {
  const std::string body = config.format == ReportFormat::json ? j.dump(2) + "\n" : text;
  if (config.out)
    write_text_file(*config.out, body);
  else
    out << body;
}

std::filesystem::path output_dir(const RunConfig& config) {
  std::filesystem::path dir = config.out_dir.value_or(".");
  std::filesystem::create_directories(dir);
  return dir;
}

std::string level_suffix(int factor) { return factor == 1 ? "" : "_h" + std::to_string(factor); }

/// Runs a handler and maps the library's exceptions onto exit codes.
template <class Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const InvariantError& e) {
    err << "invariant violation: " << e.what() << "\n";
    return kExitFailed;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IntegrationError& e) {
    err << e.what() << "\n";
    return e.kind == IntegrationError::Kind::blow_up ? kExitBlowUp : kExitFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

struct Reconstruction {
  int factor = 1;
  double h = 0.0;
  FrameField field;
  ImmersionField immersion;
  ImmersionReport report;
  std::optional<Alignment> alignment;
  std::string alignment_note;
};

Reconstruction reconstruct_level(const RunConfig& config, const Level& level, const Eigen::MatrixXd* base_frame) {
  Reconstruction r;
  r.factor = level.factor;
  r.h = level.data.grid.max_spacing();
  IntegrationOptions options;
  options.renormalize = config.renormalize;
  options.renorm_interval = config.renorm_interval;
  const Eigen::MatrixXd B0 = base_frame ? *base_frame : default_base_frame(level.data);
  r.field = integrate_frame(level.data, B0, options);
  r.immersion = extract_immersion(r.field, level.data);
  r.report = verify_immersion(r.immersion, level.data, config.tol);
  if (level.truth) {
    try {
      r.alignment = congruence_align(r.immersion, sample_immersion(*level.truth), level.data.warping);
    } catch (const std::invalid_argument& e) {
      r.alignment_note = e.what();
    }
  }
  return r;
}

nlohmann::json reconstruction_json(const Reconstruction& r) {
  nlohmann::json j = {{"factor", r.factor},
                      {"frame_field", frame_field_diagnostics(r.field)},
                      {"immersion_report", immersion_report_to_json(r.report)}};
  if (r.alignment)
    j["alignment"] = {{"defect", r.alignment->defect}, {"t_shift", r.alignment->t_shift}, {"rounds", r.alignment->rounds}};
  else if (!r.alignment_note.empty())
    j["alignment"] = {{"note", r.alignment_note}};
  return j;
}

std::string reconstruction_text(const Reconstruction& r) {
  std::ostringstream os;
  os << "level h/" << r.factor << ": steps " << r.field.steps << ", group defect " << r.field.max_group_defect
     << ", row defect " << r.field.max_row_defect << "\n";
  os << immersion_report_to_text(r.report);
  if (r.alignment) os << "alignment defect " << r.alignment->defect << "\n";
  else if (!r.alignment_note.empty()) os << "alignment: " << r.alignment_note << "\n";
  return os.str();
}

/// Shared by reconstruct and roundtrip; `need_alignment` also requires the congruence defect within tolerance.
int run_reconstruction(const RunConfig& config, std::ostream& out, std::ostream& err, bool need_alignment,
                       bool write_files) {
  std::vector<int> factors = {1};
  if (config.h_refine > 1) factors.push_back(config.h_refine);
  std::optional<Eigen::MatrixXd> B0;
  if (config.base_frame) {
    if (config.h_refine > 1) throw std::invalid_argument("--base-frame cannot be combined with --h-refine");
    B0 = frame_matrix_from_json(read_json_file(*config.base_frame));
  }

  std::vector<Reconstruction> runs;
  for (int f : factors) {
    const Level level = load_level(config, f);
    if (!config.force) {
      const auto rep = full_report(level.data, verify_options(config));
      if (!rep.pass()) {
        err << "input fails verification (" << rep.failing().front() << "); use --force to reconstruct anyway\n";
        return kExitFailed;
      }
    }
    if (need_alignment && !level.truth) throw std::invalid_argument("roundtrip needs --example or a document with 'source'");
    runs.push_back(reconstruct_level(config, level, B0 ? &*B0 : nullptr));
    if (write_files) {
      const auto dir = output_dir(config);
      const std::string sfx = level_suffix(f);
      write_text_file((dir / ("immersion" + sfx + ".csv")).string(), immersion_to_csv(runs.back().immersion));
      write_text_file((dir / ("frames" + sfx + ".json")).string(), frames_to_json(runs.back().immersion).dump());
    }
  }

  nlohmann::json j = {{"format_version", kFormatVersion}, {"kind", need_alignment ? "roundtrip" : "reconstruction"}};
  nlohmann::json levels = nlohmann::json::array();
  std::string text;
  bool ok = true;
  for (const auto& r : runs) {
    levels.push_back(reconstruction_json(r));
    text += reconstruction_text(r);
    ok = ok && r.report.pass();
    if (need_alignment) {
      const double tol = config.tol.value_or(10.0 * r.h * r.h);
      ok = ok && r.alignment && r.alignment->defect <= tol;
    }
  }
  j["levels"] = levels;
  if (runs.size() == 2 && runs[0].alignment && runs[1].alignment && runs[1].alignment->defect > 0.0) {
    const double ratio = runs[0].alignment->defect / runs[1].alignment->defect;
    j["defect_ratio"] = ratio;
    text += "defect ratio " + shortest(ratio) + "\n";
  }
  j["pass"] = ok;
  text += ok ? "PASS\n" : "FAIL\n";
  if (write_files) {
    const auto dir = output_dir(config);
    write_text_file((dir / "report.json").string(), j.dump(2));
  }
  emit(config, out, j, text);
  return ok ? kExitOk : kExitFailed;
}

}  // namespace

int validate_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const Level level = load_level(config, config.h_refine);
    out << "valid: n=" << level.data.spec.n << " m=" << level.data.spec.m << " N=" << level.data.spec.N
        << " nodes=" << level.data.grid.node_count() << "\n";
    return kExitOk;
  });
}

int verify_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const Level level = load_level(config, config.h_refine);
    const auto report = full_report(level.data, verify_options(config));
    std::string text = report_to_text(report);
    if (!report.pass()) {
      text += "failing:";
      for (const auto& name : report.failing()) text += " " + name;
      text += "\n";
    }
    emit(config, out, report_to_json(report), text);
    return report.pass() ? kExitOk : kExitFailed;
  });
}

int reconstruct_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    return run_reconstruction(config, out, err, false, true);
  });
}

int roundtrip_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    return run_reconstruction(config, out, err, true, config.out_dir.has_value());
  });
}

int examples_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    if (config.example) {
      const Level level = load_level(config, config.h_refine);
      if (config.out)
        save_data_file(level.data, *config.out);
      else
        out << serialize(level.data) << "\n";
      return kExitOk;
    }
    if (config.out_dir) {
      const auto dir = output_dir(config);
      for (const auto& name : example_names()) {
        save_data_file(canonical_example(name).data, (dir / (name + ".json")).string());
        out << (dir / (name + ".json")).string() << "\n";
      }
      return kExitOk;
    }
    for (const auto& name : example_names()) out << name << "\n";
    return kExitOk;
  });
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.command == "validate") return validate_command(config, out, err);
  if (config.command == "verify") return verify_command(config, out, err);
  if (config.command == "reconstruct") return reconstruct_command(config, out, err);
  if (config.command == "roundtrip") return roundtrip_command(config, out, err);
  if (config.command == "examples") return examples_command(config, out, err);
  err << "unknown command '" << config.command << "'\n";
  return kExitIo;
}

std::string immersion_to_csv(const ImmersionField& imm) {
  std::ostringstream os;
  const int n = imm.grid.n, d = imm.spec.N + 1;
  os << "node";
  for (int k = 0; k < n; ++k) os << ",i" << k;
  for (int g = 0; g < d; ++g) os << ",f" << g;
  os << ",t\n";
  for (std::size_t v = 0; v < imm.f.size(); ++v) {
    os << v;
    for (int idx : imm.grid.multi(v)) os << "," << idx;
    for (Eigen::Index c = 0; c < imm.f[v].size(); ++c) os << "," << shortest(imm.f[v](c));
    os << "\n";
  }
  return os.str();
}

ImmersionField immersion_from_csv(const std::string& text, const SignatureSpec& spec, const ChartGrid& grid) {
  ImmersionField out;
  out.spec = spec;
  out.grid = grid;
  const int n = grid.n, width = spec.N + 2;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw SchemaError("empty immersion CSV");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (static_cast<int>(cells.size()) != 1 + n + width)
      throw SchemaError("immersion CSV row has " + std::to_string(cells.size()) + " cells");
    if (static_cast<std::size_t>(parse_number(cells[0])) != out.f.size())
      throw SchemaError("immersion CSV rows out of node order");
    Eigen::VectorXd f(width);
    for (int c = 0; c < width; ++c) f(c) = parse_number(cells[1 + n + c]);
    out.f.push_back(f);
  }
  if (out.f.size() != grid.node_count()) throw SchemaError("immersion CSV does not cover the grid");
  return out;
}

nlohmann::json frames_to_json(const ImmersionField& imm) {
  const int s = imm.spec.N + 2;
  std::vector<double> flat;
  flat.reserve(imm.frames.size() * static_cast<std::size_t>(s * s));
  for (const auto& E : imm.frames)
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) flat.push_back(E(a, b));
  return {{"format_version", kFormatVersion},
          {"kind", "immersion_frames"},
          {"size", s},
          {"nodes", imm.frames.size()},
          {"data", flat}};
}

std::vector<Eigen::MatrixXd> frames_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) throw SchemaError("unsupported format_version");
    if (j.at("kind").get<std::string>() != "immersion_frames") throw SchemaError("not an immersion_frames document");
    const int s = j.at("size").get<int>();
    const auto nodes = j.at("nodes").get<std::size_t>();
    const auto flat = j.at("data").get<std::vector<double>>();
    if (s < 1 || flat.size() != nodes * static_cast<std::size_t>(s * s)) throw SchemaError("frame data has the wrong length");
    std::vector<Eigen::MatrixXd> out(nodes, Eigen::MatrixXd(s, s));
    for (std::size_t v = 0; v < nodes; ++v)
      for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) out[v](a, b) = flat[v * s * s + a * s + b];
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("frames document: ") + e.what());
  }
}

nlohmann::json frame_field_diagnostics(const FrameField& field) {
  return {{"steps", field.steps},
          {"max_group_defect", field.max_group_defect},
          {"max_row_defect", field.max_row_defect},
          {"worst_row_node", field.worst_row_node},
          {"max_theta", field.max_theta},
          {"max_det_drift", field.max_det_drift}};
}

}  // namespace warpframe
