#pragma once

// On-disk JSON format for GeometricData and frame matrices (format_version 1).

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "warpframe/bundle_data.hpp"

namespace warpframe {

inline constexpr int kFormatVersion = 1;

/// Malformed document: missing keys, wrong types, wrong array lengths.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Well-formed document whose contents violate a GeometricData invariant.
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json spec_to_json(const SignatureSpec& spec);
SignatureSpec spec_from_json(const nlohmann::json& j);
nlohmann::json warping_to_json(const WarpingFunction& w);
WarpingFunction warping_from_json(const nlohmann::json& j);
nlohmann::json grid_to_json(const ChartGrid& g);
ChartGrid grid_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GeometricData& data);
/// Parses without checking invariants beyond the schema.
GeometricData parse_data(const nlohmann::json& j);

/// Throws InvariantError naming the worst node and magnitude.
void check_invariants(const GeometricData& data);

/// parse_data + check_invariants.
GeometricData load_data(const nlohmann::json& j);
GeometricData load_data_file(const std::string& path);
void save_data_file(const GeometricData& data, const std::string& path);

std::string serialize(const GeometricData& data);

nlohmann::json frame_matrix_to_json(const Eigen::MatrixXd& B);
Eigen::MatrixXd frame_matrix_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace warpframe
