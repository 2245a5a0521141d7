#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lbreg/geometry.hpp"

namespace lbreg::cli {

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Writes manifest.json: the run config, one hash per listed output and a
/// free-form summary. Key order is fixed so manifests are reproducible.
void write_manifest(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& config,
                    const std::vector<std::string>& outputs, const nlohmann::ordered_json& summary);

/// Reads a run config from either a manifest or a bare config file.
nlohmann::json read_config(const std::filesystem::path& path, const std::string& command);

void write_text(const std::filesystem::path& path, const std::string& text);

/// "source,target" CSV of an assignment.
void write_correspondence_csv(const std::filesystem::path& path, const std::vector<int>& assignment);
std::vector<int> read_correspondence_csv(const std::filesystem::path& path);

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace lbreg::cli
