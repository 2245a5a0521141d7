#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lbreg/eigenmap.hpp"
#include "lbreg/laplace.hpp"
#include "lbreg/transport.hpp"

namespace lbreg {

using Int64Matrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Named dense arrays plus string attributes, stored as
///   "EGRBIN01" | u64 header length | JSON header | little-endian payload.
/// The header lists {name, dtype, rows, cols, offset} per array; payloads
/// are row-major. Output is byte-for-byte deterministic.
class Container {
public:
  void put(const std::string& name, Eigen::MatrixXd m);
  void put(const std::string& name, Int64Matrix m);
  void set_attribute(const std::string& key, std::string value);

  bool has(const std::string& name) const;
  const Eigen::MatrixXd& f64(const std::string& name) const;
  const Int64Matrix& i64(const std::string& name) const;
  std::optional<std::string> attribute(const std::string& key) const;

  std::vector<std::uint8_t> bytes() const;
  static Container from_bytes(std::span<const std::uint8_t> data);

  void write(const std::filesystem::path& path) const;
  static Container read(const std::filesystem::path& path);

private:
  std::map<std::string, Eigen::MatrixXd> f64_;
  std::map<std::string, Int64Matrix> i64_;
  std::map<std::string, std::string> attrs_;
};

Container to_container(const LBSpectrum& spectrum);
Container to_container(const Embedding& embedding);
Container to_container(const TransportPlan& plan);

LBSpectrum spectrum_from(const Container& c);
Embedding embedding_from(const Container& c);
TransportPlan plan_from(const Container& c);

}  // namespace lbreg
