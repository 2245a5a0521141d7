#include "lbreg/manifest.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "lbreg/error.hpp"

namespace lbreg::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("SHA-256 initialization failed");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md.data(), &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_manifest(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& config,
                    const std::vector<std::string>& outputs, const nlohmann::ordered_json& summary) {
  nlohmann::ordered_json m;
  m["tool"] = "lbreg";
  m["command"] = command;
  m["config"] = config;
  m["outputs"] = nlohmann::ordered_json::object();
  for (const auto& name : outputs) m["outputs"][name] = sha256_file(dir / name);
  m["summary"] = summary;
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

nlohmann::json read_config(const std::filesystem::path& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config " + path.string() + ": " + e.what());
  }
  if (j.contains("config")) {
    if (j.value("command", command) != command) {
      throw DegenerateInput("config " + path.string() + " was written by '" + j.value("command", "") +
                            "', not '" + command + "'");
    }
    j = j["config"];
  }
  if (!j.is_object()) throw ParseError("config " + path.string() + " is not a JSON object");
  return j;
}

std::string format_double(double v) {
  std::array<char, 64> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_correspondence_csv(const std::filesystem::path& path, const std::vector<int>& assignment) {
  std::ostringstream os;
  os << "source,target\n";
  for (std::size_t i = 0; i < assignment.size(); ++i) os << i << ',' << assignment[i] << '\n';
  write_text(path, os.str());
}

std::vector<int> read_correspondence_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::vector<int> out;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (lineno == 1 && line.rfind("source", 0) == 0)) continue;
    const auto comma = line.find(',');
    long src = -1;
    long dst = -1;
    const char* b = line.data();
    const char* e = b + line.size();
    if (comma == std::string::npos || std::from_chars(b, b + comma, src).ec != std::errc{} ||
        std::from_chars(b + comma + 1, e, dst).ec != std::errc{}) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected 'source,target'");
    }
    if (src != static_cast<long>(out.size())) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": rows must list sources 0, 1, 2, ...");
    }
    out.push_back(static_cast<int>(dst));
  }
  return out;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_double(m(i, j));
    os << '\n';
  }
  write_text(path, os.str());
}

}  // namespace lbreg::cli
