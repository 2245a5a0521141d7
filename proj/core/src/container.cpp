#include "lbreg/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "lbreg/error.hpp"

namespace lbreg {

namespace {

constexpr char kMagic[8] = {'E', 'G', 'R', 'B', 'I', 'N', '0', '1'};

static_assert(std::endian::native == std::endian::little, "container payloads assume a little-endian host");

template <typename T>
void append(std::vector<std::uint8_t>& out, const T& value) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename Matrix>
void append_rows(std::vector<std::uint8_t>& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) append(out, m(i, j));
  }
}

template <typename Matrix>
Matrix read_rows(std::span<const std::uint8_t> payload, std::uint64_t offset, Eigen::Index rows, Eigen::Index cols) {
  using Scalar = typename Matrix::Scalar;
  const std::uint64_t need = static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols) * sizeof(Scalar);
  if (offset > payload.size() || need > payload.size() - offset) throw ParseError("container payload is truncated");
  Matrix m(rows, cols);
  const std::uint8_t* p = payload.data() + offset;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      Scalar v;
      std::memcpy(&v, p, sizeof(Scalar));
      p += sizeof(Scalar);
      m(i, j) = v;
    }
  }
  return m;
}

Eigen::MatrixXd as_column(const Eigen::VectorXd& v) { return v; }

}  // namespace

void Container::put(const std::string& name, Eigen::MatrixXd m) {
  i64_.erase(name);
  f64_[name] = std::move(m);
}

void Container::put(const std::string& name, Int64Matrix m) {
  f64_.erase(name);
  i64_[name] = std::move(m);
}

void Container::set_attribute(const std::string& key, std::string value) { attrs_[key] = std::move(value); }

bool Container::has(const std::string& name) const { return f64_.count(name) || i64_.count(name); }

const Eigen::MatrixXd& Container::f64(const std::string& name) const {
  auto it = f64_.find(name);
  if (it == f64_.end()) throw ParseError("container has no f64 array '" + name + "'");
  return it->second;
}

const Int64Matrix& Container::i64(const std::string& name) const {
  auto it = i64_.find(name);
  if (it == i64_.end()) throw ParseError("container has no i64 array '" + name + "'");
  return it->second;
}

std::optional<std::string> Container::attribute(const std::string& key) const {
  auto it = attrs_.find(key);
  if (it == attrs_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::uint8_t> Container::bytes() const {
  nlohmann::ordered_json header;
  header["attributes"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : attrs_) header["attributes"][k] = v;
  header["arrays"] = nlohmann::ordered_json::array();
  std::vector<std::uint8_t> payload;
  for (const auto& [name, m] : f64_) {
    header["arrays"].push_back({{"name", name}, {"dtype", "f64"}, {"rows", m.rows()}, {"cols", m.cols()},
                                {"offset", payload.size()}});
    append_rows(payload, m);
  }
  for (const auto& [name, m] : i64_) {
    header["arrays"].push_back({{"name", name}, {"dtype", "i64"}, {"rows", m.rows()}, {"cols", m.cols()},
                                {"offset", payload.size()}});
    append_rows(payload, m);
  }
  const std::string text = header.dump();
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  append(out, static_cast<std::uint64_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Container Container::from_bytes(std::span<const std::uint8_t> data) {
  if (data.size() < 16 || std::memcmp(data.data(), kMagic, 8) != 0) throw ParseError("not an EGRBIN01 container");
  std::uint64_t len = 0;
  std::memcpy(&len, data.data() + 8, sizeof(len));
  if (len > data.size() - 16) throw ParseError("container header is truncated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(data.begin() + 16, data.begin() + 16 + static_cast<std::ptrdiff_t>(len));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("container header: ") + e.what());
  }
  const auto payload = data.subspan(16 + len);
  Container c;
  try {
    for (const auto& [k, v] : header.at("attributes").items()) c.attrs_[k] = v.get<std::string>();
    for (const auto& a : header.at("arrays")) {
      const auto name = a.at("name").get<std::string>();
      const auto dtype = a.at("dtype").get<std::string>();
      const auto rows = a.at("rows").get<Eigen::Index>();
      const auto cols = a.at("cols").get<Eigen::Index>();
      const auto offset = a.at("offset").get<std::uint64_t>();
      if (rows < 0 || cols < 0) throw ParseError("negative array shape in container");
      if (dtype == "f64") {
        c.f64_[name] = read_rows<Eigen::MatrixXd>(payload, offset, rows, cols);
      } else if (dtype == "i64") {
        c.i64_[name] = read_rows<Int64Matrix>(payload, offset, rows, cols);
      } else {
        throw ParseError("unknown dtype '" + dtype + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("container header: ") + e.what());
  }
  return c;
}

void Container::write(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto data = bytes();
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

Container Container::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_bytes(data);
}

Container to_container(const LBSpectrum& spectrum) {
  Container c;
  c.set_attribute("kind", "spectrum");
  c.set_attribute("method", std::string(to_string(spectrum.method)));
  c.set_attribute("intrinsic_dim", std::to_string(spectrum.intrinsic_dim));
  c.put("eigenvalues", as_column(spectrum.eigenvalues));
  c.put("eigenfunctions", spectrum.eigenfunctions);
  return c;
}

Container to_container(const Embedding& embedding) {
  Container c;
  c.set_attribute("kind", "embedding");
  c.set_attribute("intrinsic_dim", std::to_string(embedding.intrinsic_dim));
  c.set_attribute("source", embedding.source_name);
  c.put("coords", embedding.coords);
  c.put("measure", as_column(embedding.measure));
  return c;
}

Container to_container(const TransportPlan& plan) {
  Container c;
  c.set_attribute("kind", "plan");
  const auto nnz = static_cast<Eigen::Index>(plan.nonzeros());
  Int64Matrix idx(nnz, 2);
  Eigen::MatrixXd mass(nnz, 1);
  for (Eigen::Index k = 0; k < nnz; ++k) {
    const auto& e = plan.entries()[static_cast<std::size_t>(k)];
    idx(k, 0) = e.row;
    idx(k, 1) = e.col;
    mass(k, 0) = e.mass;
  }
  c.put("indices", std::move(idx));
  c.put("mass", std::move(mass));
  c.put("row_marginal", as_column(plan.row_marginal()));
  c.put("col_marginal", as_column(plan.col_marginal()));
  return c;
}

namespace {

void expect_kind(const Container& c, const char* kind) {
  if (c.attribute("kind") != std::optional<std::string>(kind)) {
    throw ParseError(std::string("container does not hold a ") + kind);
  }
}

int parse_dim(const Container& c) {
  const auto v = c.attribute("intrinsic_dim");
  if (!v) throw ParseError("container lacks intrinsic_dim");
  try {
    return std::stoi(*v);
  } catch (const std::exception&) {
    throw ParseError("bad intrinsic_dim '" + *v + "'");
  }
}

Eigen::VectorXd column(const Container& c, const std::string& name) {
  const auto& m = c.f64(name);
  if (m.cols() != 1) throw ParseError("array '" + name + "' is not a column");
  return m.col(0);
}

}  // namespace

LBSpectrum spectrum_from(const Container& c) {
  expect_kind(c, "spectrum");
  LBSpectrum s;
  s.eigenvalues = column(c, "eigenvalues");
  s.eigenfunctions = c.f64("eigenfunctions");
  if (s.eigenfunctions.cols() != s.eigenvalues.size()) throw ParseError("spectrum arrays disagree in size");
  const auto method = parse_laplace_method(c.attribute("method").value_or(""));
  if (!method) throw ParseError("unknown Laplacian method in container");
  s.method = *method;
  s.intrinsic_dim = parse_dim(c);
  return s;
}

Embedding embedding_from(const Container& c) {
  expect_kind(c, "embedding");
  Embedding e;
  e.coords = c.f64("coords");
  e.measure = column(c, "measure");
  if (e.measure.size() != e.coords.rows()) throw ParseError("embedding arrays disagree in size");
  e.intrinsic_dim = parse_dim(c);
  e.source_name = c.attribute("source").value_or("");
  return e;
}

TransportPlan plan_from(const Container& c) {
  expect_kind(c, "plan");
  const auto& idx = c.i64("indices");
  const auto& mass = c.f64("mass");
  if (idx.cols() != 2 || mass.cols() != 1 || mass.rows() != idx.rows()) throw ParseError("plan arrays disagree");
  std::vector<PlanEntry> entries;
  entries.reserve(static_cast<std::size_t>(idx.rows()));
  for (Eigen::Index k = 0; k < idx.rows(); ++k) {
    entries.push_back({static_cast<int>(idx(k, 0)), static_cast<int>(idx(k, 1)), mass(k, 0)});
  }
  return TransportPlan(std::move(entries), column(c, "row_marginal"), column(c, "col_marginal"));
}

}  // namespace lbreg
