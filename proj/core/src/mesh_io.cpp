#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lbreg/error.hpp"
#include "lbreg/geometry.hpp"

namespace lbreg {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

class LineReader {
public:
  LineReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw IoError("cannot open '" + path.string() + "'");
  }

  /// Next line that is neither blank nor a comment starting with '#'.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++lineno_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(path_.string() + ":" + std::to_string(lineno_) + ": " + what);
  }

  std::size_t lineno() const { return lineno_; }

private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t lineno_ = 0;
};

double parse_double(std::string_view tok, const LineReader& rd) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) rd.fail("bad number '" + std::string(tok) + "'");
  if (!std::isfinite(value)) rd.fail("non-finite coordinate '" + std::string(tok) + "'");
  return value;
}

long long parse_int(std::string_view tok, const LineReader& rd) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) rd.fail("bad integer '" + std::string(tok) + "'");
  return value;
}

void fan_triangulate(const std::vector<long long>& poly, std::vector<Triangle>& out, const LineReader& rd) {
  if (poly.size() < 3) rd.fail("face with fewer than 3 vertices");
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    for (long long v : {poly[0], poly[k], poly[k + 1]}) {
      if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        rd.fail("vertex index out of range");
      }
    }
    out.push_back({static_cast<int>(poly[0]), static_cast<int>(poly[k]), static_cast<int>(poly[k + 1])});
  }
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
  const auto dim = static_cast<Eigen::Index>(rows.empty() ? 0 : rows.front().size());
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index c = 0; c < dim; ++c) pts(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c)];
  }
  return pts;
}

PointCloud load_off(const std::filesystem::path& path) {
  LineReader rd(path);
  std::string line;
  if (!rd.next(line)) rd.fail("empty file");
  auto tokens = split_ws(line);
  const std::string magic = tokens.empty() ? "" : std::string(tokens.front());
  if (magic.size() < 3 || magic.substr(magic.size() - 3) != "OFF") rd.fail("missing OFF header");
  tokens.erase(tokens.begin());
  if (tokens.empty()) {
    if (!rd.next(line)) rd.fail("missing element counts");
    tokens = split_ws(line);
  }
  if (tokens.size() < 2) rd.fail("missing element counts");
  const long long nv = parse_int(tokens[0], rd);
  const long long nf = parse_int(tokens[1], rd);
  if (nv <= 0 || nf < 0) rd.fail("invalid element counts");

  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) {
    if (!rd.next(line)) rd.fail("unexpected end of vertex list");
    const auto tok = split_ws(line);
    if (tok.size() < 3) rd.fail("vertex needs 3 coordinates");
    rows.push_back({parse_double(tok[0], rd), parse_double(tok[1], rd), parse_double(tok[2], rd)});
  }
  std::vector<Triangle> tris;
  for (long long f = 0; f < nf; ++f) {
    if (!rd.next(line)) rd.fail("unexpected end of face list");
    const auto tok = split_ws(line);
    if (tok.empty()) rd.fail("empty face record");
    const long long k = parse_int(tok[0], rd);
    if (k < 0 || static_cast<std::size_t>(k) + 1 > tok.size()) rd.fail("face record too short");
    std::vector<long long> poly;
    for (long long c = 1; c <= k; ++c) poly.push_back(parse_int(tok[static_cast<std::size_t>(c)], rd));
    fan_triangulate(poly, tris, rd);
  }
  return PointCloud(to_matrix(rows), std::move(tris), {}, path.stem().string());
}

PointCloud load_obj(const std::filesystem::path& path) {
  LineReader rd(path);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<long long>> faces;
  while (rd.next(line)) {
    const auto tok = split_ws(line);
    if (tok.front() == "v") {
      if (tok.size() < 4) rd.fail("vertex needs 3 coordinates");
      rows.push_back({parse_double(tok[1], rd), parse_double(tok[2], rd), parse_double(tok[3], rd)});
    } else if (tok.front() == "f") {
      std::vector<long long> poly;
      for (std::size_t c = 1; c < tok.size(); ++c) {
        const auto ref = tok[c].substr(0, tok[c].find('/'));
        long long idx = parse_int(ref, rd);
        if (idx == 0) rd.fail("OBJ indices are 1-based");
        // Negative indices count back from the most recent vertex.
        idx = idx > 0 ? idx - 1 : static_cast<long long>(rows.size()) + idx;
        poly.push_back(idx);
      }
      faces.push_back(std::move(poly));
    }
  }
  if (rows.empty()) rd.fail("no vertices");
  std::vector<Triangle> tris;
  for (const auto& poly : faces) fan_triangulate(poly, tris, rd);
  return PointCloud(to_matrix(rows), std::move(tris), {}, path.stem().string());
}

PointCloud load_xyz(const std::filesystem::path& path) {
  LineReader rd(path);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (rd.next(line)) {
    const auto tok = split_ws(line);
    std::vector<double> row;
    row.reserve(tok.size());
    for (auto t : tok) row.push_back(parse_double(t, rd));
    if (!rows.empty() && row.size() != rows.front().size()) rd.fail("inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) rd.fail("no points");
  return PointCloud(to_matrix(rows), {}, {}, path.stem().string());
}

struct PlyElement {
  std::string name;
  long long count = 0;
  struct Property {
    std::string name;
    bool is_list = false;
  };
  std::vector<Property> props;
};

PointCloud load_ply(const std::filesystem::path& path) {
  LineReader rd(path);
  std::string line;
  if (!rd.next(line) || split_ws(line).empty() || split_ws(line).front() != "ply") rd.fail("missing ply magic");
  std::vector<PlyElement> elements;
  bool ascii = false;
  for (;;) {
    if (!rd.next(line)) rd.fail("unterminated header");
    const auto tok = split_ws(line);
    if (tok.front() == "end_header") break;
    if (tok.front() == "format") {
      if (tok.size() < 2) rd.fail("bad format line");
      if (tok[1] != "ascii") rd.fail("only ASCII PLY is supported");
      ascii = true;
    } else if (tok.front() == "element") {
      if (tok.size() < 3) rd.fail("bad element line");
      elements.push_back({std::string(tok[1]), parse_int(tok[2], rd), {}});
    } else if (tok.front() == "property") {
      if (elements.empty()) rd.fail("property before element");
      if (tok.size() >= 5 && tok[1] == "list") {
        elements.back().props.push_back({std::string(tok[4]), true});
      } else if (tok.size() >= 3) {
        elements.back().props.push_back({std::string(tok[2]), false});
      } else {
        rd.fail("bad property line");
      }
    }
    // comment / obj_info lines fall through
  }
  if (!ascii) rd.fail("missing format line");

  std::vector<std::vector<double>> rows;
  std::vector<Triangle> tris;
  for (const auto& el : elements) {
    if (el.count < 0) rd.fail("negative element count");
    for (long long r = 0; r < el.count; ++r) {
      if (!rd.next(line)) rd.fail("unexpected end of " + el.name + " data");
      const auto tok = split_ws(line);
      if (el.name == "vertex") {
        std::vector<double> xyz(3, 0.0);
        std::array<bool, 3> seen{false, false, false};
        std::size_t pos = 0;
        for (const auto& prop : el.props) {
          if (pos >= tok.size()) rd.fail("vertex record too short");
          if (prop.is_list) {
            const long long k = parse_int(tok[pos], rd);
            pos += static_cast<std::size_t>(k) + 1;
            continue;
          }
          const int axis = prop.name == "x" ? 0 : prop.name == "y" ? 1 : prop.name == "z" ? 2 : -1;
          if (axis >= 0) {
            xyz[static_cast<std::size_t>(axis)] = parse_double(tok[pos], rd);
            seen[static_cast<std::size_t>(axis)] = true;
          }
          ++pos;
        }
        if (!(seen[0] && seen[1] && seen[2])) rd.fail("vertex lacks x/y/z");
        rows.push_back(std::move(xyz));
      } else if (el.name == "face") {
        std::size_t pos = 0;
        bool done = false;
        for (const auto& prop : el.props) {
          if (pos >= tok.size()) rd.fail("face record too short");
          if (prop.is_list) {
            const long long k = parse_int(tok[pos], rd);
            if (k < 0 || pos + static_cast<std::size_t>(k) + 1 > tok.size()) rd.fail("face record too short");
            if (!done) {
              std::vector<long long> poly;
              for (long long c = 1; c <= k; ++c) poly.push_back(parse_int(tok[pos + static_cast<std::size_t>(c)], rd));
              fan_triangulate(poly, tris, rd);
              done = true;
            }
            pos += static_cast<std::size_t>(k) + 1;
          } else {
            ++pos;
          }
        }
      }
    }
  }
  if (rows.empty()) rd.fail("no vertices");
  return PointCloud(to_matrix(rows), std::move(tris), {}, path.stem().string());
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << std::setprecision(17);
  return out;
}

}  // namespace

std::optional<ShapeFormat> parse_shape_format(std::string_view name) {
  const std::string s = lower(name);
  if (s == "off") return ShapeFormat::Off;
  if (s == "ply") return ShapeFormat::Ply;
  if (s == "obj") return ShapeFormat::Obj;
  if (s == "xyz" || s == "txt" || s == "pts") return ShapeFormat::Xyz;
  return std::nullopt;
}

ShapeFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (!ext.empty() && ext.front() == '.') ext.erase(ext.begin());
  if (auto fmt = parse_shape_format(ext)) return *fmt;
  throw ParseError("cannot infer shape format from '" + path.string() + "'");
}

PointCloud load_shape(const std::filesystem::path& path, ShapeFormat format) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: '" + path.string() + "'");
  switch (format) {
    case ShapeFormat::Off: return load_off(path);
    case ShapeFormat::Ply: return load_ply(path);
    case ShapeFormat::Obj: return load_obj(path);
    case ShapeFormat::Xyz: return load_xyz(path);
  }
  throw ParseError("unknown format");
}

PointCloud load_shape(const std::filesystem::path& path) { return load_shape(path, format_from_path(path)); }

void write_ply(const std::filesystem::path& path, const PointCloud& cloud,
               const std::vector<PlyScalarField>& scalars,
               const std::optional<Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 3>>& colors) {
  const Eigen::Index n = cloud.size();
  for (const auto& f : scalars) {
    if (f.values.size() != n) throw DimensionMismatch("PLY scalar field '" + f.name + "' has wrong length");
  }
  if (colors && colors->rows() != n) throw DimensionMismatch("PLY color array has wrong length");
  auto out = open_out(path);
  out << "ply\nformat ascii 1.0\n";
  if (!cloud.name().empty()) out << "comment name " << cloud.name() << "\n";
  out << "element vertex " << n << "\n";
  const char* axes[] = {"x", "y", "z"};
  for (Eigen::Index c = 0; c < 3; ++c) out << "property double " << axes[c] << "\n";
  for (const auto& f : scalars) out << "property double " << f.name << "\n";
  if (colors) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "element face " << cloud.triangles().size() << "\n";
  out << "property list uchar int vertex_indices\nend_header\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < 3; ++c) {
      out << (c ? " " : "") << (c < cloud.ambient_dim() ? cloud.points()(i, c) : 0.0);
    }
    for (const auto& f : scalars) out << " " << f.values[i];
    if (colors) {
      for (Eigen::Index c = 0; c < 3; ++c) out << " " << static_cast<int>((*colors)(i, c));
    }
    out << "\n";
  }
  for (const auto& t : cloud.triangles()) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_off(const std::filesystem::path& path, const PointCloud& cloud) {
  auto out = open_out(path);
  out << "OFF\n" << cloud.size() << " " << cloud.triangles().size() << " 0\n";
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    for (Eigen::Index c = 0; c < 3; ++c) {
      out << (c ? " " : "") << (c < cloud.ambient_dim() ? cloud.points()(i, c) : 0.0);
    }
    out << "\n";
  }
  for (const auto& t : cloud.triangles()) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_xyz(const std::filesystem::path& path, const PointCloud& cloud) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    for (Eigen::Index c = 0; c < cloud.ambient_dim(); ++c) out << (c ? " " : "") << cloud.points()(i, c);
    out << "\n";
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace lbreg
