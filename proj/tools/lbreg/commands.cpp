#include "lbreg/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "lbreg/container.hpp"
#include "lbreg/eigenmap.hpp"
#include "lbreg/error.hpp"
#include "lbreg/geometry.hpp"
#include "lbreg/laplace.hpp"
#include "lbreg/manifest.hpp"
#include "lbreg/register.hpp"
#include "lbreg/transport.hpp"

namespace lbreg::cli {

namespace fs = std::filesystem;

namespace {

struct Input {
  std::optional<PointCloud> shape;
  std::optional<LBSpectrum> spectrum;
  Embedding embedding;
};

struct SpectralParams {
  std::string measure;
  std::string laplacian;
  double bandwidth = 0.0;
  int neighbors = 10;
  int dim = 2;
  std::uint64_t seed = 1;
};

bool is_container(const fs::path& path) { return path.extension() == ".bin"; }

PointCloud apply_measure(PointCloud shape, const std::string& measure) {
  if (measure == "uniform") return shape.with_measure({});
  if (measure == "voronoi") return voronoi_measure(shape);
  throw DegenerateInput("unknown measure '" + measure + "' (expected uniform or voronoi)");
}

DiscreteLB assemble(const PointCloud& shape, const SpectralParams& sp) {
  if (sp.laplacian == "auto") {
    if (shape.has_triangles()) return assemble_cotan(shape);
    const double h = sp.bandwidth > 0.0 ? sp.bandwidth : default_bandwidth(shape, sp.neighbors);
    return assemble_kernel(shape, h, sp.neighbors, sp.dim);
  }
  const auto method = parse_laplace_method(sp.laplacian);
  if (!method) throw DegenerateInput("unknown Laplacian '" + sp.laplacian + "' (expected auto, cotan or kernel)");
  if (*method == LaplaceMethod::CotanFem) return assemble_cotan(shape);
  const double h = sp.bandwidth > 0.0 ? sp.bandwidth : default_bandwidth(shape, sp.neighbors);
  return assemble_kernel(shape, h, sp.neighbors, sp.dim);
}

Input load_input(const fs::path& path, int n, const SpectralParams& sp) {
  Input in;
  if (is_container(path)) {
    const Embedding full = embedding_from(Container::read(path));
    if (n > full.dim()) {
      throw DimensionMismatch(path.string() + " holds " + std::to_string(full.dim()) + " coordinates, " +
                              std::to_string(n) + " requested");
    }
    in.embedding = full.truncated(n);
    return in;
  }
  PointCloud shape = apply_measure(load_shape(path), sp.measure);
  EigenOptions opt;
  opt.seed = sp.seed;
  in.spectrum = solve_spectrum(assemble(shape, sp), n, opt);
  in.embedding = embed(*in.spectrum, shape, n);
  in.shape = std::move(shape);
  return in;
}

fs::path output_dir(const std::string& out, const std::string& command) {
  return out.empty() ? default_output(command) : fs::path(out);
}

Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 3> diverging_colors(const Eigen::VectorXd& f) {
  const double scale = std::max(f.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 3> c(f.size(), 3);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double t = 0.5 * (f[i] / scale + 1.0);  // 0 = blue, 1 = red
    c(i, 0) = static_cast<std::uint8_t>(std::lround(255.0 * t));
    c(i, 1) = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - std::abs(2.0 * t - 1.0))));
    c(i, 2) = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t)));
  }
  return c;
}

std::vector<int> level_directions(const RegisterParams& p) {
  std::vector<int> out;
  for (std::size_t j = 0; j < p.schedule.size(); ++j) {
    const int n = p.schedule[j];
    if (p.directions.empty()) {
      out.push_back(p.schedule.size() > 1 ? default_directions(n) : default_directions_single(n));
    } else if (p.directions.size() == 1) {
      out.push_back(p.directions[0]);
    } else if (p.directions.size() == p.schedule.size()) {
      out.push_back(p.directions[j]);
    } else {
      throw DegenerateInput("--directions takes one value or one per schedule level");
    }
  }
  return out;
}

RegisterMethod method_or_throw(const std::string& name) {
  const auto m = parse_register_method(name);
  if (!m) throw DegenerateInput("unknown method '" + name + "' (expected empirical, alternating or exact)");
  return *m;
}

InitStrategy init_or_throw(const std::string& name) {
  const auto s = parse_init_strategy(name);
  if (!s) throw DegenerateInput("unknown init '" + name + "' (expected moments or identity)");
  return *s;
}

nlohmann::json as_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

fs::path default_output(const std::string& command) {
  const char* root = std::getenv("LBREG_OUT");
  return fs::path(root && *root ? root : "runs") / command;
}

void run_embed(const EmbedParams& p, std::ostream& out) {
  const fs::path dir = output_dir(p.out, "embed");
  const SpectralParams sp{p.measure, p.laplacian, p.bandwidth, p.neighbors, p.dim, p.seed};
  if (is_container(p.in)) throw DegenerateInput("embed needs a shape file, not a container");
  const Input in = load_input(p.in, p.n, sp);

  to_container(*in.spectrum).write(dir / "spectrum.bin");
  to_container(in.embedding).write(dir / "embedding.bin");
  std::vector<PlyScalarField> fields;
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(4, in.spectrum->size()); ++k) {
    fields.push_back({"phi" + std::to_string(k + 1), in.spectrum->eigenfunctions.col(k)});
  }
  write_ply(dir / "eigenfuncs.ply", *in.shape, fields, diverging_colors(in.spectrum->eigenfunctions.col(0)));

  nlohmann::json config = p;
  config["out"] = dir.string();
  nlohmann::ordered_json summary;
  summary["points"] = in.shape->size();
  summary["laplacian"] = std::string(to_string(in.spectrum->method));
  summary["eigenvalues"] = std::vector<double>(in.spectrum->eigenvalues.data(),
                                               in.spectrum->eigenvalues.data() + in.spectrum->size());
  write_manifest(dir, "embed", config, {"spectrum.bin", "embedding.bin", "eigenfuncs.ply"}, summary);
  out << "embedded " << in.shape->size() << " points into R^" << p.n << " -> " << dir.string() << "\n";
}

void run_register(const RegisterParams& p, std::ostream& out) {
  const fs::path dir = output_dir(p.out, "register");
  if (p.schedule.empty()) throw DegenerateInput("empty schedule");
  if (p.iters < 0) throw DegenerateInput("--iters must be nonnegative");
  const RegisterMethod method = method_or_throw(p.method);
  const InitStrategy init = init_or_throw(p.init);
  const std::vector<int> dirs = level_directions(p);
  const SpectralParams sp{p.measure, p.laplacian, 0.0, p.neighbors, 2, p.seed};
  const int n = *std::max_element(p.schedule.begin(), p.schedule.end());
  const Input src = load_input(p.src, n, sp);
  const Input dst = load_input(p.dst, n, sp);

  std::vector<Embedding> p_levels;
  std::vector<Embedding> q_levels;
  MultiscaleOptions opt;
  opt.seed = p.seed;
  opt.init = init;
  for (std::size_t j = 0; j < p.schedule.size(); ++j) {
    if (j > 0 && p.schedule[j] <= p.schedule[j - 1]) throw DegenerateInput("schedule must be strictly increasing");
    p_levels.push_back(src.embedding.truncated(p.schedule[j]));
    q_levels.push_back(dst.embedding.truncated(p.schedule[j]));
    opt.levels.push_back({dirs[j], p.iters, method});
  }
  const bool score = src.shape && dst.shape && src.shape->has_triangles();
  if (score) {
    opt.source = &*src.shape;
    opt.target = &*dst.shape;
  }
  const RegistrationResult res = multiscale_register(p_levels, q_levels, opt);

  std::vector<std::string> outputs{"rotation.csv", "plan.bin", "correspondence.csv", "energy.csv"};
  write_matrix_csv(dir / "rotation.csv", res.rotation.matrix());
  to_container(res.plan).write(dir / "plan.bin");
  write_correspondence_csv(dir / "correspondence.csv", res.correspondence.assignment());
  {
    std::ostringstream os;
    os << "level,dim,step,energy\n";
    std::size_t k = 0;
    for (std::size_t j = 0; j < res.scale_reports.size(); ++j) {
      for (int s = 0; s <= res.scale_reports[j].iterations; ++s, ++k) {
        os << j << ',' << res.scale_reports[j].dim << ',' << s << ',' << format_double(res.energy_trace[k]) << '\n';
      }
    }
    write_text(dir / "energy.csv", os.str());
  }

  nlohmann::ordered_json summary;
  summary["final_energy"] = res.energy_trace.back();
  nlohmann::ordered_json levels = nlohmann::ordered_json::array();
  for (const auto& r : res.scale_reports) {
    nlohmann::ordered_json l;
    l["dim"] = r.dim;
    l["directions"] = r.directions;
    l["method"] = r.method;
    l["iterations"] = r.iterations;
    l["initial_energy"] = r.initial_energy;
    l["final_energy"] = r.final_energy;
    if (r.quality) l["quality"] = *r.quality;
    levels.push_back(l);
  }
  summary["levels"] = levels;
  if (score) {
    const TransferResult t = transfer_connectivity(*src.shape, *dst.shape, res.correspondence);
    write_ply(dir / "transferred.ply", t.mesh);
    outputs.push_back("transferred.ply");
    summary["quality"] = t.quality;
    summary["transferred_triangles"] = t.transferred;
    summary["nondegenerate_triangles"] = t.nondegenerate;
    if (t.edge_length_ratio) summary["edge_length_ratio"] = *t.edge_length_ratio;
  }
  nlohmann::json config = p;
  config["out"] = dir.string();
  write_manifest(dir, "register", config, outputs, summary);

  out << "final energy " << format_double(res.energy_trace.back());
  if (score) out << ", connectivity quality " << format_double(summary["quality"].get<double>());
  out << " -> " << dir.string() << "\n";
}

void run_rswd(const RswdParams& p, std::ostream& out) {
  const fs::path dir = output_dir(p.out, "rswd");
  const SpectralParams sp{p.measure, p.laplacian, 0.0, p.neighbors, 2, p.seed};
  const Input src = load_input(p.src, p.n, sp);
  const Input dst = load_input(p.dst, p.n, sp);
  const DirectionSet dirs(p.directions > 0 ? p.directions : default_directions_single(p.n), p.n, p.seed);

  OrthogonalMatrix r = OrthogonalMatrix::identity(p.n);
  if (p.fixed_rotation.empty()) {
    const OrthogonalMatrix start = cold_start(src.embedding, dst.embedding, dirs, init_or_throw(p.init));
    switch (method_or_throw(p.method)) {
      case RegisterMethod::Alternating: {
        CurvilinearConfig cfg;
        cfg.max_outer = std::max(p.iters, 1);
        r = rswd_register_alternating(src.embedding, dst.embedding, dirs, cfg, start).rotation;
        break;
      }
      case RegisterMethod::Empirical:
        r = empirical_register(src.embedding, dst.embedding, dirs, start, p.iters).rotation;
        break;
      case RegisterMethod::Exact:
        throw DegenerateInput("rswd supports the alternating and empirical methods");
    }
  } else if (p.fixed_rotation != "identity") {
    throw DegenerateInput("--fixed-rotation accepts only 'identity'");
  }
  const double value = rswd_eval(src.embedding, dst.embedding, r, dirs).value;
  const double distance = std::sqrt(std::max(0.0, value));

  write_matrix_csv(dir / "rotation.csv", r.matrix());
  nlohmann::ordered_json summary;
  summary["rswd"] = distance;
  summary["energy"] = value;
  summary["rotation"] = as_json(r.matrix());
  nlohmann::json config = p;
  config["out"] = dir.string();
  write_manifest(dir, "rswd", config, {"rotation.csv"}, summary);
  out << format_double(distance) << "\n";
}

void run_map(const MapParams& p, std::ostream& out) {
  const fs::path dir = output_dir(p.out, "map");
  const TransportPlan plan = plan_from(Container::read(p.plan));
  const Eigen::MatrixXd coords =
      is_container(p.coords) ? embedding_from(Container::read(p.coords)).coords : load_shape(p.coords).points();
  const Eigen::MatrixXd image = interpolated_image(plan, coords);
  write_correspondence_csv(dir / "correspondence.csv", plan_to_map(plan).assignment());
  write_matrix_csv(dir / "mapped.csv", image);
  nlohmann::json config = p;
  config["out"] = dir.string();
  nlohmann::ordered_json summary;
  summary["rows"] = image.rows();
  summary["cols"] = image.cols();
  write_manifest(dir, "map", config, {"correspondence.csv", "mapped.csv"}, summary);
  out << "mapped " << image.rows() << " points -> " << dir.string() << "\n";
}

void run_transfer(const TransferParams& p, std::ostream& out) {
  const fs::path dir = output_dir(p.out, "transfer");
  const PointCloud src = load_shape(p.src);
  const PointCloud dst = load_shape(p.dst);
  if (!src.has_triangles()) throw MissingConnectivity(p.src + " has no triangles to transfer");
  const auto assignment = read_correspondence_csv(p.correspondence);
  if (static_cast<Eigen::Index>(assignment.size()) != src.size()) {
    throw DimensionMismatch("correspondence has " + std::to_string(assignment.size()) + " rows, source has " +
                            std::to_string(src.size()) + " points");
  }
  const auto corr = Correspondence::from_assignment(assignment, static_cast<std::size_t>(dst.size()));
  const TransferResult t = transfer_connectivity(src, dst, corr);
  write_ply(dir / "transferred.ply", t.mesh);
  nlohmann::json config = p;
  config["out"] = dir.string();
  nlohmann::ordered_json summary;
  summary["quality"] = t.quality;
  summary["transferred_triangles"] = t.transferred;
  summary["nondegenerate_triangles"] = t.nondegenerate;
  if (t.edge_length_ratio) summary["edge_length_ratio"] = *t.edge_length_ratio;
  write_manifest(dir, "transfer", config, {"transferred.ply"}, summary);
  out << format_double(t.quality) << "\n";
}

void run_generate(const GenerateParams& p, std::ostream& out) {
  const auto kind = parse_shape_kind(p.shape);
  if (!kind) throw DegenerateInput("unknown shape '" + p.shape + "' (expected sphere, torus or bumpy_sphere)");
  if (p.out.empty()) throw DegenerateInput("generate needs --out");
  PointCloud shape = generate_shape(*kind, p.resolution, p.seed);
  if (p.permute_seed != 0) {
    std::vector<int> perm(static_cast<std::size_t>(shape.size()));
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(p.permute_seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    shape = permute_points(shape, perm);
    if (!p.truth.empty()) {
      // Original vertex k now sits at index i with perm[i] = k.
      std::vector<int> truth(perm.size());
      for (std::size_t i = 0; i < perm.size(); ++i) truth[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
      write_correspondence_csv(p.truth, truth);
    }
  }
  const fs::path path(p.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  switch (format_from_path(path)) {
    case ShapeFormat::Off: write_off(path, shape); break;
    case ShapeFormat::Ply: write_ply(path, shape); break;
    case ShapeFormat::Xyz: write_xyz(path, shape); break;
    case ShapeFormat::Obj: throw DegenerateInput("generate writes OFF, PLY or XYZ");
  }
  out << "wrote " << shape.size() << " vertices to " << path.string() << "\n";
}

int exit_code_for(const std::exception& e) noexcept {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->kind()) {
      case ErrorKind::Parse:
      case ErrorKind::Io: return 2;
      case ErrorKind::DegenerateInput:
      case ErrorKind::MissingConnectivity:
      case ErrorKind::DimensionMismatch:
      case ErrorKind::SizeLimitExceeded: return 3;
      case ErrorKind::ConvergenceFailure: return 4;
    }
  }
  if (dynamic_cast<const fs::filesystem_error*>(&e) || dynamic_cast<const nlohmann::json::exception*>(&e)) return 2;
  return 1;
}

}  // namespace lbreg::cli
