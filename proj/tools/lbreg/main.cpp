#include <iostream>

#include <CLI11.hpp>

#include "lbreg/commands.hpp"
#include "lbreg/manifest.hpp"

namespace {

using namespace lbreg::cli;

/// Loads `config` into `params` when --config was given; an explicit --out
/// still wins so replays can target a fresh directory.
template <typename Params>
void apply_config(Params& params, const std::string& config, const std::string& command, const CLI::Option* out) {
  if (config.empty()) return;
  const std::string explicit_out = params.out;
  params = read_config(config, command).template get<Params>();
  if (out->count() > 0) params.out = explicit_out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral point-cloud registration with optimal transport"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lbreg 0.1.0");

  EmbedParams embed;
  RegisterParams reg;
  RswdParams rswd;
  MapParams map;
  TransferParams transfer;
  GenerateParams generate;
  std::string embed_config, reg_config, rswd_config, map_config, transfer_config;

  auto* e = app.add_subcommand("embed", "Laplace-Beltrami spectrum and eigenmap of a shape");
  e->add_option("--in", embed.in, "input shape (off, ply, obj, xyz)");
  e->add_option("--n", embed.n, "number of nontrivial eigenpairs")->capture_default_str();
  e->add_option("--measure", embed.measure, "uniform or voronoi")->capture_default_str();
  e->add_option("--laplacian", embed.laplacian, "auto, cotan or kernel")->capture_default_str();
  e->add_option("--bandwidth", embed.bandwidth, "kernel bandwidth (0 = heuristic)");
  e->add_option("--neighbors", embed.neighbors, "kernel neighbourhood size")->capture_default_str();
  e->add_option("--dim", embed.dim, "intrinsic dimension for kernel clouds")->capture_default_str();
  e->add_option("--seed", embed.seed, "eigensolver seed")->capture_default_str();
  auto* e_out = e->add_option("--out", embed.out, "output directory");
  e->add_option("--config", embed_config, "replay a saved config or manifest");

  auto* r = app.add_subcommand("register", "multi-scale registration of two shapes or embeddings");
  r->add_option("--src", reg.src, "source shape or embedding.bin");
  r->add_option("--dst", reg.dst, "target shape or embedding.bin");
  r->add_option("--schedule", reg.schedule, "embedding dimensions per level")->delimiter(',')->capture_default_str();
  r->add_option("--method", reg.method, "empirical, alternating or exact")->capture_default_str();
  r->add_option("--directions", reg.directions, "slice count (one value or one per level)")->delimiter(',');
  r->add_option("--iters", reg.iters, "iterations per level")->capture_default_str();
  r->add_option("--init", reg.init, "cold start: moments or identity")->capture_default_str();
  r->add_option("--seed", reg.seed, "direction seed")->capture_default_str();
  r->add_option("--measure", reg.measure, "uniform or voronoi")->capture_default_str();
  r->add_option("--laplacian", reg.laplacian, "auto, cotan or kernel")->capture_default_str();
  r->add_option("--neighbors", reg.neighbors, "kernel neighbourhood size")->capture_default_str();
  auto* r_out = r->add_option("--out", reg.out, "output directory");
  r->add_option("--config", reg_config, "replay a saved config or manifest");

  auto* s = app.add_subcommand("rswd", "robust sliced-Wasserstein distance between two embeddings");
  s->add_option("--src", rswd.src, "source shape or embedding.bin");
  s->add_option("--dst", rswd.dst, "target shape or embedding.bin");
  s->add_option("--n", rswd.n, "embedding dimension")->capture_default_str();
  s->add_option("--directions", rswd.directions, "slice count (0 = default for n)");
  s->add_option("--method", rswd.method, "alternating or empirical")->capture_default_str();
  s->add_option("--iters", rswd.iters, "outer iteration cap")->capture_default_str();
  s->add_option("--init", rswd.init, "cold start: moments or identity")->capture_default_str();
  s->add_option("--fixed-rotation", rswd.fixed_rotation, "'identity' for the plain sliced distance");
  s->add_option("--seed", rswd.seed, "direction seed")->capture_default_str();
  s->add_option("--measure", rswd.measure, "uniform or voronoi")->capture_default_str();
  s->add_option("--laplacian", rswd.laplacian, "auto, cotan or kernel")->capture_default_str();
  s->add_option("--neighbors", rswd.neighbors, "kernel neighbourhood size")->capture_default_str();
  auto* s_out = s->add_option("--out", rswd.out, "output directory");
  s->add_option("--config", rswd_config, "replay a saved config or manifest");

  auto* m = app.add_subcommand("map", "apply a transport plan to target coordinates");
  m->add_option("--plan", map.plan, "plan.bin from register");
  m->add_option("--coords", map.coords, "target coordinates (shape file or embedding.bin)");
  auto* m_out = m->add_option("--out", map.out, "output directory");
  m->add_option("--config", map_config, "replay a saved config or manifest");

  auto* t = app.add_subcommand("transfer", "connectivity transfer test for a correspondence");
  t->add_option("--src", transfer.src, "source mesh");
  t->add_option("--dst", transfer.dst, "target shape");
  t->add_option("--correspondence", transfer.correspondence, "source,target CSV");
  auto* t_out = t->add_option("--out", transfer.out, "output directory");
  t->add_option("--config", transfer_config, "replay a saved config or manifest");

  auto* g = app.add_subcommand("generate", "write a synthetic test shape");
  g->add_option("--shape", generate.shape, "sphere, torus or bumpy_sphere")->capture_default_str();
  g->add_option("--resolution", generate.resolution, "vertex count")->capture_default_str();
  g->add_option("--seed", generate.seed, "shape seed")->capture_default_str();
  g->add_option("--permute-seed", generate.permute_seed, "shuffle vertices with this seed");
  g->add_option("--truth", generate.truth, "write the ground-truth correspondence CSV here");
  g->add_option("--out", generate.out, "output shape file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (e->parsed()) {
      apply_config(embed, embed_config, "embed", e_out);
      run_embed(embed, std::cout);
    } else if (r->parsed()) {
      apply_config(reg, reg_config, "register", r_out);
      run_register(reg, std::cout);
    } else if (s->parsed()) {
      apply_config(rswd, rswd_config, "rswd", s_out);
      run_rswd(rswd, std::cout);
    } else if (m->parsed()) {
      apply_config(map, map_config, "map", m_out);
      run_map(map, std::cout);
    } else if (t->parsed()) {
      apply_config(transfer, transfer_config, "transfer", t_out);
      run_transfer(transfer, std::cout);
    } else if (g->parsed()) {
      run_generate(generate, std::cout);
    }
  } catch (const std::exception& ex) {
    std::cerr << "lbreg: " << ex.what() << "\n";
    return exit_code_for(ex);
  }
  return 0;
}
