#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "lbreg/commands.hpp"
#include "lbreg/container.hpp"
#include "lbreg/error.hpp"
#include "lbreg/manifest.hpp"

namespace fs = std::filesystem;
using namespace lbreg;
using namespace lbreg::cli;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "lbreg_unit_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

// Shapes shared by the tests below; 300 vertices keeps each run short.
void ensure_shapes() {
  static bool done = false;
  if (done) return;
  std::ostringstream sink;
  run_generate({"bumpy_sphere", 300, 7, 0, path("a.off"), ""}, sink);
  run_generate({"bumpy_sphere", 300, 7, 5, path("b.off"), path("truth.csv")}, sink);
  done = true;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(LBREG_TOOL_PATH) + " " + args + " > " + path("tool.log") + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json manifest(const std::string& dir) { return nlohmann::json::parse(read_all(fs::path(dir) / "manifest.json")); }

}  // namespace

TEST_CASE("embed writes its file contract") {
  ensure_shapes();
  std::ostringstream sink;
  EmbedParams p;
  p.in = path("a.off");
  p.n = 6;
  p.measure = "voronoi";
  p.out = path("emb");
  run_embed(p, sink);
  for (const char* f : {"spectrum.bin", "embedding.bin", "eigenfuncs.ply", "manifest.json"}) {
    CHECK(fs::exists(fs::path(p.out) / f));
  }
  const Embedding e = embedding_from(Container::read(fs::path(p.out) / "embedding.bin"));
  CHECK(e.dim() == 6);
  CHECK(e.size() == 300);
  const auto m = manifest(p.out);
  CHECK(m["command"] == "embed");
  CHECK(m["outputs"]["embedding.bin"] == sha256_file(fs::path(p.out) / "embedding.bin"));
  CHECK(read_all(fs::path(p.out) / "eigenfuncs.ply").find("property double phi4") != std::string::npos);

  SUBCASE("re-run is byte identical") {
    EmbedParams again = p;
    again.out = path("emb_again");
    run_embed(again, sink);
    for (const char* f : {"spectrum.bin", "embedding.bin", "eigenfuncs.ply"}) {
      CHECK(sha256_file(fs::path(p.out) / f) == sha256_file(fs::path(again.out) / f));
    }
  }
}

TEST_CASE("register recovers a permuted copy") {
  ensure_shapes();
  std::ostringstream sink;
  RegisterParams p;
  p.src = path("a.off");
  p.dst = path("b.off");
  p.out = path("reg");
  run_register(p, sink);
  for (const char* f : {"rotation.csv", "plan.bin", "correspondence.csv", "energy.csv", "transferred.ply"}) {
    CHECK(fs::exists(fs::path(p.out) / f));
  }
  const auto got = read_correspondence_csv(fs::path(p.out) / "correspondence.csv");
  const auto truth = read_correspondence_csv(path("truth.csv"));
  REQUIRE(got.size() == truth.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < got.size(); ++i) hits += got[i] == truth[i];
  CHECK(hits >= 0.9 * static_cast<double>(got.size()));
  CHECK(manifest(p.out)["summary"]["quality"].get<double>() >= 0.95);

  SUBCASE("map applies the saved plan") {
    MapParams mp{(fs::path(p.out) / "plan.bin").string(), p.dst, path("map")};
    run_map(mp, sink);
    CHECK(read_correspondence_csv(fs::path(mp.out) / "correspondence.csv") == got);
  }
  SUBCASE("transfer scores the saved correspondence") {
    std::ostringstream out;
    TransferParams tp{p.src, p.dst, (fs::path(p.out) / "correspondence.csv").string(), path("transfer")};
    run_transfer(tp, out);
    CHECK(std::stod(out.str()) >= 0.95);
    CHECK(fs::exists(fs::path(tp.out) / "transferred.ply"));
  }
}

TEST_CASE("rswd on a sign-flipped embedding") {
  ensure_shapes();
  std::ostringstream sink;
  EmbedParams ep;
  ep.in = path("a.off");
  ep.n = 5;
  ep.out = path("emb5");
  run_embed(ep, sink);
  Embedding e = embedding_from(Container::read(fs::path(ep.out) / "embedding.bin"));
  e.coords.col(1) *= -1.0;
  e.coords.col(3) *= -1.0;
  to_container(e).write(path("flipped.bin"));

  auto value = [&](const std::string& fixed, const std::string& dst, const std::string& out) {
    std::ostringstream o;
    RswdParams rp;
    rp.src = (fs::path(ep.out) / "embedding.bin").string();
    rp.dst = dst;
    rp.n = 5;
    rp.fixed_rotation = fixed;
    rp.out = path(out);
    run_rswd(rp, o);
    return std::stod(o.str());
  };
  CHECK(value("identity", (fs::path(ep.out) / "embedding.bin").string(), "rswd_self") == 0.0);
  const double fixed = value("identity", path("flipped.bin"), "rswd_fixed");
  const double optimized = value("", path("flipped.bin"), "rswd_opt");
  CHECK(fixed > 0.0);
  CHECK(optimized <= 1e-4 * fixed);
  CHECK(value("", path("flipped.bin"), "rswd_opt2") == optimized);
}

TEST_CASE("replay from a manifest reproduces hashes") {
  ensure_shapes();
  std::ostringstream sink;
  RegisterParams p;
  p.src = path("a.off");
  p.dst = path("b.off");
  p.schedule = {3, 5};
  p.out = path("replay_a");
  run_register(p, sink);

  RegisterParams again = read_config(fs::path(p.out) / "manifest.json", "register").get<RegisterParams>();
  CHECK(again.out == p.out);
  again.out = path("replay_b");
  run_register(again, sink);
  const auto a = manifest(p.out)["outputs"];
  const auto b = manifest(again.out)["outputs"];
  CHECK(a == b);
  CHECK_THROWS(read_config(fs::path(p.out) / "manifest.json", "embed"));
}

TEST_CASE("default output root") {
  ::setenv("LBREG_OUT", "/tmp/somewhere", 1);
  CHECK(default_output("embed") == fs::path("/tmp/somewhere/embed"));
  ::unsetenv("LBREG_OUT");
  CHECK(default_output("rswd") == fs::path("runs/rswd"));
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ParseError("x")) == 2);
  CHECK(exit_code_for(IoError("x")) == 2);
  CHECK(exit_code_for(SizeLimitExceeded("x")) == 3);
  CHECK(exit_code_for(DegenerateInput("x")) == 3);
  CHECK(exit_code_for(ConvergenceFailure("x")) == 4);
  CHECK(exit_code_for(std::logic_error("x")) == 1);
}

TEST_CASE("tool process exit codes") {
  ensure_shapes();
  CHECK(run_tool("--help") == 0);
  CHECK(run_tool("embed --in " + path("missing.off") + " --out " + path("e_missing")) == 2);
  CHECK(read_all(path("tool.log")).find("missing.off") != std::string::npos);
  CHECK(run_tool("embed --in " + path("a.off") + " --bogus-flag") == 2);
  CHECK(run_tool("register --src " + path("a.off") + " --dst " + path("b.off") + " --schedule 5,3 --out " +
                 path("bad_schedule")) == 3);
  // 1100 x 1100 points exceed the exact solver's million-cell guard
  CHECK(run_tool("generate --shape sphere --resolution 1100 --out " + path("big.off")) == 0);
  CHECK(run_tool("register --src " + path("big.off") + " --dst " + path("big.off") +
                 " --schedule 3 --method exact --out " + path("big_exact")) == 3);
  CHECK(read_all(path("tool.log")).find("exceeds") != std::string::npos);
}
