#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace lbreg::cli {

struct EmbedParams {
  std::string in;
  int n = 10;
  std::string measure = "uniform";  ///< uniform | voronoi
  std::string laplacian = "auto";   ///< auto | cotan | kernel
  double bandwidth = 0.0;           ///< kernel only; 0 picks the heuristic
  int neighbors = 10;
  int dim = 2;                      ///< intrinsic dimension for kernel clouds
  std::uint64_t seed = 1;
  std::string out;
};

struct RegisterParams {
  std::string src;
  std::string dst;
  std::vector<int> schedule{3, 5, 10, 20};
  std::string method = "empirical";  ///< empirical | alternating | exact
  std::vector<int> directions;       ///< empty: defaults; one value: every level
  int iters = 2;
  std::string init = "moments";      ///< moments | identity
  std::uint64_t seed = 1;
  std::string measure = "uniform";
  std::string laplacian = "auto";
  int neighbors = 10;
  std::string out;
};

struct RswdParams {
  std::string src;
  std::string dst;
  int n = 10;
  int directions = 0;  ///< 0: default for n
  std::string method = "alternating";
  int iters = 50;
  std::string init = "moments";
  std::string fixed_rotation;  ///< "identity" skips the optimization
  std::uint64_t seed = 1;
  std::string measure = "uniform";
  std::string laplacian = "auto";
  int neighbors = 10;
  std::string out;
};

struct MapParams {
  std::string plan;
  std::string coords;
  std::string out;
};

struct TransferParams {
  std::string src;
  std::string dst;
  std::string correspondence;
  std::string out;
};

struct GenerateParams {
  std::string shape = "bumpy_sphere";
  int resolution = 500;
  std::uint64_t seed = 7;
  std::uint64_t permute_seed = 0;  ///< nonzero: shuffle vertices and write the ground truth
  std::string out;
  std::string truth;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EmbedParams, in, n, measure, laplacian, bandwidth, neighbors, dim, seed,
                                                out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RegisterParams, src, dst, schedule, method, directions, iters, init, seed,
                                                measure, laplacian, neighbors, out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RswdParams, src, dst, n, directions, method, iters, init, fixed_rotation,
                                                seed, measure, laplacian, neighbors, out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MapParams, plan, coords, out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TransferParams, src, dst, correspondence, out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GenerateParams, shape, resolution, seed, permute_seed, out, truth)

/// $LBREG_OUT/<command>, or runs/<command> when the variable is unset.
std::filesystem::path default_output(const std::string& command);

void run_embed(const EmbedParams& p, std::ostream& out);
void run_register(const RegisterParams& p, std::ostream& out);
void run_rswd(const RswdParams& p, std::ostream& out);
void run_map(const MapParams& p, std::ostream& out);
void run_transfer(const TransferParams& p, std::ostream& out);
void run_generate(const GenerateParams& p, std::ostream& out);

/// Process exit code for an exception escaping a command.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace lbreg::cli
