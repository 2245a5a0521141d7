#include "lbreg/eigenmap.hpp"

#include <cmath>

#include "lbreg/error.hpp"

namespace lbreg {

Embedding Embedding::truncated(Eigen::Index m) const {
  if (m < 1 || m > dim()) throw DimensionMismatch("cannot truncate embedding to " + std::to_string(m) + " columns");
  Embedding out;
  out.coords = coords.leftCols(m);
  out.measure = measure;
  out.intrinsic_dim = intrinsic_dim;
  out.source_name = source_name;
  return out;
}

Embedding embed(const LBSpectrum& spectrum, const PointCloud& shape, int n) {
  if (n < 1 || n > spectrum.size()) {
    throw DimensionMismatch("embedding dimension " + std::to_string(n) + " exceeds spectrum size " +
                            std::to_string(spectrum.size()));
  }
  if (spectrum.points() != shape.size()) {
    throw DimensionMismatch("spectrum has " + std::to_string(spectrum.points()) + " rows but shape has " +
                            std::to_string(shape.size()) + " points");
  }
  const double exponent = spectrum.intrinsic_dim / 4.0;
  Embedding e;
  e.coords.resize(spectrum.points(), n);
  for (int k = 0; k < n; ++k) {
    const double lambda = spectrum.eigenvalues[k];
    if (!(lambda > 0.0)) throw DegenerateInput("eigenvalue " + std::to_string(k + 1) + " is not positive");
    e.coords.col(k) = spectrum.eigenfunctions.col(k) / std::pow(lambda, exponent);
  }
  e.measure = shape.measure();
  e.intrinsic_dim = spectrum.intrinsic_dim;
  e.source_name = shape.name();
  return e;
}

std::vector<Embedding> multiscale_embed(const LBSpectrum& spectrum, const PointCloud& shape,
                                        const std::vector<int>& schedule) {
  if (schedule.empty()) throw DegenerateInput("empty schedule");
  if (schedule.front() < 1) throw DegenerateInput("schedule must start at 1 or more");
  for (std::size_t j = 1; j < schedule.size(); ++j) {
    if (schedule[j] <= schedule[j - 1]) throw DegenerateInput("schedule must be strictly increasing");
  }
  const Embedding full = embed(spectrum, shape, schedule.back());
  std::vector<Embedding> levels;
  levels.reserve(schedule.size());
  for (int n : schedule) levels.push_back(full.truncated(n));
  return levels;
}

}  // namespace lbreg
