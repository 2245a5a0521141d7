// Generalized symmetric eigensolver for the lumped pencil (S, M).
//
// With M diagonal the pencil reduces to the standard problem
//   A y = lambda y,  A = M^{-1/2} S M^{-1/2},  phi = M^{-1/2} y,
// whose null vector y0 = M^{1/2} 1 (normalized) is the trivial pair. Small
// problems use a dense solver with y0 shifted to the top of the spectrum;
// large ones use shift-invert block subspace iteration with y0 projected
// out and a Rayleigh-Ritz step per sweep.

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "lbreg/error.hpp"
#include "lbreg/laplace.hpp"

namespace lbreg {

namespace {

constexpr Eigen::Index kDenseLimit = 400;

struct Reduced {
  SparseMatrix a;           // M^{-1/2} S M^{-1/2}
  Eigen::VectorXd inv_sqrt_mass;
  Eigen::VectorXd trivial;  // unit null vector
};

Reduced reduce(const DiscreteLB& op) {
  Reduced r;
  r.inv_sqrt_mass = op.mass.cwiseSqrt().cwiseInverse();
  r.a = r.inv_sqrt_mass.asDiagonal() * op.stiffness * r.inv_sqrt_mass.asDiagonal();
  r.a.makeCompressed();
  r.trivial = op.mass.cwiseSqrt();
  r.trivial.normalize();
  return r;
}

void project_out(Eigen::MatrixXd& x, const Eigen::VectorXd& v) {
  x.noalias() -= v * (v.transpose() * x);
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& x) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  return qr.householderQ() * Eigen::MatrixXd::Identity(x.rows(), x.cols());
}

struct Pairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // in the reduced (y) variables
};

Pairs dense_solve(const Reduced& r, int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd(r.a);
  a = 0.5 * (a + a.transpose());
  const double shift = 2.0 * a.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  a.noalias() += shift * r.trivial * r.trivial.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("dense eigensolver failed");
  return {es.eigenvalues().head(n), es.eigenvectors().leftCols(n)};
}

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& y, double lambda) {
  const Eigen::VectorXd ay = a * y;
  const double denom = std::max(ay.norm(), std::numeric_limits<double>::min());
  return (ay - lambda * y).norm() / denom;
}

Pairs shift_invert_solve(const Reduced& r, int n, const EigenOptions& opt) {
  const Eigen::Index l = r.a.rows();
  const Eigen::Index block = std::min<Eigen::Index>(l - 1, std::max<Eigen::Index>(2 * n, n + 10));
  const double shift = 1e-3 * r.a.diagonal().mean();

  SparseMatrix k = r.a;
  for (Eigen::Index i = 0; i < l; ++i) k.coeffRef(i, i) += shift;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(k);
  if (ldlt.info() != Eigen::Success) throw ConvergenceFailure("factorization of shifted operator failed");

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd x(l, block);
  for (Eigen::Index c = 0; c < block; ++c) {
    for (Eigen::Index i = 0; i < l; ++i) x(i, c) = gauss(rng);
  }
  project_out(x, r.trivial);
  x = orthonormalize(x);

  Pairs out;
  for (int it = 0; it < opt.max_iterations; ++it) {
    Eigen::MatrixXd z = ldlt.solve(x);
    project_out(z, r.trivial);
    z = orthonormalize(z);
    project_out(z, r.trivial);

    const Eigen::MatrixXd az = r.a * z;
    Eigen::MatrixXd t = z.transpose() * az;
    t = 0.5 * (t + t.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    if (es.info() != Eigen::Success) throw ConvergenceFailure("Rayleigh-Ritz step failed");
    x = z * es.eigenvectors();

    bool converged = true;
    for (int c = 0; c < n && converged; ++c) {
      converged = relative_residual(r.a, x.col(c), es.eigenvalues()[c]) <= opt.tolerance;
    }
    if (converged) {
      out.values = es.eigenvalues().head(n);
      out.vectors = x.leftCols(n);
      return out;
    }
  }
  throw ConvergenceFailure("shift-invert subspace iteration did not reach residual " +
                           std::to_string(opt.tolerance) + " in " + std::to_string(opt.max_iterations) +
                           " sweeps");
}

}  // namespace

LBSpectrum solve_spectrum(const DiscreteLB& op, int n, const EigenOptions& options) {
  const Eigen::Index l = op.size();
  if (n < 1 || n > l - 2) {
    throw DegenerateInput("requested " + std::to_string(n) + " eigenpairs; need 1 <= n <= " +
                          std::to_string(l - 2));
  }
  if (op.stiffness.rows() != l || op.stiffness.cols() != l) throw DimensionMismatch("stiffness/mass size mismatch");
  if ((op.mass.array() <= 0.0).any()) throw DegenerateInput("mass matrix is not positive definite");

  const Reduced r = reduce(op);
  bool dense = options.backend == EigenBackend::Dense;
  if (options.backend == EigenBackend::Auto) {
    dense = l <= kDenseLimit || std::max(2 * n, n + 10) * 3 >= l;
  }
  Pairs pairs = dense ? dense_solve(r, n) : shift_invert_solve(r, n, options);

  const double scale = std::max(1.0, std::abs(pairs.values[n - 1]));
  if (!(pairs.values[0] > 1e-10 * scale)) {
    throw DegenerateInput("operator has more than one zero eigenvalue (disconnected shape?)");
  }

  LBSpectrum spec;
  spec.eigenvalues = pairs.values;
  spec.eigenfunctions = r.inv_sqrt_mass.asDiagonal() * pairs.vectors;
  spec.method = op.method;
  spec.intrinsic_dim = op.intrinsic_dim;
  for (Eigen::Index c = 0; c < spec.eigenfunctions.cols(); ++c) {
    Eigen::Index idx = 0;
    spec.eigenfunctions.col(c).cwiseAbs().maxCoeff(&idx);
    if (spec.eigenfunctions(idx, c) < 0.0) spec.eigenfunctions.col(c) *= -1.0;
  }
  return spec;
}

double max_relative_residual(const DiscreteLB& op, const LBSpectrum& spectrum) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < spectrum.size(); ++k) {
    const Eigen::VectorXd phi = spectrum.eigenfunctions.col(k);
    const Eigen::VectorXd sphi = op.stiffness * phi;
    const Eigen::VectorXd res = sphi - spectrum.eigenvalues[k] * op.mass.cwiseProduct(phi);
    worst = std::max(worst, res.norm() / std::max(sphi.norm(), std::numeric_limits<double>::min()));
  }
  return worst;
}

double orthonormality_error(const DiscreteLB& op, const LBSpectrum& spectrum) {
  const Eigen::MatrixXd& phi = spectrum.eigenfunctions;
  const Eigen::MatrixXd gram = phi.transpose() * op.mass.asDiagonal() * phi;
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace lbreg
