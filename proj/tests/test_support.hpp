#pragma once

#include <Eigen/Dense>
#include <random>

#include "cstar/operator.hpp"

namespace cstar::testing {

inline Operator random_operator(std::size_t dim, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Operator out(dim);
  for (auto& e : out.entries()) e = Complex(normal(rng), normal(rng));
  return out;
}

inline Operator random_hermitian(std::size_t dim, std::mt19937_64& rng) {
  return hermitian_part(random_operator(dim, rng));
}

/// g* g for a random g
inline Operator random_psd(std::size_t dim, std::mt19937_64& rng) {
  const Operator g = random_operator(dim, rng);
  return hermitian_part(adjoint(g) * g);
}

inline Eigen::MatrixXcd to_eigen(const Operator& x) {
  Eigen::MatrixXcd out(x.dim(), x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i)
    for (std::size_t j = 0; j < x.dim(); ++j) out(i, j) = x(i, j);
  return out;
}

/// Independent oracle: largest singular value from a full SVD.
inline double svd_norm(const Operator& x) {
  if (x.dim() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(x));
  return svd.singularValues()(0);
}

/// Independent oracle: eigenvalues of the Hermitian part, ascending.
inline Eigen::VectorXd eigen_oracle(const Operator& x) {
  const Eigen::MatrixXcd m = to_eigen(x);
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

}  // namespace cstar::testing
