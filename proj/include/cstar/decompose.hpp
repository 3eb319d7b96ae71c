#pragma once

// Commutator decompositions driven by a witness b_1..b_n.
//
// Phi(a) = sum b_i a b_i^* is a positive map with ||Phi|| = ||sum b_i b_i^*|| = eta2.
// When eta2 < 1, Psi = (Id - Phi)^{-1} = sum_k Phi^k, and whenever sum b_i^* b_i = 1
//     a = Psi(a) - Phi(Psi(a)) = sum_i [b_i^*, b_i Psi(a)],
// and for positive a, with r = Psi(a)^{1/2},
//     a = sum_i [r b_i^*, b_i r]   (each term of the form [x, x^*]).

#include <Eigen/LU>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cstar/spectral.hpp"
#include "cstar/star_polynomial.hpp"
#include "cstar/witness.hpp"

namespace cstar {

namespace detail {

// b x b^*, evaluated as (b (b x)^*)^* so both products have the sparse factor on the left.
inline Operator sandwich(const Operator& b, const Operator& x) { return adjoint(b * adjoint(b * x)); }

inline StarPolynomial sandwich(const StarPolynomial& b, const StarPolynomial& x) { return b * x * adjoint(b); }

inline Operator zero_like(const Operator& x) { return Operator(x.dim()); }
inline StarPolynomial zero_like(const StarPolynomial& x) { return StarPolynomial(x.generators()); }

inline void check_compatible(const Operator& a, const Operator& b) { a.check_same_dim(b); }
inline void check_compatible(const StarPolynomial& a, const StarPolynomial& b) { a.check_same_algebra(b); }

}  // namespace detail

/// Phi(a) = sum_i b_i a b_i^*, summed in index order.
template <class Element>
Element apply_phi(const Element& a, std::span<const Element> witness) {
  Element out = detail::zero_like(a);
  for (const auto& b : witness) {
    detail::check_compatible(a, b);
    out += detail::sandwich(b, a);
  }
  return out;
}

template <class Element>
Element apply_phi(const Element& a, const WitnessFamily<Element>& witness) {
  return apply_phi(a, std::span<const Element>(witness.elements));
}

enum class SolverMethod { Neumann, Direct };

inline std::string_view to_string(SolverMethod method) {
  return method == SolverMethod::Neumann ? "neumann" : "direct";
}

struct SolverInfo {
  SolverMethod method = SolverMethod::Neumann;
  std::size_t iterations = 0;
  double tail_bound = 0.0;  // eta2^{K+1} ||a|| / (1 - eta2) for Neumann, 0 for direct
};

struct PsiSolution {
  Operator psi;
  SolverInfo info;
};

namespace detail {

inline void require_contractive(double eta2) {
  if (!(eta2 < 1.0)) {
    throw Error(ErrorCode::NotContractive, "witness has eta2 = " + std::to_string(eta2) + " >= 1");
  }
}

}  // namespace detail

/// Smallest K >= 0 with eta2^{K+1} norm_a / (1 - eta2) <= eps.
inline std::size_t neumann_iterations_needed(double eta2, double norm_a, double eps) {
  std::size_t k = 0;
  while (std::pow(eta2, double(k + 1)) * norm_a / (1.0 - eta2) > eps) ++k;
  return k;
}

/// Partial sum sum_{k=0}^{K} Phi^k(a), K minimal for the certified tail bound.
inline PsiSolution solve_psi_neumann(const Operator& a, const MatrixWitness& witness, double eps,
                                     std::size_t max_iter = 100000) {
  const double eta2 = witness.report.eta2;
  detail::require_contractive(eta2);
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  const double norm_a = op_norm(a);

  const std::size_t needed = neumann_iterations_needed(eta2, norm_a, eps);
  if (needed > max_iter) {
    throw Error(ErrorCode::MaxIterExceeded, "Neumann series needs " + std::to_string(needed) +
                                                " iterations, limit " + std::to_string(max_iter));
  }

  PsiSolution out;
  out.psi = a;
  Operator term = a;
  for (std::size_t k = 0; k < needed; ++k) {
    term = apply_phi(term, witness);
    out.psi += term;
  }
  out.info = {SolverMethod::Neumann, needed, std::pow(eta2, double(needed + 1)) * norm_a / (1.0 - eta2)};
  return out;
}

inline constexpr std::size_t kDefaultMaxDirectDim = 64;

/// Solves (Id - Phi) X = a as one dim^2 x dim^2 system on column-major vec(X),
/// where vec(b X b^*) = (conj(b) kron b) vec(X).
inline PsiSolution solve_psi_direct(const Operator& a, const MatrixWitness& witness,
                                    std::size_t max_dim = kDefaultMaxDirectDim) {
  detail::require_contractive(witness.report.eta2);
  const std::size_t d = a.dim();
  if (d > max_dim) {
    throw Error(ErrorCode::SizeLimitExceeded,
                "direct solve limited to dim <= " + std::to_string(max_dim) + ", got " + std::to_string(d));
  }
  const auto n = static_cast<Eigen::Index>(d * d);
  Eigen::MatrixXcd system = Eigen::MatrixXcd::Identity(n, n);
  for (const auto& b : witness.elements) {
    a.check_same_dim(b);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        const Complex bik = b(i, k);
        if (bik == Complex{}) continue;
        for (std::size_t j = 0; j < d; ++j) {
          for (std::size_t l = 0; l < d; ++l) {
            const Complex bjl = b(j, l);
            if (bjl == Complex{}) continue;
            system(Eigen::Index(i + j * d), Eigen::Index(k + l * d)) -= bik * std::conj(bjl);
          }
        }
      }
    }
  }
  Eigen::VectorXcd rhs(n);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) rhs(Eigen::Index(i + j * d)) = a(i, j);
  const Eigen::VectorXcd solution = system.partialPivLu().solve(rhs);

  PsiSolution out;
  out.psi = Operator(d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) out.psi(i, j) = solution(Eigen::Index(i + j * d));
  out.psi.set_labels(a.labels());
  out.info = {SolverMethod::Direct, 0, 0.0};
  return out;
}

/// Contribution commutator(x, y). In self-adjoint form y = x^* and the
/// contribution x x^* - x^* x is Hermitian.
template <class Element>
struct CommutatorPair {
  Element x;
  Element y;
  bool self_adjoint_form = false;
};

template <class Element>
struct VerifyReport {
  Element residual;
  double residual_norm = 0.0;
  std::optional<double> residual_interior_norm;
  /// |trace(sum of contributions)|; matrix backend only (commutators are trace-free).
  std::optional<double> trace_defect;
};

/// Recomputes a - sum_i [x_i, y_i] from scratch. For the symbolic backend the
/// residual is an exact normal form and residual_norm is its l1 coefficient norm.
inline VerifyReport<Operator> verify_decomposition(const Operator& a,
                                                   std::span<const CommutatorPair<Operator>> pairs,
                                                   const std::optional<Operator>& interior_mask = std::nullopt) {
  Operator total(a.dim());
  for (const auto& pair : pairs) {
    a.check_same_dim(pair.x);
    a.check_same_dim(pair.y);
    total += commutator(pair.x, pair.y);
  }
  VerifyReport<Operator> out;
  out.residual = a - total;
  out.residual_norm = op_norm(out.residual);
  if (interior_mask) out.residual_interior_norm = op_norm(compress(out.residual, *interior_mask));
  out.trace_defect = std::abs(trace(total));
  return out;
}

inline VerifyReport<StarPolynomial> verify_decomposition(const StarPolynomial& a,
                                                         std::span<const CommutatorPair<StarPolynomial>> pairs) {
  StarPolynomial total(a.generators());
  for (const auto& pair : pairs) total += commutator(pair.x, pair.y);
  VerifyReport<StarPolynomial> out{a - total, 0.0, std::nullopt, std::nullopt};
  out.residual_norm = coefficient_l1(out.residual);
  return out;
}

struct DecomposeOptions {
  double eps = 1e-10;
  SolverMethod solver = SolverMethod::Neumann;
  std::size_t max_iter = 100000;
  std::size_t max_direct_dim = kDefaultMaxDirectDim;
};

struct DecompositionResult {
  std::vector<CommutatorPair<Operator>> pairs;
  Operator psi_a;
  Operator residual;
  double residual_norm = 0.0;
  std::optional<double> residual_interior_norm;
  double trace_defect = 0.0;
  SolverInfo solver;
};

inline PsiSolution solve_psi(const Operator& a, const MatrixWitness& witness, const DecomposeOptions& options) {
  return options.solver == SolverMethod::Neumann
             ? solve_psi_neumann(a, witness, options.eps, options.max_iter)
             : solve_psi_direct(a, witness, options.max_direct_dim);
}

namespace detail {

inline DecompositionResult finish(const Operator& a, const MatrixWitness& witness, PsiSolution solution,
                                  std::vector<CommutatorPair<Operator>> pairs) {
  const auto check = verify_decomposition(a, std::span<const CommutatorPair<Operator>>(pairs), witness.interior_mask);
  DecompositionResult out;
  out.pairs = std::move(pairs);
  out.psi_a = std::move(solution.psi);
  out.residual = check.residual;
  out.residual_norm = check.residual_norm;
  out.residual_interior_norm = check.residual_interior_norm;
  out.trace_defect = *check.trace_defect;
  out.solver = solution.info;
  return out;
}

}  // namespace detail

/// a = sum_i [b_i^*, b_i Psi(a)]; exactly n pairs, in witness order.
/// With a truncated witness the residual is (1 - sum b_i^* b_i) Psi(a) plus the
/// series tail, so only its interior compression is small.
inline DecompositionResult decompose_element(const Operator& a, const MatrixWitness& witness,
                                             const DecomposeOptions& options = {}) {
  auto solution = solve_psi(a, witness, options);
  std::vector<CommutatorPair<Operator>> pairs;
  for (const auto& b : witness.elements) pairs.push_back({adjoint(b), b * solution.psi, false});
  return detail::finish(a, witness, std::move(solution), std::move(pairs));
}

/// For a >= 0: a = sum_i [r b_i^*, b_i r] with r = Psi(a)^{1/2}, each pair (x, x^*).
inline DecompositionResult decompose_positive(const Operator& a, const MatrixWitness& witness,
                                              const DecomposeOptions& options = {}) {
  const auto positivity = positivity_check(a, 1e-9);
  if (!positivity.is_psd) {
    throw Error(ErrorCode::NotPositive, "input is not positive (min eigenvalue " +
                                            std::to_string(positivity.min_eig) + ")");
  }
  auto solution = solve_psi(hermitian_part(a), witness, options);
  solution.psi = hermitian_part(solution.psi);
  const Operator root = psd_sqrt(solution.psi, 1e-9);
  std::vector<CommutatorPair<Operator>> pairs;
  for (const auto& b : witness.elements) {
    Operator x = root * adjoint(b);
    Operator y = adjoint(x);
    pairs.push_back({std::move(x), std::move(y), true});
  }
  return detail::finish(a, witness, std::move(solution), std::move(pairs));
}

}  // namespace cstar
