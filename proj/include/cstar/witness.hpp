#pragma once

// Witness families: b_1..b_n with sum b_i^* b_i = 1 and ||sum b_i b_i^*|| < 1.
//
// Two backends share the same shapes: dense Operators (typically a Fock
// truncation, where boundary words break sum b_i^* b_i = 1 and an interior
// mask isolates the exact part) and symbolic StarPolynomials.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cstar/diagonal.hpp"
#include "cstar/fock.hpp"
#include "cstar/spectral.hpp"
#include "cstar/star_polynomial.hpp"

namespace cstar {

struct WitnessReport {
  double eta1 = 0.0;  // ||sum b_i^* b_i - 1||
  double eta2 = 0.0;  // ||sum b_i b_i^*||
  bool valid = false;
  std::optional<double> eta1_interior;  // ||(sum b_i^* b_i - 1) p|| for an interior mask p
  bool interior_valid = false;
};

template <class Element>
struct WitnessFamily {
  std::vector<Element> elements;
  WitnessReport report;
  /// Coordinate projection onto the words where a truncated family is exact.
  std::optional<Operator> interior_mask;

  std::size_t size() const noexcept { return elements.size(); }
};

using MatrixWitness = WitnessFamily<Operator>;
using SymbolicWitness = WitnessFamily<StarPolynomial>;

namespace detail {

// eta2 within tol of 1 counts as not contractive: b = (1/sqrt2) 1 rounds to either side of 1.
inline void finish_report(WitnessReport& r, std::size_t n, double tol) {
  const bool contractive = r.eta2 < 1.0 - tol;
  r.valid = n >= 2 && r.eta1 <= tol && contractive;
  r.interior_valid = n >= 2 && r.eta1_interior.has_value() && *r.eta1_interior <= tol && contractive;
}

template <class Element>
void require_nonempty(std::span<const Element> family) {
  if (family.empty()) throw Error(ErrorCode::EmptyFamily, "witness family is empty");
}

/// sum x_i^* x_i  (gram = true) or sum x_i x_i^*
inline Operator sum_products(std::span<const Operator> family, bool gram) {
  Operator out(family.front().dim());
  for (const auto& x : family) {
    x.check_same_dim(out);
    out += gram ? adjoint(x) * x : x * adjoint(x);
  }
  return out;
}

inline StarPolynomial sum_products(std::span<const StarPolynomial> family, bool gram) {
  StarPolynomial out(family.front().generators());
  for (const auto& x : family) out += gram ? adjoint(x) * x : x * adjoint(x);
  return out;
}

}  // namespace detail

inline MatrixWitness check_witness(std::span<const Operator> family, double tol,
                                   const std::optional<Operator>& interior_mask = std::nullopt) {
  detail::require_nonempty(family);
  const std::size_t dim = family.front().dim();
  const Operator defect = detail::sum_products(family, true) - Operator::identity(dim);

  MatrixWitness out;
  out.elements.assign(family.begin(), family.end());
  out.interior_mask = interior_mask;
  out.report.eta1 = op_norm(defect);
  out.report.eta2 = op_norm(detail::sum_products(family, false));
  if (interior_mask) out.report.eta1_interior = op_norm(defect * *interior_mask);
  detail::finish_report(out.report, family.size(), tol);
  return out;
}

/// eta1 is the l1 coefficient norm of the normal form of sum b_i^* b_i - 1: zero
/// exactly when the relation holds, and an upper bound on the operator norm.
/// eta2 is ||evaluate(sum b_i b_i^*)|| at the given depth, a lower bound that
/// increases with depth and is exact once the truncation holds every word the
/// element distinguishes.
inline SymbolicWitness check_witness_symbolic(std::span<const StarPolynomial> family, double tol,
                                              std::size_t depth) {
  detail::require_nonempty(family);
  const int n = family.front().generators();
  for (const auto& b : family) b.check_same_algebra(family.front());

  SymbolicWitness out;
  out.elements.assign(family.begin(), family.end());
  out.report.eta1 = coefficient_l1(detail::sum_products(family, true) - StarPolynomial::unit(n));
  out.report.eta2 = op_norm(evaluate(detail::sum_products(family, false), FockTruncation(n, depth)));
  detail::finish_report(out.report, family.size(), tol);
  return out;
}

/// Candidate family a_1..a_m with t0 = ||1 - sum (a_i^* a_i - a_i a_i^*)|| and k = ||sum a_i^* a_i||.
template <class Element>
struct CandidateFamily {
  std::vector<Element> elements;
  double t0 = 0.0;
  double k = 0.0;
  /// False when a symbolic norm had to fall back to a truncated (lower-bound) evaluation.
  bool norms_exact = true;
};

template <class Element>
struct BuildResult {
  CandidateFamily<Element> candidates;
  WitnessFamily<Element> witness;
  /// (k - 1 + t0) / k, the a-priori bound on ||sum b_i b_i^*||.
  double eta2_bound = 0.0;
};

namespace detail {

inline double backend_norm(const Operator& x, std::size_t, bool&) { return op_norm(x); }

inline double backend_norm(const StarPolynomial& x, std::size_t depth, bool& exact) {
  if (auto norm = diagonal_norm(x)) return *norm;
  exact = false;
  return op_norm(evaluate(x, FockTruncation(x.generators(), depth)));
}

inline Operator unit_like(const Operator& x) { return Operator::identity(x.dim()); }
inline StarPolynomial unit_like(const StarPolynomial& x) { return StarPolynomial::unit(x.generators()); }

inline Operator positive_root(const Operator& x, double tol) { return psd_sqrt(x, tol); }
inline StarPolynomial positive_root(const StarPolynomial& x, double tol) { return symbolic_sqrt(x, tol); }

}  // namespace detail

template <class Element>
CandidateFamily<Element> analyze_candidates(std::span<const Element> candidates, std::size_t depth = 8) {
  if (candidates.empty()) throw Error(ErrorCode::EmptyFamily, "candidate family is empty");
  CandidateFamily<Element> out;
  out.elements.assign(candidates.begin(), candidates.end());
  const Element one = detail::unit_like(candidates.front());
  const Element gram = detail::sum_products(candidates, true);
  const Element defect = one - (gram - detail::sum_products(candidates, false));
  out.t0 = detail::backend_norm(defect, depth, out.norms_exact);
  out.k = detail::backend_norm(gram, depth, out.norms_exact);
  return out;
}

/// Turns candidates with t0 < 1 into a witness: b_i = a_i / sqrt(k) for i <= m and
/// b_{m+1} = (k - sum a_i^* a_i)^{1/2} / sqrt(k).
///
/// For symbolic candidates the square root exists only for combinations of word
/// projections; `depth` sets the truncation used for eta2 and for norms of
/// non-diagonal elements. Matrix candidates always hit TraceObstruction: the
/// normalized trace forces t0 >= 1 in every matrix algebra.
template <class Element>
BuildResult<Element> build_witness(std::span<const Element> candidates, double tol, std::size_t depth = 8) {
  BuildResult<Element> out;
  out.candidates = analyze_candidates(candidates, depth);
  const double t0 = out.candidates.t0;
  const double k = out.candidates.k;
  if (!(t0 < 1.0)) throw TraceObstruction(t0);
  if (k <= 0.0) throw Error(ErrorCode::InvalidArgument, "candidate family is zero (k = 0)");

  const Element one = detail::unit_like(candidates.front());
  const Element slack = one * Complex(k) - detail::sum_products(candidates, true);
  const Element completion = detail::positive_root(slack, std::max(tol, 1e-9 * k));

  const Complex scale = 1.0 / std::sqrt(k);
  std::vector<Element> family;
  for (const auto& a : candidates) family.push_back(a * scale);
  family.push_back(completion * scale);

  if constexpr (std::is_same_v<Element, StarPolynomial>) {
    out.witness = check_witness_symbolic(std::span<const Element>(family), tol, depth);
  } else {
    out.witness = check_witness(std::span<const Element>(family), tol);
  }
  out.eta2_bound = (k - 1.0 + t0) / k;
  return out;
}

/// b_i = s_i / sqrt(n): sum b_i^* b_i = 1 and sum b_i b_i^* = (1/n) sum s_i s_i^*.
inline SymbolicWitness standard_isometry_witness(int n, double tol = 1e-12, std::size_t depth = 1) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "witness needs n >= 2");
  std::vector<StarPolynomial> family;
  for (int i = 1; i <= n; ++i)
    family.push_back(StarPolynomial::generator(n, i) * Complex(1.0 / std::sqrt(double(n))));
  return check_witness_symbolic(std::span<const StarPolynomial>(family), tol, depth);
}

/// The same family on the Fock truncation of depth L, with the interior mask on
/// words of length <= L - 1 where sum v_i^* v_i = 1 still holds.
inline MatrixWitness standard_isometry_witness(int n, std::size_t depth, double tol) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "witness needs n >= 2");
  const FockTruncation fock(n, depth);
  auto family = truncated_isometries(fock);
  for (auto& v : family) v *= 1.0 / std::sqrt(double(n));
  return check_witness(std::span<const Operator>(family), tol, fock.interior_projection(depth - 1));
}

/// Evaluates a symbolic family on the truncation of depth L. The interior mask keeps
/// words of length <= L - r, r the largest raising degree among the elements, so
/// every b_i maps the interior without hitting the boundary.
inline MatrixWitness evaluate_witness(std::span<const StarPolynomial> family, std::size_t depth, double tol) {
  detail::require_nonempty(family);
  const FockTruncation fock(family.front().generators(), depth);
  std::size_t raise = 0;
  std::vector<Operator> matrices;
  for (const auto& b : family) {
    raise = std::max(raise, raising_degree(b));
    matrices.push_back(evaluate(b, fock));
  }
  if (raise > depth) throw Error(ErrorCode::InvalidArgument, "truncation too shallow for the family");
  return check_witness(std::span<const Operator>(matrices), tol, fock.interior_projection(depth - raise));
}

/// Explicit candidates with t0 = 1/J and k = 3 in the Toeplitz algebra on two generators:
///   a_1 = s_1,  a_2 = s_2,  a_{2+j} = sqrt(lambda_j) s_1^{j-1} q (s_1^*)^j,
/// with q = 1 - s_1 s_1^* - s_2 s_2^* and lambda_j = (J - j + 1) / J.
/// Each a_{2+j} contributes lambda_j (q_j - q_{j-1}) to sum [a^*, a], q_j = s_1^j q (s_1^*)^j,
/// and the sum telescopes to 1 - (1/J) sum_{j=1}^J q_j.
inline std::vector<StarPolynomial> toeplitz_candidates(int J) {
  if (J < 1) throw Error(ErrorCode::InvalidArgument, "J must be >= 1");
  const int n = 2;
  const auto s1 = StarPolynomial::generator(n, 1);
  const auto s2 = StarPolynomial::generator(n, 2);
  const auto q = StarPolynomial::unit(n) - s1 * adjoint(s1) - s2 * adjoint(s2);
  const auto s1_power = [&](int k) { return StarPolynomial::monomial(n, Word(std::string(k, '1')), Word{}); };

  std::vector<StarPolynomial> out{s1, s2};
  for (int j = 1; j <= J; ++j) {
    const double lambda = double(J - j + 1) / J;
    out.push_back(s1_power(j - 1) * q * adjoint(s1_power(j)) * Complex(std::sqrt(lambda)));
  }
  return out;
}

}  // namespace cstar
