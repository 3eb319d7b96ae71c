#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cstar/operator.hpp"

namespace cstar {

struct HermitianEigen {
  std::vector<double> values;  // ascending
  Operator vectors;            // column k is the eigenvector for values[k]
};

namespace detail {

inline double off_diagonal_norm(const Operator& a) {
  double sum = 0.0;
  const std::size_t d = a.dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (i != j) sum += std::norm(a(i, j));
  return std::sqrt(sum);
}

// Cyclic complex Jacobi on the Hermitian part of `a`. Each rotation
// V = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on the (p, q) plane annihilates a(p, q),
// where phi is the phase of a(p, q).
inline HermitianEigen jacobi(const Operator& input, bool want_vectors) {
  const std::size_t d = input.dim();
  Operator a = is_exactly_hermitian(input) ? input : hermitian_part(input);
  Operator v = want_vectors ? Operator::identity(d) : Operator{};

  const double threshold = 1e-13 * frobenius_norm(a);
  constexpr int kMaxSweeps = 100;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= threshold) break;
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const Complex apq = a(p, q);
        const double g = std::abs(apq);
        if (g == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Skip rotations that cannot change the diagonal at working precision.
        if (sweep > 3 && std::abs(app) + 100.0 * g == std::abs(app) &&
            std::abs(aqq) + 100.0 * g == std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const Complex phase = apq / g;
        const double theta = (aqq - app) / (2.0 * g);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex s_fwd = s * phase;             // V(p, q)
        const Complex s_bwd = s * std::conj(phase);  // -V(q, p)

        // A <- A V (columns p, q)
        for (std::size_t k = 0; k < d; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp - s_bwd * akq;
          a(k, q) = s_fwd * akp + c * akq;
        }
        // A <- V* A (rows p, q)
        for (std::size_t k = 0; k < d; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk - s_fwd * aqk;
          a(q, k) = s_bwd * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = app - t * g;
        a(q, q) = aqq + t * g;

        if (want_vectors) {
          for (std::size_t k = 0; k < d; ++k) {
            const Complex vkp = v(k, p);
            const Complex vkq = v(k, q);
            v(k, p) = c * vkp - s_bwd * vkq;
            v(k, q) = s_fwd * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  HermitianEigen out;
  out.values.reserve(d);
  for (std::size_t k : order) out.values.push_back(a(k, k).real());
  if (want_vectors) {
    out.vectors = Operator(d);
    for (std::size_t col = 0; col < d; ++col)
      for (std::size_t row = 0; row < d; ++row) out.vectors(row, col) = v(row, order[col]);
  }
  return out;
}

}  // namespace detail

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of x.
inline HermitianEigen eigh(const Operator& x) { return detail::jacobi(x, true); }

inline std::vector<double> eigvalsh(const Operator& x) { return detail::jacobi(x, false).values; }

/// Largest singular value. Hermitian inputs use max |eigenvalue| directly;
/// others go through the Gram matrix x* x.
inline double op_norm(const Operator& x) {
  if (x.dim() == 0) return 0.0;
  if (is_exactly_hermitian(x)) {
    const auto values = eigvalsh(x);
    return std::max(std::abs(values.front()), std::abs(values.back()));
  }
  const auto values = eigvalsh(adjoint(x) * x);
  return std::sqrt(std::max(values.back(), 0.0));
}

struct PositivityReport {
  bool is_hermitian = false;
  double min_eig = 0.0;
  bool is_psd = false;
};

inline PositivityReport positivity_check(const Operator& x, double tol) {
  PositivityReport report;
  report.is_hermitian = op_norm(x - adjoint(x)) <= tol;
  report.min_eig = x.dim() == 0 ? 0.0 : eigvalsh(x).front();
  report.is_psd = report.is_hermitian && report.min_eig >= -tol;
  return report;
}

/// Positive square root. Eigenvalues in [-tol, 0) are clamped to zero.
inline Operator psd_sqrt(const Operator& x, double tol = 1e-9) {
  if (op_norm(x - adjoint(x)) > tol) {
    throw Error(ErrorCode::NotHermitian, "psd_sqrt input is not Hermitian within tolerance");
  }
  const auto eig = eigh(x);
  const std::size_t d = x.dim();
  if (d > 0 && eig.values.front() < -tol) {
    throw Error(ErrorCode::NotPositive,
                "psd_sqrt input has eigenvalue " + std::to_string(eig.values.front()));
  }
  std::vector<double> roots(d);
  for (std::size_t k = 0; k < d; ++k) roots[k] = std::sqrt(std::max(eig.values[k], 0.0));

  // V diag(roots) V*
  Operator out(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      Complex sum{};
      for (std::size_t k = 0; k < d; ++k) {
        if (roots[k] == 0.0) continue;
        sum += roots[k] * eig.vectors(i, k) * std::conj(eig.vectors(j, k));
      }
      out(i, j) = sum;
      out(j, i) = std::conj(sum);
    }
    out(i, i) = out(i, i).real();
  }
  out.set_labels(x.labels());
  return out;
}

}  // namespace cstar
