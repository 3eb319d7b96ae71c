#pragma once

// Distance from 1 to the real span of self-adjoint commutators c_i = a_i^* a_i - a_i a_i^*.
//
// The estimate is a Frobenius least-squares projection followed by subgradient
// polishing of the operator norm. The reported opnorm_residual is attained by the
// returned coefficients, so it upper-bounds the distance to the span of this
// finite family; it says nothing about sums of commutators outside the family.

#include <Eigen/Cholesky>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "cstar/operator.hpp"
#include "cstar/spectral.hpp"

namespace cstar {

inline constexpr double kGramRegularization = 1e-12;
inline constexpr std::size_t kDefaultPolishSteps = 200;

struct CommutatorSpanFamily {
  std::vector<Operator> generators;
  std::vector<Operator> span_elements;

  CommutatorSpanFamily() = default;

  /// An empty family needs its dimension up front.
  explicit CommutatorSpanFamily(std::size_t dim) : dim_(dim) {}

  explicit CommutatorSpanFamily(std::vector<Operator> gens) : generators(std::move(gens)) {
    if (!generators.empty()) dim_ = generators.front().dim();
    for (const auto& a : generators) {
      if (a.dim() != dim_) throw Error(ErrorCode::DimensionMismatch, "family generators differ in dimension");
      span_elements.push_back(hermitian_part(adjoint(a) * a - a * adjoint(a)));
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return generators.size(); }

  void append(const Operator& a) {
    if (generators.empty() && dim_ == 0) dim_ = a.dim();
    if (a.dim() != dim_) throw Error(ErrorCode::DimensionMismatch, "family generators differ in dimension");
    generators.push_back(a);
    span_elements.push_back(hermitian_part(adjoint(a) * a - a * adjoint(a)));
  }

 private:
  std::size_t dim_ = 0;
};

struct DistanceEstimate {
  std::vector<double> coefficients;
  double frobenius_residual = 0.0;  // of the least-squares solution
  double opnorm_residual = 0.0;     // of the returned coefficients
};

namespace detail {

inline Operator span_residual(const Operator& target, std::span<const Operator> elements, const std::vector<double>& t) {
  Operator out = target;
  for (std::size_t j = 0; j < elements.size(); ++j) out -= elements[j] * Complex(t[j]);
  return out;
}

}  // namespace detail

/// With `interior_mask` every c_j and the unit are replaced by their compressions
/// p c_j p and p, and all residuals are measured there.
inline DistanceEstimate commutator_distance(const CommutatorSpanFamily& family,
                                            std::size_t polish_steps = kDefaultPolishSteps,
                                            const std::optional<Operator>& interior_mask = std::nullopt) {
  const std::size_t dim = family.dim();
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "family has no dimension");
  Operator target = Operator::identity(dim);
  std::vector<Operator> elements = family.span_elements;
  if (interior_mask) {
    target.check_same_dim(*interior_mask);
    target = compress(target, *interior_mask);
    for (auto& c : elements) c = compress(c, *interior_mask);
  }

  const std::size_t m = elements.size();
  DistanceEstimate out;
  out.coefficients.assign(m, 0.0);
  if (m == 0) {
    out.frobenius_residual = frobenius_norm(target);
    out.opnorm_residual = op_norm(target);
    return out;
  }

  // Real normal equations: G_jk = Re tr(c_j c_k), r_j = Re tr(c_j target).
  Eigen::MatrixXd gram(m, m);
  Eigen::VectorXd rhs(m);
  for (std::size_t j = 0; j < m; ++j) {
    rhs(Eigen::Index(j)) = trace(elements[j] * target).real();
    for (std::size_t k = j; k < m; ++k) {
      const double g = trace(elements[j] * elements[k]).real();
      gram(Eigen::Index(j), Eigen::Index(k)) = g;
      gram(Eigen::Index(k), Eigen::Index(j)) = g;
    }
  }
  gram += kGramRegularization * Eigen::MatrixXd::Identity(m, m);
  const Eigen::VectorXd solution = gram.ldlt().solve(rhs);
  std::vector<double> t(solution.data(), solution.data() + m);

  Operator residual = detail::span_residual(target, elements, t);
  out.frobenius_residual = frobenius_norm(residual);

  // Subgradient descent on t -> ||target - sum t_j c_j||, step 1/sqrt(k) along the
  // normalized subgradient -sign(lambda) <v, c_j v> at the extreme eigenpair.
  std::vector<double> best = t;
  double best_norm = op_norm(residual);
  for (std::size_t step = 1; step <= polish_steps; ++step) {
    const auto eig = eigh(hermitian_part(residual));
    std::size_t top = 0;
    for (std::size_t i = 1; i < dim; ++i)
      if (std::abs(eig.values[i]) > std::abs(eig.values[top])) top = i;
    const double sign = eig.values[top] >= 0.0 ? 1.0 : -1.0;

    std::vector<double> grad(m);
    double grad_norm = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      Complex quad{};
      for (std::size_t r = 0; r < dim; ++r) {
        Complex row{};
        for (std::size_t c = 0; c < dim; ++c) row += elements[j](r, c) * eig.vectors(c, top);
        quad += std::conj(eig.vectors(r, top)) * row;
      }
      grad[j] = -sign * quad.real();
      grad_norm += grad[j] * grad[j];
    }
    grad_norm = std::sqrt(grad_norm);
    if (grad_norm == 0.0) break;

    const double size = 1.0 / std::sqrt(double(step));
    for (std::size_t j = 0; j < m; ++j) t[j] -= size * grad[j] / grad_norm;
    residual = detail::span_residual(target, elements, t);
    const double norm = op_norm(residual);
    if (norm < best_norm) {
      best_norm = norm;
      best = t;
    }
  }
  out.coefficients = std::move(best);
  out.opnorm_residual = best_norm;
  return out;
}

/// Normalized trace on M_dim: tau(1) = 1, tau(xy) = tau(yx), tau(x^* x) >= 0.
/// It vanishes on commutators, so ||1 - x|| >= |tau(1 - x)| = 1 for x in the span.
class TracialState {
 public:
  explicit TracialState(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "trace certificate needs dim >= 1");
  }

  std::size_t dim() const noexcept { return dim_; }

  Complex operator()(const Operator& x) const {
    if (x.dim() != dim_) throw Error(ErrorCode::DimensionMismatch, "operator does not match the certificate");
    return trace(x) / double(dim_);
  }

 private:
  std::size_t dim_;
};

inline TracialState trace_certificate(std::size_t dim) { return TracialState(dim); }

}  // namespace cstar
