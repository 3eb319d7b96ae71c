#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cstar/errors.hpp"

namespace cstar {

using Complex = std::complex<double>;

namespace detail {

// Plain-arithmetic multiply-accumulate; avoids the NaN-recovery path of
// std::complex operator* in the hot loops.
inline void mul_add(Complex& acc, Complex a, Complex b) {
  const double re = a.real() * b.real() - a.imag() * b.imag();
  const double im = a.real() * b.imag() + a.imag() * b.real();
  acc = Complex(acc.real() + re, acc.imag() + im);
}

}  // namespace detail

/// Dense complex square matrix, row-major. Optionally carries one word label
/// per basis vector when it comes from a Fock-space truncation.
class Operator {
 public:
  Operator() = default;

  explicit Operator(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

  Operator(std::size_t dim, std::vector<Complex> entries) : dim_(dim), entries_(std::move(entries)) {
    if (entries_.size() != dim_ * dim_) {
      throw Error(ErrorCode::DimensionMismatch,
                  "expected " + std::to_string(dim_ * dim_) + " entries, got " +
                      std::to_string(entries_.size()));
    }
  }

  static Operator zero(std::size_t dim) { return Operator(dim); }

  static Operator identity(std::size_t dim) {
    Operator out(dim);
    for (std::size_t i = 0; i < dim; ++i) out(i, i) = 1.0;
    return out;
  }

  static Operator diagonal(std::span<const Complex> values) {
    Operator out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out(i, i) = values[i];
    return out;
  }

  static Operator diagonal(std::span<const double> values) {
    Operator out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out(i, i) = values[i];
    return out;
  }

  std::size_t dim() const noexcept { return dim_; }

  Complex& operator()(std::size_t row, std::size_t col) { return entries_[row * dim_ + col]; }
  const Complex& operator()(std::size_t row, std::size_t col) const {
    return entries_[row * dim_ + col];
  }

  std::span<Complex> entries() noexcept { return entries_; }
  std::span<const Complex> entries() const noexcept { return entries_; }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  bool has_labels() const noexcept { return !labels_.empty(); }

  /// Labels must be distinct and one per basis vector; an empty vector clears them.
  void set_labels(std::vector<std::string> labels) {
    if (!labels.empty()) {
      if (labels.size() != dim_) {
        throw Error(ErrorCode::DimensionMismatch, "label count differs from dim");
      }
      std::set<std::string> seen(labels.begin(), labels.end());
      if (seen.size() != labels.size()) {
        throw Error(ErrorCode::InvalidArgument, "basis labels must be distinct");
      }
    }
    labels_ = std::move(labels);
  }

  Operator& operator+=(const Operator& rhs) {
    check_same_dim(rhs);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += rhs.entries_[i];
    adopt_labels(rhs);
    return *this;
  }

  Operator& operator-=(const Operator& rhs) {
    check_same_dim(rhs);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= rhs.entries_[i];
    adopt_labels(rhs);
    return *this;
  }

  Operator& operator*=(Complex scale) {
    for (auto& e : entries_) e *= scale;
    return *this;
  }

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Operator x, Complex scale) { return x *= scale; }
  friend Operator operator*(Complex scale, Operator x) { return x *= scale; }
  friend Operator operator-(Operator x) { return x *= -1.0; }

  friend Operator operator*(const Operator& lhs, const Operator& rhs) {
    lhs.check_same_dim(rhs);
    const std::size_t d = lhs.dim_;
    Operator out(d);
    for (std::size_t i = 0; i < d; ++i) {
      Complex* out_row = &out.entries_[i * d];
      for (std::size_t k = 0; k < d; ++k) {
        const Complex a = lhs.entries_[i * d + k];
        if (a == Complex{}) continue;
        const Complex* rhs_row = &rhs.entries_[k * d];
        for (std::size_t j = 0; j < d; ++j) detail::mul_add(out_row[j], a, rhs_row[j]);
      }
    }
    out.labels_ = lhs.labels_.empty() ? rhs.labels_ : lhs.labels_;
    return out;
  }

  friend bool operator==(const Operator&, const Operator&) = default;

  void check_same_dim(const Operator& other) const {
    if (other.dim_ != dim_) {
      throw Error(ErrorCode::DimensionMismatch,
                  "operator dims " + std::to_string(dim_) + " and " + std::to_string(other.dim_));
    }
  }

 private:
  void adopt_labels(const Operator& other) {
    if (labels_.empty()) labels_ = other.labels_;
  }

  std::size_t dim_ = 0;
  std::vector<Complex> entries_;
  std::vector<std::string> labels_;
};

inline Operator adjoint(const Operator& x) {
  const std::size_t d = x.dim();
  Operator out(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out(j, i) = std::conj(x(i, j));
  out.set_labels(x.labels());
  return out;
}

inline Operator commutator(const Operator& x, const Operator& y) { return x * y - y * x; }

inline Complex trace(const Operator& x) {
  Complex sum{};
  for (std::size_t i = 0; i < x.dim(); ++i) sum += x(i, i);
  return sum;
}

inline double frobenius_norm(const Operator& x) {
  double sum = 0.0;
  for (const auto& e : x.entries()) sum += std::norm(e);
  return std::sqrt(sum);
}

/// Largest entrywise modulus of x - y.
inline double max_abs_diff(const Operator& x, const Operator& y) {
  x.check_same_dim(y);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.entries().size(); ++i)
    worst = std::max(worst, std::abs(x.entries()[i] - y.entries()[i]));
  return worst;
}

/// (x + x*) / 2
inline Operator hermitian_part(const Operator& x) {
  const std::size_t d = x.dim();
  Operator out(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out(i, j) = 0.5 * (x(i, j) + std::conj(x(j, i)));
  out.set_labels(x.labels());
  return out;
}

/// Bitwise check x == x*.
inline bool is_exactly_hermitian(const Operator& x) {
  const std::size_t d = x.dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j)
      if (x(i, j) != std::conj(x(j, i))) return false;
  return true;
}

/// Diagonal 0/1 projection selecting the basis vectors where `keep` is true.
inline Operator coordinate_projection(std::span<const bool> keep) {
  Operator out(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) out(i, i) = keep[i] ? 1.0 : 0.0;
  return out;
}

/// p x p for a coordinate projection p, computed by masking rather than products.
inline Operator compress(const Operator& x, const Operator& mask) {
  x.check_same_dim(mask);
  Operator out = x;
  const std::size_t d = x.dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out(i, j) *= mask(i, i) * mask(j, j);
  return out;
}

}  // namespace cstar
