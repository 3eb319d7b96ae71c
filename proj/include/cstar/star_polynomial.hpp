#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "cstar/errors.hpp"
#include "cstar/operator.hpp"

namespace cstar {

/// Largest supported generator count; words are stored as digit strings.
inline constexpr int kMaxGenerators = 9;

/// Coefficients with modulus at or below this are dropped from normal forms.
inline constexpr double kPruneThreshold = 1e-14;

/// A word over generator indices 1..9, stored as its digit string ("" is the empty word).
/// Ordered length-first, then lexicographically.
class Word {
 public:
  Word() = default;
  explicit Word(std::string digits) : digits_(std::move(digits)) {
    for (char ch : digits_) {
      if (ch < '1' || ch > '9') {
        throw Error(ErrorCode::IndexOutOfRange, "word letter '" + std::string(1, ch) + "'");
      }
    }
  }

  static Word letter(int index) {
    if (index < 1 || index > kMaxGenerators) {
      throw Error(ErrorCode::IndexOutOfRange, "generator index " + std::to_string(index));
    }
    Word w;
    w.digits_.push_back(static_cast<char>('0' + index));
    return w;
  }

  std::size_t size() const noexcept { return digits_.size(); }
  bool empty() const noexcept { return digits_.empty(); }
  int operator[](std::size_t k) const { return digits_[k] - '0'; }
  const std::string& str() const noexcept { return digits_; }

  /// Largest letter, 0 for the empty word.
  int max_letter() const {
    int out = 0;
    for (char ch : digits_) out = std::max(out, ch - '0');
    return out;
  }

  bool has_prefix(const Word& prefix) const {
    return digits_.size() >= prefix.digits_.size() &&
           std::string_view(digits_).substr(0, prefix.size()) == prefix.digits_;
  }

  Word suffix_after(std::size_t count) const {
    Word w;
    w.digits_ = digits_.substr(count);
    return w;
  }

  friend Word operator+(const Word& lhs, const Word& rhs) {
    Word w;
    w.digits_ = lhs.digits_ + rhs.digits_;
    return w;
  }

  friend bool operator==(const Word&, const Word&) = default;
  friend std::strong_ordering operator<=>(const Word& lhs, const Word& rhs) {
    if (auto c = lhs.size() <=> rhs.size(); c != 0) return c;
    return lhs.digits_.compare(rhs.digits_) <=> 0;
  }

 private:
  std::string digits_;
};

/// The monomial s_mu s_nu^*.
struct Monomial {
  Word mu;
  Word nu;

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

/// Element of the Cuntz-Toeplitz algebra on n generators (isometries with
/// orthogonal ranges, no relation sum s_i s_i^* = 1), held in the unique
/// normal form  sum c_{mu,nu} s_mu s_nu^*.
class StarPolynomial {
 public:
  using TermMap = std::map<Monomial, Complex>;

  explicit StarPolynomial(int generators) : n_(generators) {
    if (n_ < 1 || n_ > kMaxGenerators) {
      throw Error(ErrorCode::InvalidArgument,
                  "generator count must lie in 1..9, got " + std::to_string(n_));
    }
  }

  static StarPolynomial zero(int generators) { return StarPolynomial(generators); }

  static StarPolynomial unit(int generators, Complex coefficient = 1.0) {
    return monomial(generators, Word{}, Word{}, coefficient);
  }

  /// s_i
  static StarPolynomial generator(int generators, int index) {
    if (index < 1 || index > generators) {
      throw Error(ErrorCode::IndexOutOfRange, "generator s" + std::to_string(index) +
                                                  " with n = " + std::to_string(generators));
    }
    return monomial(generators, Word::letter(index), Word{});
  }

  static StarPolynomial monomial(int generators, Word mu, Word nu, Complex coefficient = 1.0) {
    StarPolynomial p(generators);
    p.add_term(std::move(mu), std::move(nu), coefficient);
    p.prune();
    return p;
  }

  int generators() const noexcept { return n_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  Complex coefficient(const Word& mu, const Word& nu) const {
    auto it = terms_.find(Monomial{mu, nu});
    return it == terms_.end() ? Complex{} : it->second;
  }

  /// Accumulates without pruning; call prune() once the sum is complete.
  void add_term(Word mu, Word nu, Complex coefficient) {
    if (mu.max_letter() > n_ || nu.max_letter() > n_) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "word letter exceeds n = " + std::to_string(n_));
    }
    terms_[Monomial{std::move(mu), std::move(nu)}] += coefficient;
  }

  void prune() {
    std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) <= kPruneThreshold; });
  }

  void check_same_algebra(const StarPolynomial& other) const {
    if (other.n_ != n_) {
      throw Error(ErrorCode::GeneratorMismatch, "polynomials over " + std::to_string(n_) +
                                                    " and " + std::to_string(other.n_) +
                                                    " generators");
    }
  }

  StarPolynomial& operator+=(const StarPolynomial& rhs) {
    check_same_algebra(rhs);
    for (const auto& [m, c] : rhs.terms_) terms_[m] += c;
    prune();
    return *this;
  }

  StarPolynomial& operator-=(const StarPolynomial& rhs) {
    check_same_algebra(rhs);
    for (const auto& [m, c] : rhs.terms_) terms_[m] -= c;
    prune();
    return *this;
  }

  StarPolynomial& operator*=(Complex scale) {
    for (auto& [m, c] : terms_) c *= scale;
    prune();
    return *this;
  }

  friend StarPolynomial operator+(StarPolynomial lhs, const StarPolynomial& rhs) { return lhs += rhs; }
  friend StarPolynomial operator-(StarPolynomial lhs, const StarPolynomial& rhs) { return lhs -= rhs; }
  friend StarPolynomial operator*(StarPolynomial p, Complex scale) { return p *= scale; }
  friend StarPolynomial operator*(Complex scale, StarPolynomial p) { return p *= scale; }
  friend StarPolynomial operator-(StarPolynomial p) { return p *= -1.0; }

  /// (s_a s_v^*)(s_m s_b^*) = s_{a g} s_b^* if m = v g,  s_a s_{b g}^* if v = m g,  else 0.
  friend StarPolynomial operator*(const StarPolynomial& lhs, const StarPolynomial& rhs) {
    lhs.check_same_algebra(rhs);
    StarPolynomial out(lhs.n_);
    for (const auto& [left, a] : lhs.terms_) {
      for (const auto& [right, b] : rhs.terms_) {
        if (right.mu.has_prefix(left.nu)) {
          out.terms_[Monomial{left.mu + right.mu.suffix_after(left.nu.size()), right.nu}] += a * b;
        } else if (left.nu.has_prefix(right.mu)) {
          out.terms_[Monomial{left.mu, right.nu + left.nu.suffix_after(right.mu.size())}] += a * b;
        }
      }
    }
    out.prune();
    return out;
  }

  friend bool operator==(const StarPolynomial&, const StarPolynomial&) = default;

 private:
  int n_;
  TermMap terms_;
};

inline StarPolynomial adjoint(const StarPolynomial& p) {
  StarPolynomial out(p.generators());
  for (const auto& [m, c] : p.terms()) out.add_term(m.nu, m.mu, std::conj(c));
  return out;
}

inline StarPolynomial commutator(const StarPolynomial& p, const StarPolynomial& q) {
  return p * q - q * p;
}

/// Coefficientwise comparison; normal forms are unique, so this decides equality.
inline bool equals(const StarPolynomial& p, const StarPolynomial& q, double tol = 1e-12) {
  p.check_same_algebra(q);
  const StarPolynomial diff = p - q;
  for (const auto& [m, c] : diff.terms()) {
    if (std::abs(c) > tol) return false;
  }
  return true;
}

/// Sum of coefficient moduli. Each s_mu s_nu^* has norm 1, so this bounds the operator norm.
inline double coefficient_l1(const StarPolynomial& p) {
  double sum = 0.0;
  for (const auto& [m, c] : p.terms()) sum += std::abs(c);
  return sum;
}

/// max over terms of max(|mu|, |nu|)
inline std::size_t degree(const StarPolynomial& p) {
  std::size_t out = 0;
  for (const auto& [m, c] : p.terms()) out = std::max({out, m.mu.size(), m.nu.size()});
  return out;
}

/// max over terms of |mu| - |nu|, floored at 0: how far the element can raise word length.
inline std::size_t raising_degree(const StarPolynomial& p) {
  std::size_t out = 0;
  for (const auto& [m, c] : p.terms()) {
    if (m.mu.size() > m.nu.size()) out = std::max(out, m.mu.size() - m.nu.size());
  }
  return out;
}

}  // namespace cstar
