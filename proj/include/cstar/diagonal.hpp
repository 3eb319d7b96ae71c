#pragma once

// Functional calculus for diagonal elements sum_w c_w s_w s_w^*.
//
// The word projections P_w = s_w s_w^* commute; P_u P_v = P_v when u is a
// prefix of v and 0 when u, v are incomparable. Walking the prefix trie of the
// support, each visited node w owns the nonzero atom
//     P_w - sum_{visited children i} P_{wi}
// on which the element acts as the scalar v(w) = sum_{u prefix of w} c_u.
// These atoms are pairwise orthogonal and sum to 1, so {v(w)} is the spectrum.

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "cstar/star_polynomial.hpp"

namespace cstar {

inline bool is_diagonal(const StarPolynomial& p) {
  return std::all_of(p.terms().begin(), p.terms().end(),
                     [](const auto& kv) { return kv.first.mu == kv.first.nu; });
}

namespace detail {

class DiagonalTrie {
 public:
  explicit DiagonalTrie(const StarPolynomial& p) {
    for (const auto& [m, c] : p.terms()) support_.emplace_back(m.mu, c);
  }

  /// Calls visit(word, value, children) for every node, parents first.
  void walk(const std::function<void(const Word&, Complex, const std::set<int>&)>& visit) const {
    walk_from(Word{}, coefficient_of(Word{}), visit);
  }

 private:
  Complex coefficient_of(const Word& w) const {
    for (const auto& [word, c] : support_)
      if (word == w) return c;
    return {};
  }

  std::set<int> children_of(const Word& w) const {
    std::set<int> out;
    for (const auto& [word, c] : support_)
      if (word.size() > w.size() && word.has_prefix(w)) out.insert(word[w.size()]);
    return out;
  }

  void walk_from(const Word& w, Complex value,
                 const std::function<void(const Word&, Complex, const std::set<int>&)>& visit) const {
    const auto children = children_of(w);
    visit(w, value, children);
    for (int i : children) {
      const Word child = w + Word::letter(i);
      walk_from(child, value + coefficient_of(child), visit);
    }
  }

  std::vector<std::pair<Word, Complex>> support_;
};

}  // namespace detail

/// Atom values (one per trie node) of a diagonal element, or nullopt if p is not diagonal.
inline std::optional<std::vector<Complex>> diagonal_spectrum(const StarPolynomial& p) {
  if (!is_diagonal(p)) return std::nullopt;
  std::vector<Complex> values;
  detail::DiagonalTrie(p).walk(
      [&](const Word&, Complex value, const std::set<int>&) { values.push_back(value); });
  return values;
}

/// Exact operator norm of a diagonal element (max |atom value|), nullopt otherwise.
inline std::optional<double> diagonal_norm(const StarPolynomial& p) {
  auto spectrum = diagonal_spectrum(p);
  if (!spectrum) return std::nullopt;
  double out = 0.0;
  for (Complex v : *spectrum) out = std::max(out, std::abs(v));
  return out;
}

/// f(p) for diagonal p, built atom by atom:
///   g(w) = f(v(w)) P_w + sum_{visited children} (g(wi) - f(v(w)) P_{wi}).
inline StarPolynomial apply_diagonal_function(const StarPolynomial& p,
                                              const std::function<Complex(Complex)>& f) {
  if (!is_diagonal(p)) {
    throw Error(ErrorCode::InvalidArgument, "functional calculus needs a diagonal element");
  }
  StarPolynomial out(p.generators());
  detail::DiagonalTrie(p).walk([&](const Word& w, Complex value, const std::set<int>& children) {
    const Complex fw = f(value);
    out.add_term(w, w, fw);
    for (int i : children) {
      const Word child = w + Word::letter(i);
      out.add_term(child, child, -fw);
    }
  });
  out.prune();
  return out;
}

/// Square root of a diagonal element that is real and >= -tol on every atom.
/// Anything else has no representation here and raises SymbolicSqrtUnsupported
/// (non-diagonal or complex) or NotPositive.
inline StarPolynomial symbolic_sqrt(const StarPolynomial& p, double tol) {
  const auto spectrum = diagonal_spectrum(p);
  if (!spectrum) {
    throw Error(ErrorCode::SymbolicSqrtUnsupported,
                "element is not a combination of word projections");
  }
  for (Complex v : *spectrum) {
    if (std::abs(v.imag()) > tol) {
      throw Error(ErrorCode::SymbolicSqrtUnsupported, "element has a non-real atom value");
    }
    if (v.real() < -tol) {
      throw Error(ErrorCode::NotPositive, "atom value " + std::to_string(v.real()));
    }
  }
  return apply_diagonal_function(p, [](Complex v) { return Complex(std::sqrt(std::max(v.real(), 0.0))); });
}

}  // namespace cstar
