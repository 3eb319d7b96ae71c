#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cstar/star_parser.hpp"
#include "cstar/star_polynomial.hpp"

namespace cstar {

/// Span of the words of length <= depth over n letters, in length-then-lexicographic order.
class FockTruncation {
 public:
  FockTruncation(int generators, std::size_t depth) : n_(generators), depth_(depth) {
    if (n_ < 1 || n_ > kMaxGenerators) {
      throw Error(ErrorCode::InvalidArgument, "generator count must lie in 1..9");
    }
    std::size_t level = 1;
    for (std::size_t len = 0; len <= depth_; ++len) {
      offsets_.push_back(words_.size());
      for (std::size_t k = 0; k < level; ++k) {
        std::string digits(len, '1');
        std::size_t rest = k;
        for (std::size_t pos = len; pos-- > 0;) {
          digits[pos] = static_cast<char>('1' + rest % static_cast<std::size_t>(n_));
          rest /= static_cast<std::size_t>(n_);
        }
        words_.emplace_back(std::move(digits));
      }
      level *= static_cast<std::size_t>(n_);
    }
  }

  int generators() const noexcept { return n_; }
  std::size_t depth() const noexcept { return depth_; }
  std::size_t dim() const noexcept { return words_.size(); }
  const std::vector<Word>& words() const noexcept { return words_; }

  /// (n^{L+1} - 1) / (n - 1), or L + 1 for a single generator.
  static std::size_t dimension_for(int generators, std::size_t depth) {
    if (generators == 1) return depth + 1;
    std::size_t total = 0, level = 1;
    for (std::size_t len = 0; len <= depth; ++len, level *= static_cast<std::size_t>(generators))
      total += level;
    return total;
  }

  /// Basis index of w; w must have length <= depth.
  std::size_t index_of(const Word& w) const {
    if (w.size() > depth_ || w.max_letter() > n_) {
      throw Error(ErrorCode::IndexOutOfRange, "word '" + w.str() + "' outside the truncation");
    }
    std::size_t rank = 0;
    for (std::size_t k = 0; k < w.size(); ++k)
      rank = rank * static_cast<std::size_t>(n_) + static_cast<std::size_t>(w[k] - 1);
    return offsets_[w.size()] + rank;
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(words_.size());
    for (const auto& w : words_) out.push_back(w.str());
    return out;
  }

  /// Coordinate projection onto the words of length <= max_length.
  Operator interior_projection(std::size_t max_length) const {
    std::vector<bool> keep(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) keep[i] = words_[i].size() <= max_length;
    Operator out = Operator::zero(words_.size());
    for (std::size_t i = 0; i < keep.size(); ++i) out(i, i) = keep[i] ? 1.0 : 0.0;
    out.set_labels(labels());
    return out;
  }

  Operator identity() const {
    Operator out = Operator::identity(dim());
    out.set_labels(labels());
    return out;
  }

 private:
  int n_;
  std::size_t depth_;
  std::vector<Word> words_;
  std::vector<std::size_t> offsets_;
};

/// Truncated shifts v_1..v_n: v_i |w> = |iw> when |w| <= L-1, and 0 on words of length L.
inline std::vector<Operator> truncated_isometries(const FockTruncation& fock) {
  std::vector<Operator> out;
  for (int i = 1; i <= fock.generators(); ++i) {
    Operator v(fock.dim());
    const Word letter = Word::letter(i);
    for (std::size_t col = 0; col < fock.dim(); ++col) {
      const Word& w = fock.words()[col];
      if (w.size() + 1 <= fock.depth()) v(fock.index_of(letter + w), col) = 1.0;
    }
    v.set_labels(fock.labels());
    out.push_back(std::move(v));
  }
  return out;
}

inline std::vector<Operator> truncated_isometries(int generators, std::size_t depth) {
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "truncation depth must be >= 1");
  return truncated_isometries(FockTruncation(generators, depth));
}

/// Matrix of p on the truncation, term by term: s_mu s_nu^* |nu w'> = |mu w'> when it fits.
/// This is the compression P_L p P_L of the Fock representation.
inline Operator evaluate(const StarPolynomial& p, const FockTruncation& fock) {
  if (p.generators() != fock.generators()) {
    throw Error(ErrorCode::GeneratorMismatch, "polynomial and truncation use different n");
  }
  Operator out(fock.dim());
  for (const auto& [m, c] : p.terms()) {
    for (std::size_t col = 0; col < fock.dim(); ++col) {
      const Word& w = fock.words()[col];
      if (!w.has_prefix(m.nu)) continue;
      const std::size_t target_length = m.mu.size() + w.size() - m.nu.size();
      if (target_length > fock.depth()) continue;
      out(fock.index_of(m.mu + w.suffix_after(m.nu.size())), col) += c;
    }
  }
  out.set_labels(fock.labels());
  return out;
}

/// Parser policy that evaluates text literally as products of truncated shifts,
/// so boundary defects such as v_1^* v_1 != 1 remain visible.
struct TruncatedAlgebra {
  using value_type = Operator;

  explicit TruncatedAlgebra(const FockTruncation& truncation)
      : fock(truncation), shifts(truncated_isometries(truncation)) {}

  int generators() const { return fock.generators(); }
  Operator unit() const { return fock.identity(); }
  Operator generator(int index) const { return shifts.at(static_cast<std::size_t>(index - 1)); }

  const FockTruncation& fock;
  std::vector<Operator> shifts;
};

inline Operator evaluate_expression(std::string_view text, const FockTruncation& fock) {
  return parse_expression(text, TruncatedAlgebra(fock));
}

}  // namespace cstar
