#pragma once

#include <random>

#include "cstar/star_polynomial.hpp"

namespace cstar::testing {

inline Word random_word(int n, std::size_t max_length, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> length(0, max_length);
  std::uniform_int_distribution<int> letter(1, n);
  std::string digits(length(rng), '1');
  for (auto& ch : digits) ch = static_cast<char>('0' + letter(rng));
  return Word(digits);
}

/// Up to max_terms monomials s_mu s_nu^* with |mu|, |nu| <= max_degree.
inline StarPolynomial random_polynomial(int n, std::mt19937_64& rng, std::size_t max_terms = 8,
                                        std::size_t max_degree = 3) {
  std::uniform_int_distribution<std::size_t> count(1, max_terms);
  std::normal_distribution<double> normal;
  StarPolynomial p(n);
  const std::size_t terms = count(rng);
  for (std::size_t k = 0; k < terms; ++k) {
    p.add_term(random_word(n, max_degree, rng), random_word(n, max_degree, rng),
               Complex(normal(rng), normal(rng)));
  }
  p.prune();
  return p;
}

}  // namespace cstar::testing
