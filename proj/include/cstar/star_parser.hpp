#pragma once

// Text form of star-algebra expressions.
//
//   expr   := [sign] term (('+' | '-') term)*
//   term   := scalar ['*'] factor* | factor+
//   factor := 's' digits ['*'] | '1' | '(' expr ')' ['*']
//   scalar := float | '(' float ('+' | '-') float 'i' ')'
//
// Juxtaposition is the product; a '*' directly after a factor is the adjoint,
// a '*' after a scalar is scalar multiplication.
//
// The parser is generic over an algebra policy so the same text can be read
// into normal form (PolynomialAlgebra) or evaluated literally as products of
// truncated matrices (see fock.hpp).

#include <cctype>
#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

#include "cstar/star_polynomial.hpp"

namespace cstar {

/// Algebra policy for the parser: reads text into Cuntz-Toeplitz normal form.
struct PolynomialAlgebra {
  using value_type = StarPolynomial;
  int n;

  int generators() const { return n; }
  StarPolynomial unit() const { return StarPolynomial::unit(n); }
  StarPolynomial generator(int index) const { return StarPolynomial::generator(n, index); }
};

namespace detail {

template <class Algebra>
class ExpressionParser {
 public:
  using Value = typename Algebra::value_type;

  ExpressionParser(std::string_view text, const Algebra& algebra) : text_(text), algebra_(algebra) {}

  Value parse() {
    Value out = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(pos_, message); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(char ch) {
    if (peek() != ch) return false;
    ++pos_;
    return true;
  }

  static bool starts_number(char ch) { return std::isdigit(static_cast<unsigned char>(ch)) || ch == '.'; }

  Value expression() {
    bool negate = false;
    if (peek() == '-' || peek() == '+') negate = text_[pos_++] == '-';
    Value out = term();
    if (negate) out = out * Complex(-1.0);
    while (true) {
      const char op = peek();
      if (op != '+' && op != '-') break;
      ++pos_;
      Value rhs = term();
      if (op == '+') {
        out = out + rhs;
      } else {
        out = out - rhs;
      }
    }
    return out;
  }

  bool starts_factor(char ch) const { return ch == 's' || ch == '(' || ch == '1'; }

  Value term() {
    Complex scale = 1.0;
    bool have_scalar = false;
    const char first = peek();
    if (starts_number(first)) {
      // A bare "1" followed by a factor would be ambiguous; treat any leading number as a scalar.
      scale = real_number(false);
      have_scalar = true;
    } else if (first == '(') {
      if (auto c = try_complex_scalar()) {
        scale = *c;
        have_scalar = true;
      }
    }

    bool need_factor = !have_scalar;
    if (have_scalar && accept('*')) need_factor = true;

    std::optional<Value> product;
    while (starts_factor(peek())) {
      Value f = factor();
      product = product ? Value(*product * f) : std::move(f);
    }
    if (!product) {
      if (need_factor) fail("expected a factor");
      return algebra_.unit() * scale;
    }
    return have_scalar ? Value(*product * scale) : std::move(*product);
  }

  Value factor() {
    const char ch = peek();
    Value out = algebra_.unit();
    if (ch == 's') {
      const std::size_t start = pos_++;
      const std::size_t digits = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == digits) fail("expected generator index after 's'");
      int index = 0;
      const auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, index);
      if (ec != std::errc{} || index < 1 || index > algebra_.generators()) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "generator '" + std::string(text_.substr(start, pos_ - start)) +
                        "' outside 1.." + std::to_string(algebra_.generators()) +
                        " at position " + std::to_string(start));
      }
      out = algebra_.generator(index);
    } else if (ch == '1') {
      ++pos_;
      if (pos_ < text_.size() && (starts_number(text_[pos_]) || text_[pos_] == 'e')) {
        fail("numeric literal in factor position");
      }
      return out;
    } else if (ch == '(') {
      ++pos_;
      out = expression();
      if (!accept(')')) fail("expected ')'");
    } else {
      fail("expected a factor");
    }
    // Postfix adjoint binds directly to the factor.
    if (pos_ < text_.size() && text_[pos_] == '*') {
      ++pos_;
      out = adjoint(out);
    }
    return out;
  }

  double real_number(bool allow_sign) {
    skip_space();
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    if (!allow_sign && begin < end && (*begin == '-' || *begin == '+')) fail("unexpected sign");
    const char* digits = begin;
    if (allow_sign && digits < end && *digits == '+') ++digits;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(digits, end, value);
    if (ec != std::errc{}) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  // '(' float ('+'|'-') float 'i' ')', restoring the position on mismatch.
  std::optional<Complex> try_complex_scalar() {
    const std::size_t saved = pos_;
    try {
      if (!accept('(')) return std::nullopt;
      const double re = real_number(true);
      const char op = peek();
      if (op != '+' && op != '-') throw SyntaxError(pos_, "");
      ++pos_;
      const double im = real_number(false);
      if (!accept('i') || !accept(')')) throw SyntaxError(pos_, "");
      return Complex(re, op == '+' ? im : -im);
    } catch (const SyntaxError&) {
      pos_ = saved;
      return std::nullopt;
    }
  }

  std::string_view text_;
  const Algebra& algebra_;
  std::size_t pos_ = 0;
};

}  // namespace detail

template <class Algebra>
typename Algebra::value_type parse_expression(std::string_view text, const Algebra& algebra) {
  return detail::ExpressionParser<Algebra>(text, algebra).parse();
}

/// Parses text into Cuntz-Toeplitz normal form on n generators.
inline StarPolynomial parse_star_poly(std::string_view text, int n) {
  return parse_expression(text, PolynomialAlgebra{n});
}

namespace detail {

inline std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

inline std::string format_monomial(const Monomial& m) {
  std::string out;
  for (std::size_t k = 0; k < m.mu.size(); ++k) {
    if (!out.empty()) out += ' ';
    out += 's' + std::to_string(m.mu[k]);
  }
  // s_nu^* = s_{nu_k}^* ... s_{nu_1}^*
  for (std::size_t k = m.nu.size(); k-- > 0;) {
    if (!out.empty()) out += ' ';
    out += 's' + std::to_string(m.nu[k]) + '*';
  }
  return out.empty() ? "1" : out;
}

}  // namespace detail

/// Canonical text of a normal form; parse_star_poly reads it back exactly.
inline std::string to_string(const StarPolynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& [m, c] : p.terms()) {
    const std::string word = detail::format_monomial(m);
    const bool is_unit = m.mu.empty() && m.nu.empty();
    std::string coeff;
    bool negative = false;
    if (c.imag() == 0.0) {
      negative = std::signbit(c.real());
      const double magnitude = std::abs(c.real());
      if (magnitude != 1.0 || is_unit) coeff = detail::format_double(magnitude);
    } else {
      const double im = c.imag();
      coeff = "(" + detail::format_double(c.real()) + (im < 0 ? "-" : "+") +
              detail::format_double(std::abs(im)) + "i)";
    }
    if (out.empty()) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    if (is_unit) {
      out += coeff;
    } else if (coeff.empty()) {
      out += word;
    } else {
      out += coeff + "*" + word;
    }
  }
  return out;
}

}  // namespace cstar
