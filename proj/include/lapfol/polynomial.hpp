#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lapfol {

using Rational = mpq_class;

inline constexpr int kMaxVars = 8;

/// Exponent vector packed one byte per variable; variable 0 occupies the
/// most significant byte so integer order equals lexicographic order.
class Monomial {
 public:
  constexpr Monomial() = default;
  static Monomial variable(int i, int power = 1);

  int exponent(int i) const { return static_cast<int>((packed_ >> shift(i)) & 0xffu); }
  int degree() const;
  int degree(int offset, int len) const;
  Monomial with_exponent(int i, int e) const;
  Monomial operator*(const Monomial& o) const;
  std::uint64_t packed() const { return packed_; }

  bool operator==(const Monomial& o) const { return packed_ == o.packed_; }

 private:
  static constexpr int shift(int i) { return 8 * (kMaxVars - 1 - i); }
  std::uint64_t packed_ = 0;
};

/// Graded order: lower total degree first, then lexicographic.
struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return a.packed() < b.packed();
  }
};

/// Multivariate polynomial with exact rational coefficients over a fixed
/// number of ambient variables x1..xn.
class Polynomial {
 public:
  using Terms = std::map<Monomial, Rational, MonomialLess>;

  Polynomial() = default;
  explicit Polynomial(int nvars);
  static Polynomial constant(int nvars, const Rational& c);
  static Polynomial variable(int nvars, int i);
  static Polynomial monomial(int nvars, const Monomial& m, const Rational& c = 1);

  /// Plain-text monomial syntax, e.g. "3/2 x1^2 x3 - 1 x2". Also accepts
  /// parentheses, '*', '^' on groups, and the aliases x,y,z,w (x1..x4),
  /// c,s (x1,x2) and cK,sK (x(2K-1), x(2K)). Throws ConfigError on bad input.
  static Polynomial parse(std::string_view text, int nvars);

  int nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Total degree; −1 for the zero polynomial.
  int degree() const;
  int degree(int offset, int len) const;
  Rational coefficient(const Monomial& m) const;
  bool is_constant() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial operator-() const;
  bool operator==(const Polynomial& o) const;

  void add_term(const Monomial& m, const Rational& c);
  Polynomial pow(int e) const;
  Polynomial derivative(int i) const;
  /// Σ ∂²/∂x_i² over the coordinate block [offset, offset+len).
  Polynomial block_laplacian(int offset, int len) const;
  /// Σ x_i ∂/∂x_i over the block.
  Polynomial block_euler(int offset, int len) const;
  /// Multiplication by Σ x_i² over the block.
  Polynomial times_block_r2(int offset, int len) const;

  double evaluate(std::span<const double> x) const;

  std::string to_string() const;

 private:
  int nvars_ = 0;
  Terms terms_;
};

/// Double-precision copy of a polynomial for repeated evaluation.
class NumericPolynomial {
 public:
  NumericPolynomial() = default;
  explicit NumericPolynomial(const Polynomial& p);
  double operator()(std::span<const double> x) const;
  int nvars() const { return nvars_; }

 private:
  struct Term {
    double coeff;
    std::array<std::uint8_t, kMaxVars> exps;
  };
  int nvars_ = 0;
  int max_exp_ = 0;
  std::vector<Term> terms_;
};

std::string rational_to_string(const Rational& q);
/// Parses "p", "p/q", or a finite decimal literal exactly.
Rational parse_rational(std::string_view text);

}  // namespace lapfol
