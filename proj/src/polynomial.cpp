#include "lapfol/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "lapfol/errors.hpp"

namespace lapfol {

Monomial Monomial::variable(int i, int power) { return Monomial{}.with_exponent(i, power); }

int Monomial::degree() const {
  int d = 0;
  for (int i = 0; i < kMaxVars; ++i) d += exponent(i);
  return d;
}

int Monomial::degree(int offset, int len) const {
  int d = 0;
  for (int i = offset; i < offset + len; ++i) d += exponent(i);
  return d;
}

Monomial Monomial::with_exponent(int i, int e) const {
  if (i < 0 || i >= kMaxVars) throw DomainError("variable index out of range");
  if (e < 0 || e > 255) throw DomainError("exponent out of range");
  Monomial m = *this;
  m.packed_ &= ~(std::uint64_t{0xff} << shift(i));
  m.packed_ |= std::uint64_t(e) << shift(i);
  return m;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial m;
  for (int i = 0; i < kMaxVars; ++i) {
    int e = exponent(i) + o.exponent(i);
    if (e > 255) throw DomainError("exponent overflow");
    m.packed_ |= std::uint64_t(e) << shift(i);
  }
  return m;
}

Polynomial::Polynomial(int nvars) : nvars_(nvars) {
  if (nvars < 0 || nvars > kMaxVars) throw DomainError("unsupported number of variables");
}

Polynomial Polynomial::constant(int nvars, const Rational& c) {
  Polynomial p(nvars);
  p.add_term(Monomial{}, c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int i) {
  if (i < 0 || i >= nvars) throw DomainError("variable index out of range");
  Polynomial p(nvars);
  p.add_term(Monomial::variable(i), 1);
  return p;
}

Polynomial Polynomial::monomial(int nvars, const Monomial& m, const Rational& c) {
  Polynomial p(nvars);
  p.add_term(m, c);
  return p;
}

int Polynomial::degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

int Polynomial::degree(int offset, int len) const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree(offset, len));
  return d;
}

Rational Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

bool Polynomial::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.degree() == 0); }

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (nvars_ != o.nvars_) throw DomainError("polynomials over different variable sets");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (nvars_ != o.nvars_) throw DomainError("polynomials over different variable sets");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.nvars_ != b.nvars_) throw DomainError("polynomials over different variable sets");
  Polynomial out(a.nvars_);
  Rational prod;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      prod = ca * cb;
      out.add_term(ma * mb, prod);
    }
  }
  return out;
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

bool Polynomial::operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

Polynomial Polynomial::pow(int e) const {
  if (e < 0) throw DomainError("negative power");
  Polynomial result = constant(nvars_, 1);
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial out(nvars_);
  for (const auto& [m, c] : terms_) {
    int e = m.exponent(i);
    if (e == 0) continue;
    out.add_term(m.with_exponent(i, e - 1), c * e);
  }
  return out;
}

Polynomial Polynomial::block_laplacian(int offset, int len) const {
  Polynomial out(nvars_);
  for (const auto& [m, c] : terms_) {
    for (int i = offset; i < offset + len; ++i) {
      int e = m.exponent(i);
      if (e < 2) continue;
      out.add_term(m.with_exponent(i, e - 2), c * (e * (e - 1)));
    }
  }
  return out;
}

Polynomial Polynomial::block_euler(int offset, int len) const {
  Polynomial out(nvars_);
  for (const auto& [m, c] : terms_) {
    int d = m.degree(offset, len);
    if (d) out.add_term(m, c * d);
  }
  return out;
}

Polynomial Polynomial::times_block_r2(int offset, int len) const {
  Polynomial out(nvars_);
  for (const auto& [m, c] : terms_) {
    for (int i = offset; i < offset + len; ++i) out.add_term(m.with_exponent(i, m.exponent(i) + 2), c);
  }
  return out;
}

double Polynomial::evaluate(std::span<const double> x) const { return NumericPolynomial(*this)(x); }

std::string rational_to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_str();
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    Rational a = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    os << rational_to_string(a);
    for (int i = 0; i < nvars_; ++i) {
      int e = m.exponent(i);
      if (e == 0) continue;
      os << " x" << (i + 1);
      if (e > 1) os << "^" << e;
    }
    first = false;
  }
  return os.str();
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&]() { return ConfigError("bad rational literal '" + s + "'"); };
  if (s.empty()) throw bad();
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  std::string num, den = "1";
  auto slash = s.find('/', i);
  auto dot = s.find('.', i);
  if (slash != std::string::npos) {
    num = s.substr(i, slash - i);
    den = s.substr(slash + 1);
  } else if (dot != std::string::npos) {
    std::string frac = s.substr(dot + 1);
    num = s.substr(i, dot - i) + frac;
    den = "1" + std::string(frac.size(), '0');
  } else {
    num = s.substr(i);
  }
  auto digits = [](const std::string& d) { return !d.empty() && std::all_of(d.begin(), d.end(), ::isdigit); };
  if (!digits(num) || !digits(den)) throw bad();
  mpz_class d(den);
  if (d == 0) throw bad();
  Rational q(mpz_class(num), d);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int nvars) : s_(text), nvars_(nvars) {}

  Polynomial run() {
    Polynomial p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("cannot parse polynomial '" + std::string(s_) + "': " + why + " at offset " +
                      std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool starts_factor() {
    skip();
    if (pos_ >= s_.size()) return false;
    char c = s_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || std::isalpha(static_cast<unsigned char>(c)) || c == '(' ||
           c == '.';
  }

  Polynomial expr() {
    Polynomial acc(nvars_);
    bool first = true;
    for (;;) {
      skip();
      Rational sign = 1;
      if (peek('+')) {
        ++pos_;
      } else if (peek('-')) {
        ++pos_;
        sign = -1;
      } else if (!first) {
        break;
      }
      acc += term() * sign;
      first = false;
    }
    return acc;
  }

  Polynomial term() {
    Polynomial acc = factor();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        acc = acc * factor();
      } else if (starts_factor()) {
        acc = acc * factor();
      } else {
        return acc;
      }
    }
  }

  Polynomial factor() {
    Polynomial base = primary();
    if (peek('^')) {
      ++pos_;
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("missing exponent");
      base = base.pow(std::stoi(std::string(s_.substr(start, pos_ - start))));
    }
    return base;
  }

  Polynomial primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (!peek(')')) fail("missing ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '/') {
        ++pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
      return Polynomial::constant(nvars_, parse_rational(s_.substr(start, pos_ - start)));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_++;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      return Polynomial::variable(nvars_, variable_index(name));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  int variable_index(const std::string& name) {
    int idx = -1;
    char head = name[0];
    std::string tail = name.substr(1);
    if (tail.empty()) {
      switch (head) {
        case 'x': idx = 0; break;
        case 'y': idx = 1; break;
        case 'z': idx = 2; break;
        case 'w': idx = 3; break;
        case 'c': idx = 0; break;
        case 's': idx = 1; break;
        default: break;
      }
    } else {
      int k = std::stoi(tail);
      if (head == 'x') idx = k - 1;
      if (head == 'c') idx = 2 * k - 2;
      if (head == 's') idx = 2 * k - 1;
    }
    if (idx < 0 || idx >= nvars_) fail("unknown variable '" + name + "'");
    return idx;
  }

  std::string_view s_;
  int nvars_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial Polynomial::parse(std::string_view text, int nvars) { return Parser(text, nvars).run(); }

NumericPolynomial::NumericPolynomial(const Polynomial& p) : nvars_(p.nvars()) {
  terms_.reserve(p.terms().size());
  for (const auto& [m, c] : p.terms()) {
    Term t{c.get_d(), {}};
    for (int i = 0; i < kMaxVars; ++i) {
      t.exps[i] = static_cast<std::uint8_t>(m.exponent(i));
      max_exp_ = std::max(max_exp_, m.exponent(i));
    }
    terms_.push_back(t);
  }
}

double NumericPolynomial::operator()(std::span<const double> x) const {
  // powers[i][e] = x_i^e
  std::array<std::array<double, 64>, kMaxVars> powers;
  const int top = std::min(max_exp_, 63);
  for (int i = 0; i < nvars_; ++i) {
    powers[i][0] = 1.0;
    for (int e = 1; e <= top; ++e) powers[i][e] = powers[i][e - 1] * x[i];
  }
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (int i = 0; i < nvars_; ++i) {
      int e = t.exps[i];
      if (e) v *= e <= top ? powers[i][e] : std::pow(x[i], e);
    }
    sum += v;
  }
  return sum;
}

}  // namespace lapfol
