#pragma once

#include <ostream>
#include <string>
#include <utility>

#include "qtransport/algebra/polynomial.hpp"

namespace qtransport::algebra {

/// Quotient of two polynomials kept in lowest terms with a monic
/// denominator, so structural equality coincides with mathematical equality.
class RationalFunction {
 public:
  RationalFunction() : num_(0), den_(1) {}
  RationalFunction(long c) : num_(c), den_(1) {}  // NOLINT(google-explicit-constructor)
  RationalFunction(const mpq_class& c) : num_(c), den_(1) {}  // NOLINT
  RationalFunction(const GaussianRational& c) : num_(c), den_(1) {}  // NOLINT
  RationalFunction(Polynomial p) : num_(std::move(p)), den_(1) {}  // NOLINT
  RationalFunction(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

  static RationalFunction variable(Symbol s) { return RationalFunction(Polynomial::variable(s)); }

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  bool is_real() const { return num_.is_real() && den_.is_real(); }
  bool depends_on(Symbol s) const { return num_.depends_on(s) || den_.depends_on(s); }
  GaussianRational constant_value() const { return num_.constant_value() / den_.constant_value(); }

  /// Degree in s of numerator minus degree of denominator (behaviour at s -> infinity).
  int degree(Symbol s) const { return num_.degree(s) - den_.degree(s); }

  RationalFunction operator-() const {
    RationalFunction r = *this;
    r.num_ = -r.num_;
    return r;
  }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_ == b.den_) return RationalFunction(a.num_ + b.num_, a.den_);
    if (a.is_polynomial() && b.is_polynomial()) return {a.num_ + b.num_, Polynomial(1)};
    return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.is_polynomial() && b.is_polynomial()) return RationalFunction(a.num_ * b.num_, Polynomial(1));
    // Cross-cancel before multiplying to keep intermediate sizes small.
    Polynomial g1 = gcd(a.num_, b.den_);
    Polynomial g2 = gcd(b.num_, a.den_);
    Polynomial n = *a.num_.divide_exact(g1) * *b.num_.divide_exact(g2);
    Polynomial d = *a.den_.divide_exact(g2) * *b.den_.divide_exact(g1);
    return RationalFunction(std::move(n), std::move(d));
  }
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.is_zero()) throw std::domain_error("RationalFunction: division by zero");
    return a * b.reciprocal();
  }
  RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
  RationalFunction& operator-=(const RationalFunction& o) { return *this = *this - o; }
  RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }
  RationalFunction& operator/=(const RationalFunction& o) { return *this = *this / o; }

  RationalFunction reciprocal() const {
    if (is_zero()) throw std::domain_error("RationalFunction: reciprocal of zero");
    return RationalFunction(den_, num_);
  }

  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  /// Substitute s by a rational function.
  RationalFunction substitute(Symbol s, const RationalFunction& value) const {
    if (!depends_on(s)) return *this;
    return substitute_poly(num_, s, value) / substitute_poly(den_, s, value);
  }
  RationalFunction substitute(Symbol s, const GaussianRational& value) const {
    if (!depends_on(s)) return *this;
    Polynomial d = den_.substitute(s, value);
    if (d.is_zero()) throw std::domain_error("RationalFunction: substitution " + std::string(symbol_name(s)) + " = " + value.to_string() + " hits a pole");
    return RationalFunction(num_.substitute(s, value), std::move(d));
  }
  RationalFunction negate_symbol(Symbol s) const {
    return RationalFunction(num_.negate_symbol(s), den_.negate_symbol(s));
  }

  RationalFunction derivative(Symbol s) const {
    return RationalFunction(num_.derivative(s) * den_ - num_ * den_.derivative(s), den_ * den_);
  }

  std::string to_string() const {
    if (den_.is_constant() && den_.constant_value().is_one()) return num_.to_string();
    auto wrap = [](const Polynomial& p) {
      std::string s = p.to_string();
      return p.size() > 1 || (p.size() == 1 && !p.leading_coefficient().is_real()) ? "(" + s + ")" : s;
    };
    return wrap(num_) + "/" + wrap(den_);
  }

 private:
  static RationalFunction substitute_poly(const Polynomial& p, Symbol s, const RationalFunction& value) {
    // Horner's rule in s.
    auto by_power = p.coefficients_in(s);
    RationalFunction r;
    int current = by_power.rbegin()->first;
    for (auto it = by_power.rbegin(); it != by_power.rend(); ++it) {
      while (current > static_cast<int>(it->first)) {
        r *= value;
        --current;
      }
      r += RationalFunction(it->second);
    }
    while (current > 0) {
      r *= value;
      --current;
    }
    return r;
  }

  void normalize() {
    if (den_.is_zero()) throw std::domain_error("RationalFunction: zero denominator");
    if (num_.is_zero()) {
      den_ = Polynomial(1);
      return;
    }
    if (!den_.is_constant()) {
      Polynomial g = gcd(num_, den_);
      if (!g.is_constant()) {
        num_ = *num_.divide_exact(g);
        den_ = *den_.divide_exact(g);
      }
    }
    GaussianRational lc = den_.leading_coefficient();
    if (!lc.is_one()) {
      GaussianRational inv = GaussianRational(1) / lc;
      num_.scale(inv);
      den_.scale(inv);
    }
  }

  Polynomial num_;
  Polynomial den_;
};

inline RationalFunction pow(const RationalFunction& base, int exponent) {
  if (exponent < 0) return pow(base.reciprocal(), -exponent);
  if (base.is_polynomial()) return RationalFunction(pow(base.numerator(), static_cast<unsigned>(exponent)) *
                                                   Polynomial(GaussianRational(1) / pow(base.denominator().constant_value(), static_cast<unsigned>(exponent))));
  return RationalFunction(pow(base.numerator(), static_cast<unsigned>(exponent)),
                          pow(base.denominator(), static_cast<unsigned>(exponent)));
}

inline RationalFunction rvar(Symbol s) { return RationalFunction::variable(s); }

inline std::ostream& operator<<(std::ostream& os, const RationalFunction& f) { return os << f.to_string(); }

}  // namespace qtransport::algebra
