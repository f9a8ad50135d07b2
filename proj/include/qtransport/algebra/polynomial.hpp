#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qtransport/algebra/gaussian_rational.hpp"

namespace qtransport::algebra {

/// Formal symbols that can appear in exact results.  The enumeration order
/// is also the lexicographic variable order (M is the most significant).
enum class Symbol : std::uint8_t { M, N1, N2, TauD, R, Eps, N };

inline constexpr std::size_t kSymbolCount = 7;
inline constexpr std::array<Symbol, kSymbolCount> kAllSymbols = {
    Symbol::M, Symbol::N1, Symbol::N2, Symbol::TauD, Symbol::R, Symbol::Eps, Symbol::N};

inline constexpr std::string_view symbol_name(Symbol s) {
  constexpr std::array<std::string_view, kSymbolCount> names = {"M", "N1", "N2", "tauD", "R", "eps", "N"};
  return names[static_cast<std::size_t>(s)];
}

inline std::optional<Symbol> symbol_from_name(std::string_view name) {
  for (Symbol s : kAllSymbols)
    if (symbol_name(s) == name) return s;
  if (name == "tau_D" || name == "tau_d" || name == "taud") return Symbol::TauD;
  if (name == "epsilon") return Symbol::Eps;
  return std::nullopt;
}

using Exponents = std::array<std::uint16_t, kSymbolCount>;

inline constexpr std::size_t idx(Symbol s) { return static_cast<std::size_t>(s); }

/// Sparse multivariate polynomial over the Gaussian rationals.
///
/// Terms are kept in a map ordered by descending lexicographic exponent
/// vectors, so iteration order (and therefore printing) is canonical and the
/// first term is the leading term.
class Polynomial {
 public:
  using TermMap = std::map<Exponents, GaussianRational, std::greater<>>;

  Polynomial() = default;
  Polynomial(long c) { add_term({}, GaussianRational(c)); }  // NOLINT(google-explicit-constructor)
  Polynomial(const mpq_class& c) { add_term({}, GaussianRational(c)); }  // NOLINT
  Polynomial(const GaussianRational& c) { add_term({}, c); }  // NOLINT

  static Polynomial variable(Symbol s, unsigned power = 1) {
    Polynomial p;
    Exponents e{};
    e[idx(s)] = static_cast<std::uint16_t>(power);
    p.add_term(e, GaussianRational(1));
    return p;
  }
  static Polynomial monomial(const Exponents& e, const GaussianRational& c) {
    Polynomial p;
    p.add_term(e, c);
    return p;
  }

  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exponents{}); }
  bool is_real() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.is_real(); });
  }

  GaussianRational constant_value() const {
    if (!is_constant()) throw std::logic_error("Polynomial::constant_value on non-constant polynomial");
    return terms_.empty() ? GaussianRational(0) : terms_.begin()->second;
  }
  /// Coefficient of the monomial with all exponents zero.
  GaussianRational constant_term() const {
    auto it = terms_.find(Exponents{});
    return it == terms_.end() ? GaussianRational(0) : it->second;
  }

  const Exponents& leading_exponents() const { return terms_.begin()->first; }
  const GaussianRational& leading_coefficient() const { return terms_.begin()->second; }

  int degree(Symbol s) const {
    if (terms_.empty()) return -1;
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max<int>(d, e[idx(s)]);
    return d;
  }
  /// Smallest exponent of `s` among the terms (-1 for the zero polynomial).
  int low_degree(Symbol s) const {
    if (terms_.empty()) return -1;
    int d = 1 << 20;
    for (const auto& [e, c] : terms_) d = std::min<int>(d, e[idx(s)]);
    return d;
  }
  bool depends_on(Symbol s) const { return degree(s) > 0; }

  void add_term(const Exponents& e, const GaussianRational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Polynomial operator-() const {
    Polynomial r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
  }
  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e;
        for (std::size_t k = 0; k < kSymbolCount; ++k) e[k] = static_cast<std::uint16_t>(ea[k] + eb[k]);
        r.add_term(e, ca * cb);
      }
    return r;
  }
  Polynomial& scale(const GaussianRational& c) {
    if (c.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, v] : terms_) v *= c;
    return *this;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  /// Coefficient of s^k, as a polynomial in the remaining symbols.
  Polynomial coefficient(Symbol s, unsigned k) const {
    Polynomial r;
    for (const auto& [e, c] : terms_)
      if (e[idx(s)] == k) {
        Exponents f = e;
        f[idx(s)] = 0;
        r.add_term(f, c);
      }
    return r;
  }
  std::map<unsigned, Polynomial> coefficients_in(Symbol s) const {
    std::map<unsigned, Polynomial> out;
    for (const auto& [e, c] : terms_) {
      Exponents f = e;
      f[idx(s)] = 0;
      out[e[idx(s)]].add_term(f, c);
    }
    return out;
  }

  /// Multiply by s^k.
  Polynomial shifted(Symbol s, unsigned k) const {
    Polynomial r;
    for (const auto& [e, c] : terms_) {
      Exponents f = e;
      f[idx(s)] = static_cast<std::uint16_t>(f[idx(s)] + k);
      r.terms_.emplace(f, c);
    }
    return r;
  }

  Polynomial substitute(Symbol s, const Polynomial& value) const {
    auto by_power = coefficients_in(s);
    Polynomial r;
    Polynomial power(1);
    unsigned current = 0;
    for (const auto& [k, coeff] : by_power) {
      while (current < k) {
        power *= value;
        ++current;
      }
      r += coeff * power;
    }
    return r;
  }
  Polynomial substitute(Symbol s, const GaussianRational& value) const { return substitute(s, Polynomial(value)); }

  /// Replace s by -s.
  Polynomial negate_symbol(Symbol s) const {
    Polynomial r = *this;
    for (auto& [e, c] : r.terms_)
      if (e[idx(s)] % 2 == 1) c = -c;
    return r;
  }

  Polynomial derivative(Symbol s) const {
    Polynomial r;
    for (const auto& [e, c] : terms_) {
      if (e[idx(s)] == 0) continue;
      Exponents f = e;
      --f[idx(s)];
      r.add_term(f, c * GaussianRational(static_cast<long>(e[idx(s)])));
    }
    return r;
  }

  /// Groups terms by their exponents in the symbols not marked in `keep`;
  /// each group is a polynomial in the kept symbols only.
  std::map<Exponents, Polynomial> split(const std::array<bool, kSymbolCount>& keep) const {
    std::map<Exponents, Polynomial> out;
    for (const auto& [e, c] : terms_) {
      Exponents outer{}, inner{};
      for (std::size_t k = 0; k < kSymbolCount; ++k) (keep[k] ? inner : outer)[k] = e[k];
      out[outer].add_term(inner, c);
    }
    return out;
  }

  /// Exact quotient a / b if b divides a, otherwise nullopt.
  std::optional<Polynomial> divide_exact(const Polynomial& divisor) const {
    if (divisor.is_zero()) throw std::domain_error("Polynomial: division by zero polynomial");
    if (divisor.is_constant()) {
      Polynomial q = *this;
      q.scale(GaussianRational(1) / divisor.constant_value());
      return q;
    }
    Polynomial quotient;
    Polynomial rest = *this;
    const Exponents& lead = divisor.leading_exponents();
    const GaussianRational& lead_c = divisor.leading_coefficient();
    while (!rest.is_zero()) {
      const Exponents& e = rest.leading_exponents();
      Exponents q{};
      for (std::size_t k = 0; k < kSymbolCount; ++k) {
        if (e[k] < lead[k]) return std::nullopt;
        q[k] = static_cast<std::uint16_t>(e[k] - lead[k]);
      }
      Polynomial t = monomial(q, rest.leading_coefficient() / lead_c);
      rest -= t * divisor;
      quotient += t;
    }
    return quotient;
  }

  /// Divide so that the leading coefficient becomes 1.
  Polynomial monic() const {
    if (is_zero()) return *this;
    Polynomial r = *this;
    r.scale(GaussianRational(1) / leading_coefficient());
    return r;
  }

  std::complex<double> evaluate_numeric(const std::array<std::complex<double>, kSymbolCount>& values) const {
    std::complex<double> total = 0;
    for (const auto& [e, c] : terms_) {
      std::complex<double> t = c.to_complex();
      for (std::size_t k = 0; k < kSymbolCount; ++k)
        for (unsigned j = 0; j < e[k]; ++j) t *= values[k];
      total += t;
    }
    return total;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      std::string mono;
      for (Symbol s : kAllSymbols) {
        auto p = e[idx(s)];
        if (p == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += symbol_name(s);
        if (p > 1) mono += "^" + std::to_string(p);
      }
      std::string coeff;
      bool negative = false;
      if (c.is_real()) {
        mpq_class v = c.re();
        if (sgn(v) < 0) {
          negative = true;
          v = -v;
        }
        coeff = (v == 1 && !mono.empty()) ? "" : v.get_str();
      } else if (sgn(c.re()) == 0) {
        mpq_class v = c.im();
        if (sgn(v) < 0) {
          negative = true;
          v = -v;
        }
        coeff = (v == 1 ? std::string("I") : v.get_str() + "*I");
      } else {
        coeff = c.to_string();
      }
      std::string term = coeff;
      if (!mono.empty()) term += (coeff.empty() ? "" : "*") + mono;
      if (first)
        out = negative ? "-" + term : term;
      else
        out += (negative ? " - " : " + ") + term;
      first = false;
    }
    return out;
  }

 private:
  TermMap terms_;
};

inline Polynomial pow(const Polynomial& base, unsigned exponent) {
  Polynomial result(1);
  Polynomial b = base;
  while (exponent != 0) {
    if (exponent & 1U) result *= b;
    exponent >>= 1U;
    if (exponent != 0) b *= b;
  }
  return result;
}

inline Polynomial var(Symbol s) { return Polynomial::variable(s); }

namespace detail {

inline std::optional<Symbol> first_symbol(const Polynomial& a, const Polynomial& b) {
  for (Symbol s : kAllSymbols)
    if (a.depends_on(s) || b.depends_on(s)) return s;
  return std::nullopt;
}

/// Pseudo-remainder of a by b with respect to s.
inline Polynomial pseudo_remainder(Polynomial a, const Polynomial& b, Symbol s) {
  const int db = b.degree(s);
  const Polynomial lb = b.coefficient(s, static_cast<unsigned>(db));
  int da = a.degree(s);
  while (!a.is_zero() && da >= db) {
    Polynomial la = a.coefficient(s, static_cast<unsigned>(da));
    a = lb * a - (la * b).shifted(s, static_cast<unsigned>(da - db));
    da = a.degree(s);
  }
  return a;
}

/// Arithmetic modulo a fixed prime p = 1 (mod 4), so that the Gaussian
/// rationals reduce into GF(p) through a square root of -1.
namespace modp {

using u64 = std::uint64_t;

inline u64 mul(u64 a, u64 b, u64 p) { return static_cast<u64>(static_cast<unsigned __int128>(a) * b % p); }

inline u64 power(u64 a, u64 e, u64 p) {
  u64 r = 1;
  for (a %= p; e; e >>= 1U) {
    if (e & 1U) r = mul(r, a, p);
    a = mul(a, a, p);
  }
  return r;
}

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL})
    if (n % q == 0) return n == q;
  u64 d = n - 1;
  int r = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++r;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = power(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int k = 1; k < r && composite; ++k) {
      x = mul(x, x, n);
      if (x == n - 1) composite = false;
    }
    if (composite) return false;
  }
  return true;
}

struct Field {
  u64 p;
  u64 sqrt_minus_one;
};

inline const Field& field() {
  static const Field f = [] {
    u64 p = (1ULL << 61) + 1;
    while (!is_prime(p)) p += 4;
    u64 g = 2;
    while (power(g, (p - 1) / 2, p) != p - 1) ++g;
    return Field{p, power(g, (p - 1) / 4, p)};
  }();
  return f;
}

inline std::optional<u64> reduce(const mpq_class& q) {
  const u64 p = field().p;
  const u64 den = mpz_fdiv_ui(q.get_den_mpz_t(), p);
  if (den == 0) return std::nullopt;
  return mul(mpz_fdiv_ui(q.get_num_mpz_t(), p), power(den, p - 2, p), p);
}

inline std::optional<u64> reduce(const GaussianRational& c) {
  auto re = reduce(c.re());
  auto im = reduce(c.im());
  if (!re || !im) return std::nullopt;
  const Field& f = field();
  return (*re + mul(*im, f.sqrt_minus_one, f.p)) % f.p;
}

/// Image of p in GF(p)[v] after fixing every other symbol to `point`.
inline std::optional<std::vector<u64>> univariate_image(const Polynomial& poly, Symbol v, const std::array<u64, kSymbolCount>& point) {
  const u64 p = field().p;
  std::vector<u64> out(static_cast<std::size_t>(poly.degree(v)) + 1, 0);
  for (const auto& [e, c] : poly.terms()) {
    auto t = reduce(c);
    if (!t) return std::nullopt;
    u64 term = *t;
    for (std::size_t k = 0; k < kSymbolCount; ++k)
      if (k != idx(v) && e[k] != 0) term = mul(term, power(point[k], e[k], p), p);
    u64& slot = out[e[idx(v)]];
    slot = (slot + term) % p;
  }
  return out;
}

inline void trim(std::vector<u64>& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

/// Degree of the gcd of two univariate polynomials over GF(p).
inline int gcd_degree(std::vector<u64> a, std::vector<u64> b) {
  const u64 p = field().p;
  trim(a);
  trim(b);
  while (!b.empty()) {
    if (a.size() < b.size()) std::swap(a, b);
    const u64 inv = power(b.back(), p - 2, p);
    while (a.size() >= b.size() && !a.empty()) {
      const u64 f = mul(a.back(), inv, p);
      const std::size_t shift = a.size() - b.size();
      for (std::size_t k = 0; k < b.size(); ++k) a[k + shift] = (a[k + shift] + p - mul(f, b[k], p)) % p;
      trim(a);
    }
    std::swap(a, b);
  }
  return static_cast<int>(a.size()) - 1;
}

/// True only when a and b are certainly coprime: for each shared symbol v the
/// gcd of their images in GF(p)[v] has degree 0, and a true common factor of
/// positive degree in v would survive into that image.
inline bool provably_coprime(const Polynomial& a, const Polynomial& b) {
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  auto next = [&] {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
    return (z ^ (z >> 31U)) % field().p;
  };
  for (Symbol v : kAllSymbols) {
    if (!a.depends_on(v) || !b.depends_on(v)) continue;
    bool settled = false;
    for (int attempt = 0; attempt < 3 && !settled; ++attempt) {
      std::array<u64, kSymbolCount> point{};
      for (auto& x : point) x = next();
      auto ia = univariate_image(a, v, point);
      auto ib = univariate_image(b, v, point);
      if (!ia || !ib) return false;
      if (ia->back() == 0 || ib->back() == 0) continue;
      if (gcd_degree(std::move(*ia), std::move(*ib)) != 0) return false;
      settled = true;
    }
    if (!settled) return false;
  }
  return true;
}

}  // namespace modp

}  // namespace detail

Polynomial gcd(const Polynomial& a, const Polynomial& b);

/// gcd of the coefficients of p viewed as a polynomial in s.
inline Polynomial content(const Polynomial& p, Symbol s) {
  Polynomial g;
  for (const auto& [k, c] : p.coefficients_in(s)) {
    g = gcd(g, c);
    if (g.is_constant()) return Polynomial(1);
  }
  return g;
}

inline Polynomial primitive_part(const Polynomial& p, Symbol s) {
  if (p.is_zero()) return p;
  return *p.divide_exact(content(p, s));
}

/// Monic greatest common divisor over Q(i)[M, N1, ...], by recursive
/// primitive polynomial remainder sequences.
inline Polynomial gcd(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Polynomial(1);
  if (a == b) return a.monic();
  if (a.divide_exact(b).has_value()) return b.monic();
  if (b.divide_exact(a).has_value()) return a.monic();
  if (detail::modp::provably_coprime(a, b)) return Polynomial(1);

  // When one side involves only a subset of the other's symbols, the gcd lives
  // in that subset and divides every coefficient slice of the larger side.
  auto symbols_of = [](const Polynomial& p) {
    std::array<bool, kSymbolCount> used{};
    for (Symbol s : kAllSymbols) used[idx(s)] = p.depends_on(s);
    return used;
  };
  const auto va = symbols_of(a), vb = symbols_of(b);
  auto subset = [](const std::array<bool, kSymbolCount>& x, const std::array<bool, kSymbolCount>& y) {
    for (std::size_t k = 0; k < kSymbolCount; ++k)
      if (x[k] && !y[k]) return false;
    return true;
  };
  if (va != vb && (subset(vb, va) || subset(va, vb))) {
    const bool b_small = subset(vb, va);
    const Polynomial& small = b_small ? b : a;
    const Polynomial& large = b_small ? a : b;
    const auto& keep = b_small ? vb : va;
    Polynomial g = small.monic();
    for (const auto& [outer, slice] : large.split(keep)) {
      g = gcd(g, slice);
      if (g.is_constant()) return Polynomial(1);
    }
    return g;
  }

  const Symbol s = *detail::first_symbol(a, b);
  if (!a.depends_on(s)) return gcd(a, content(b, s));
  if (!b.depends_on(s)) return gcd(content(a, s), b);

  const Polynomial ca = content(a, s);
  const Polynomial cb = content(b, s);
  const Polynomial g = gcd(ca, cb);
  Polynomial pa = *a.divide_exact(ca);
  Polynomial pb = *b.divide_exact(cb);
  if (pa.degree(s) < pb.degree(s)) std::swap(pa, pb);
  while (!pb.is_zero()) {
    if (pb.degree(s) == 0) {
      pa = Polynomial(1);
      break;
    }
    Polynomial r = detail::pseudo_remainder(pa, pb, s);
    pa = std::move(pb);
    pb = r.is_zero() ? r : primitive_part(r, s);
  }
  return (g * primitive_part(pa, s)).monic();
}

inline std::ostream& operator<<(std::ostream& os, const Polynomial& p) { return os << p.to_string(); }

}  // namespace qtransport::algebra
