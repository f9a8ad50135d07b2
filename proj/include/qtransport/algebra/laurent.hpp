#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "qtransport/algebra/rational_function.hpp"

namespace qtransport::algebra {

/// Truncated Laurent expansion in one symbol.  Keys are exponents of the
/// symbol; coefficients are rational functions of the remaining symbols.
/// Every exponent inside the window [low, high] is exact; terms outside it
/// were not computed.
struct LaurentExpansion {
  Symbol symbol;
  int low = 0;
  int high = 0;
  std::map<int, RationalFunction> coefficients;

  RationalFunction coefficient(int power) const {
    auto it = coefficients.find(power);
    return it == coefficients.end() ? RationalFunction() : it->second;
  }
};

namespace detail {

inline std::vector<RationalFunction> poly_coefficients(const Polynomial& p, Symbol s) {
  std::vector<RationalFunction> out(static_cast<std::size_t>(std::max(p.degree(s), 0)) + 1);
  for (const auto& [k, c] : p.coefficients_in(s)) out[k] = RationalFunction(c);
  return out;
}

/// Power series quotient a(x)/b(x) through x^count-1, b[0] != 0.
inline std::vector<RationalFunction> series_divide(const std::vector<RationalFunction>& a,
                                                   const std::vector<RationalFunction>& b, std::size_t count) {
  const RationalFunction inv = b.at(0).reciprocal();
  std::vector<RationalFunction> c(count);
  for (std::size_t j = 0; j < count; ++j) {
    RationalFunction acc = j < a.size() ? a[j] : RationalFunction();
    for (std::size_t i = 1; i <= j && i < b.size(); ++i)
      if (!b[i].is_zero() && !c[j - i].is_zero()) acc -= b[i] * c[j - i];
    c[j] = acc * inv;
  }
  return c;
}

}  // namespace detail

/// Expansion of f in powers of s around s = infinity, keeping exponents
/// from the leading one down to `lowest_power`.
inline LaurentExpansion expand_at_infinity(const RationalFunction& f, Symbol s, int lowest_power) {
  LaurentExpansion out{s, lowest_power, lowest_power, {}};
  if (f.is_zero()) return out;
  const Polynomial& p = f.numerator();
  const Polynomial& q = f.denominator();
  const int dp = std::max(p.degree(s), 0);
  const int dq = std::max(q.degree(s), 0);
  const int lead = dp - dq;
  out.high = lead;
  if (lead < lowest_power) {
    out.high = lowest_power;
    return out;
  }
  // Reverse coefficient order: P(s) = s^dp * sum_j P_{dp-j} x^j with x = 1/s.
  auto pc = detail::poly_coefficients(p, s);
  auto qc = detail::poly_coefficients(q, s);
  std::vector<RationalFunction> a(pc.rbegin(), pc.rend());
  std::vector<RationalFunction> b(qc.rbegin(), qc.rend());
  a.resize(static_cast<std::size_t>(dp) + 1);
  b.resize(static_cast<std::size_t>(dq) + 1);
  auto c = detail::series_divide(a, b, static_cast<std::size_t>(lead - lowest_power) + 1);
  for (std::size_t j = 0; j < c.size(); ++j)
    if (!c[j].is_zero()) out.coefficients.emplace(lead - static_cast<int>(j), std::move(c[j]));
  return out;
}

/// Expansion of f in powers of s around s = 0 through s^highest_power.
inline LaurentExpansion expand_at_zero(const RationalFunction& f, Symbol s, int highest_power) {
  LaurentExpansion out{s, highest_power, highest_power, {}};
  if (f.is_zero()) return out;
  const Polynomial& p = f.numerator();
  const Polynomial& q = f.denominator();
  const int vp = p.low_degree(s);
  const int vq = q.low_degree(s);
  const int lead = vp - vq;
  out.low = lead;
  if (lead > highest_power) {
    out.low = highest_power;
    return out;
  }
  auto pc = detail::poly_coefficients(p, s);
  auto qc = detail::poly_coefficients(q, s);
  std::vector<RationalFunction> a(pc.begin() + vp, pc.end());
  std::vector<RationalFunction> b(qc.begin() + vq, qc.end());
  auto c = detail::series_divide(a, b, static_cast<std::size_t>(highest_power - lead) + 1);
  for (std::size_t j = 0; j < c.size(); ++j)
    if (!c[j].is_zero()) out.coefficients.emplace(lead + static_cast<int>(j), std::move(c[j]));
  return out;
}

/// Taylor polynomial of f in s through s^order (f must be regular at s = 0).
inline RationalFunction taylor_polynomial(const RationalFunction& f, Symbol s, int order) {
  auto e = expand_at_zero(f, s, order);
  if (!e.coefficients.empty() && e.coefficients.begin()->first < 0)
    throw std::domain_error("taylor_polynomial: function has a pole at " + std::string(symbol_name(s)) + " = 0");
  RationalFunction out;
  for (const auto& [k, c] : e.coefficients) out += c * RationalFunction(Polynomial::variable(s, static_cast<unsigned>(k)));
  return out;
}

}  // namespace qtransport::algebra
