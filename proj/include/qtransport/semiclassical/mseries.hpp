#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "qtransport/algebra/laurent.hpp"
#include "qtransport/algebra/parse.hpp"
#include "qtransport/algebra/rational_function.hpp"

namespace qtransport::semiclassical {

using algebra::GaussianRational;
using algebra::Polynomial;
using algebra::RationalFunction;
using algebra::Symbol;

/// Truncated Laurent series in M with a window of kept powers
/// [lowest, highest].  Coefficients are exact rational functions of the
/// remaining symbols and never depend on M.
class MSeries {
 public:
  MSeries() = default;
  MSeries(int lowest, int highest) : lowest_(lowest), highest_(highest) {
    if (lowest > highest) throw std::invalid_argument("MSeries: empty window");
  }

  int lowest() const { return lowest_; }
  int highest() const { return highest_; }
  /// Number of orders kept beyond the leading power.
  int order() const { return highest_ - lowest_; }
  bool in_window(int p) const { return p >= lowest_ && p <= highest_; }

  const std::map<int, RationalFunction>& coefficients() const { return coeffs_; }
  RationalFunction coefficient(int p) const {
    auto it = coeffs_.find(p);
    return it == coeffs_.end() ? RationalFunction() : it->second;
  }

  /// Adds c * M^p; terms outside the window are dropped.
  void add_term(int p, const RationalFunction& c) {
    if (!in_window(p) || c.is_zero()) return;
    if (c.depends_on(Symbol::M)) throw std::invalid_argument("MSeries: coefficient depends on M");
    auto [it, fresh] = coeffs_.try_emplace(p, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) coeffs_.erase(it);
    }
  }

  MSeries& operator+=(const MSeries& o) {
    check_window(o);
    for (const auto& [p, c] : o.coeffs_) add_term(p, c);
    return *this;
  }
  friend MSeries operator+(MSeries a, const MSeries& b) { return a += b; }
  friend MSeries operator-(MSeries a, const MSeries& b) { return a += b * RationalFunction(-1); }
  friend MSeries operator*(const MSeries& a, const RationalFunction& s) {
    if (s.depends_on(Symbol::M)) throw std::invalid_argument("MSeries: scalar depends on M");
    MSeries r(a.lowest_, a.highest_);
    for (const auto& [p, c] : a.coeffs_) r.add_term(p, c * s);
    return r;
  }

  /// Multiplies by M^k, shifting the window.
  MSeries shifted(int k) const {
    MSeries r(lowest_ + k, highest_ + k);
    for (const auto& [p, c] : coeffs_) r.coeffs_.emplace(p + k, c);
    return r;
  }

  /// Product of two truncated series; the window is the range where both
  /// factors contribute completely.
  friend MSeries operator*(const MSeries& a, const MSeries& b) {
    const int hi = a.highest_ + b.highest_;
    const int lo = std::max(a.lowest_ + b.highest_, b.lowest_ + a.highest_);
    MSeries r(lo, hi);
    for (const auto& [p, c] : a.coeffs_)
      for (const auto& [q, d] : b.coeffs_) r.add_term(p + q, c * d);
    return r;
  }

  /// Multiplies by a polynomial in M whose coefficients are free of M.
  MSeries times_polynomial_in_m(const Polynomial& poly) const {
    const int deg = std::max(poly.degree(Symbol::M), 0);
    MSeries r(lowest_ + deg, highest_ + deg);
    for (const auto& [k, c] : poly.coefficients_in(Symbol::M))
      for (const auto& [p, d] : coeffs_) r.add_term(p + static_cast<int>(k), d * RationalFunction(c));
    return r;
  }

  template <class F>
  MSeries map_coefficients(F&& f) const {
    MSeries r(lowest_, highest_);
    for (const auto& [p, c] : coeffs_) r.add_term(p, f(c));
    return r;
  }
  MSeries substitute(Symbol s, const RationalFunction& v) const {
    return map_coefficients([&](const RationalFunction& c) { return c.substitute(s, v); });
  }
  /// M -> -M applied term by term.
  MSeries negate_m() const {
    MSeries r(lowest_, highest_);
    for (const auto& [p, c] : coeffs_) r.add_term(p, p % 2 == 0 ? c : -c);
    return r;
  }
  /// Taylor truncation of every coefficient in R through R^order.
  MSeries truncate_r(int order) const {
    return map_coefficients([&](const RationalFunction& c) { return algebra::taylor_polynomial(c, Symbol::R, order); });
  }
  MSeries restricted(int lowest, int highest) const {
    MSeries r(std::max(lowest, lowest_), std::min(highest, highest_));
    for (const auto& [p, c] : coeffs_) r.add_term(p, c);
    return r;
  }

  bool is_real() const {
    for (const auto& [p, c] : coeffs_)
      if (!c.is_real()) return false;
    return true;
  }

  /// The truncated sum as a rational function of M.
  RationalFunction to_rational_function() const {
    RationalFunction r;
    const RationalFunction m = algebra::rvar(Symbol::M);
    for (const auto& [p, c] : coeffs_) {
      RationalFunction mp(1);
      for (int k = 0; k < std::abs(p); ++k) mp *= m;
      r += c * (p >= 0 ? mp : mp.reciprocal());
    }
    return r;
  }

  /// Expansion of f at M = infinity over the given window.
  static MSeries from_rational_function(const RationalFunction& f, int lowest, int highest) {
    MSeries r(lowest, highest);
    auto e = algebra::expand_at_infinity(f, Symbol::M, lowest);
    for (const auto& [p, c] : e.coefficients) {
      if (p > highest) throw std::domain_error("MSeries: function has terms above M^" + std::to_string(highest));
      r.add_term(p, c);
    }
    return r;
  }

  friend bool operator==(const MSeries& a, const MSeries& b) {
    return a.lowest_ == b.lowest_ && a.highest_ == b.highest_ && a.coeffs_ == b.coeffs_;
  }

  std::string to_string() const {
    if (coeffs_.empty()) return "0 + O(M^" + std::to_string(lowest_ - 1) + ")";
    std::string s;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
      if (!s.empty()) s += " + ";
      s += "(" + it->second.to_string() + ")*M^" + std::to_string(it->first);
    }
    return s + " + O(M^" + std::to_string(lowest_ - 1) + ")";
  }

 private:
  void check_window(const MSeries& o) const {
    if (o.lowest_ != lowest_ || o.highest_ != highest_) throw std::invalid_argument("MSeries: window mismatch");
  }

  int lowest_ = 0;
  int highest_ = 0;
  std::map<int, RationalFunction> coeffs_;
};

/// Serialized as {"lowest", "highest", "terms": [{"m_power", "coefficient"}]},
/// terms ordered from the highest power down.
inline void to_json(nlohmann::json& j, const MSeries& s) {
  nlohmann::json terms = nlohmann::json::array();
  for (auto it = s.coefficients().rbegin(); it != s.coefficients().rend(); ++it)
    terms.push_back({{"m_power", it->first}, {"coefficient", it->second.to_string()}});
  j = {{"lowest", s.lowest()}, {"highest", s.highest()}, {"terms", terms}};
}
inline void from_json(const nlohmann::json& j, MSeries& s) {
  s = MSeries(j.at("lowest").get<int>(), j.at("highest").get<int>());
  for (const auto& t : j.at("terms"))
    s.add_term(t.at("m_power").get<int>(), algebra::parse_rational_function(t.at("coefficient").get<std::string>()));
}

/// Coefficient-by-coefficient comparison of a series with the expansion of
/// an exact function.
struct SeriesComparison {
  bool agree = true;
  int lowest = 0;
  int highest = 0;
  std::optional<int> first_mismatch;
  RationalFunction series_coefficient;
  RationalFunction exact_coefficient;
};

inline SeriesComparison compare_series(const MSeries& series, const RationalFunction& exact) {
  if (exact.degree(Symbol::M) > 0) throw std::domain_error("compare_series: exact function has a pole at M = infinity");
  SeriesComparison out;
  out.lowest = series.lowest();
  out.highest = series.highest();
  auto e = algebra::expand_at_infinity(exact, Symbol::M, series.lowest());
  for (const auto& [p, c] : e.coefficients)
    if (p > series.highest()) {
      out.agree = false;
      out.first_mismatch = p;
      out.exact_coefficient = c;
      return out;
    }
  for (int p = series.highest(); p >= series.lowest(); --p) {
    const RationalFunction a = series.coefficient(p), b = e.coefficient(p);
    if (!(a == b)) {
      out.agree = false;
      out.first_mismatch = p;
      out.series_coefficient = a;
      out.exact_coefficient = b;
      return out;
    }
  }
  return out;
}

}  // namespace qtransport::semiclassical
