#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtransport/errors.hpp"
#include "qtransport/semiclassical/expand.hpp"
#include "qtransport/symfun/characters.hpp"
#include "qtransport/symfun/schur.hpp"

namespace qtransport::conjectures {

using algebra::RationalFunction;
using algebra::Symbol;
using semiclassical::MSeries;
using symfun::Partition;

enum class ConjectureId { SelfConjugate, ReciprocitySigned, ReciprocityBarrierInverse };
enum class Verdict { Consistent, Violated, Inconclusive };

inline std::string to_string(ConjectureId id) {
  switch (id) {
    case ConjectureId::SelfConjugate: return "self-conjugate-independence";
    case ConjectureId::ReciprocitySigned: return "reciprocity-signed";
    case ConjectureId::ReciprocityBarrierInverse: return "reciprocity-barrier-inverse";
  }
  return "";
}
inline ConjectureId conjecture_from_string(const std::string& s) {
  for (auto id : {ConjectureId::SelfConjugate, ConjectureId::ReciprocitySigned, ConjectureId::ReciprocityBarrierInverse})
    if (to_string(id) == s) return id;
  throw ConfigError("id", "unknown conjecture '" + s + "'");
}
inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Violated: return "violated";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "";
}

/// Coefficients of M^m_power on the two sides of a relation.
struct Witness {
  int m_power = 0;
  RationalFunction lhs;
  RationalFunction rhs;
};

struct ConjectureReport {
  ConjectureId id = ConjectureId::SelfConjugate;
  Partition lambda;
  int order = 0;
  std::optional<int> r_order;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<int> violated_at;
  /// Powers of M compared, highest first.
  std::vector<Witness> compared;
  std::optional<Witness> mismatch;
};

/// A fake term added to the Schur-moment series, for negative controls.
struct Injection {
  int m_power = 0;
  RationalFunction term;
};

struct ConjectureOptions {
  int order = 2;
  std::optional<int> r_order;
  semiclassical::ExpandOptions expand;
  std::optional<Injection> inject;
};

/// <s_lambda(Q)>(R) / (M tauD)^n as a series in 1/M through M^{-K}, from
/// the barrier time-delay model and the character expansion
/// s_lambda = sum_mu chi^lambda(mu) / z_mu p_mu.
inline MSeries schur_delay_series(const Partition& lambda, int k, const semiclassical::ExpandOptions& opt = {}) {
  if (lambda.empty()) throw ConfigError("lambda", "must be nonempty");
  const int n = lambda.weight();
  MSeries out(-k, 0);
  const RationalFunction one_minus_r = RationalFunction(1) - algebra::rvar(Symbol::R);
  const RationalFunction scale = semiclassical::detail::power(one_minus_r, n);
  auto plain = opt;
  plain.r_order.reset();
  for (const auto& mu : symfun::partitions_of(n)) {
    const long long chi = symfun::character(lambda, mu);
    if (chi == 0) continue;
    const int k_mu = k + mu.length() - n;
    if (k_mu < 0) continue;
    const MSeries s = semiclassical::expand(semiclassical::model_time_delay(mu, true), k_mu, plain);
    const RationalFunction w = scale * RationalFunction(mpq_class(mpz_class(static_cast<long>(chi)), symfun::z_mu(mu)));
    for (const auto& [p, c] : s.coefficients()) out.add_term(p, c * w);
  }
  return opt.r_order ? out.truncate_r(*opt.r_order) : out;
}

namespace detail {

inline MSeries series_for(const Partition& lambda, const ConjectureOptions& o, bool inject) {
  MSeries s = schur_delay_series(lambda, o.order, o.expand);
  if (inject && o.inject) s.add_term(o.inject->m_power, o.inject->term);
  return s;
}

inline RationalFunction truncate(const RationalFunction& c, const ConjectureOptions& o) {
  return o.r_order ? algebra::taylor_polynomial(c, Symbol::R, *o.r_order) : c;
}

inline ConjectureReport compare(ConjectureReport rep, const MSeries& lhs, const MSeries& rhs, const ConjectureOptions& o) {
  const int lo = std::max(lhs.lowest(), rhs.lowest()), hi = std::min(lhs.highest(), rhs.highest());
  if (lo > hi) {
    rep.verdict = Verdict::Inconclusive;
    return rep;
  }
  rep.verdict = Verdict::Consistent;
  for (int p = hi; p >= lo; --p) {
    Witness w{p, truncate(lhs.coefficient(p), o), truncate(rhs.coefficient(p), o)};
    rep.compared.push_back(w);
    if (!(w.lhs == w.rhs) && rep.verdict == Verdict::Consistent) {
      rep.verdict = Verdict::Violated;
      rep.violated_at = p;
      rep.mismatch = w;
    }
  }
  return rep;
}

inline ConjectureReport base_report(ConjectureId id, const Partition& lambda, const ConjectureOptions& o) {
  ConjectureReport r;
  r.id = id;
  r.lambda = lambda;
  r.order = o.order;
  r.r_order = o.r_order;
  return r;
}

}  // namespace detail

/// Self-conjugate partitions: every coefficient equals its value at R = 0.
inline ConjectureReport test_self_conjugate(const Partition& lambda, const ConjectureOptions& o = {}) {
  if (!lambda.is_self_conjugate()) throw ConfigError("lambda", lambda.to_string() + " is not self-conjugate");
  const MSeries f = detail::series_for(lambda, o, true);
  const MSeries at_zero = f.substitute(Symbol::R, RationalFunction(0));
  return detail::compare(detail::base_report(ConjectureId::SelfConjugate, lambda, o), f, at_zero, o);
}

/// <s_lambda'>(R, -M) = (-1)^|lambda| <s_lambda>(R, M).  After dividing by
/// (M tauD)^n this reads f_lambda'(-M) = f_lambda(M).
inline ConjectureReport test_reciprocity_signed(const Partition& lambda, const ConjectureOptions& o = {}) {
  const MSeries lhs = detail::series_for(lambda.conjugate(), o, lambda.conjugate() == lambda).negate_m();
  const MSeries rhs = detail::series_for(lambda, o, true);
  return detail::compare(detail::base_report(ConjectureId::ReciprocitySigned, lambda, o), lhs, rhs, o);
}

/// [M]^lambda <s_lambda'>(1/R, M) = [M]_lambda <s_lambda>(R, M), compared
/// over the powers of M where both products are complete.
inline ConjectureReport test_reciprocity_barrier_inverse(const Partition& lambda, const ConjectureOptions& o = {}) {
  const algebra::Polynomial m = algebra::var(Symbol::M);
  const RationalFunction inv_r = algebra::rvar(Symbol::R).reciprocal();
  const MSeries lhs = detail::series_for(lambda.conjugate(), o, lambda.conjugate() == lambda)
                          .substitute(Symbol::R, inv_r)
                          .times_polynomial_in_m(symfun::raising_factorial_gen(lambda, m));
  const MSeries rhs =
      detail::series_for(lambda, o, true).times_polynomial_in_m(symfun::falling_factorial_gen(lambda, m));
  // Coefficients at 1/R are compared exactly; Taylor truncation in R would
  // not commute with the inversion.
  ConjectureOptions exact = o;
  exact.r_order.reset();
  auto rep = detail::compare(detail::base_report(ConjectureId::ReciprocityBarrierInverse, lambda, o), lhs, rhs, exact);
  return rep;
}

inline ConjectureReport run_conjecture(ConjectureId id, const Partition& lambda, const ConjectureOptions& o = {}) {
  switch (id) {
    case ConjectureId::SelfConjugate: return test_self_conjugate(lambda, o);
    case ConjectureId::ReciprocitySigned: return test_reciprocity_signed(lambda, o);
    case ConjectureId::ReciprocityBarrierInverse: return test_reciprocity_barrier_inverse(lambda, o);
  }
  throw std::logic_error("run_conjecture: unknown id");
}

inline void to_json(nlohmann::json& j, const Witness& w) {
  j = {{"m_power", w.m_power}, {"lhs", w.lhs.to_string()}, {"rhs", w.rhs.to_string()}};
}

inline void to_json(nlohmann::json& j, const ConjectureReport& r) {
  j = {{"id", to_string(r.id)},
       {"lambda", r.lambda},
       {"order", r.order},
       {"r_order", r.r_order ? nlohmann::json(*r.r_order) : nlohmann::json(nullptr)},
       {"verdict", to_string(r.verdict)},
       {"violated_at", r.violated_at ? nlohmann::json(*r.violated_at) : nlohmann::json(nullptr)},
       {"compared", r.compared},
       {"mismatch", r.mismatch ? nlohmann::json(*r.mismatch) : nlohmann::json(nullptr)}};
}

}  // namespace qtransport::conjectures
