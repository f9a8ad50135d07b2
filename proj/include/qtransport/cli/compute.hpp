#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtransport/cli/config.hpp"
#include "qtransport/cli/output.hpp"
#include "qtransport/conjectures/conjectures.hpp"
#include "qtransport/ensembles/ensembles.hpp"
#include "qtransport/exact/exact_rmt.hpp"
#include "qtransport/semiclassical/expand.hpp"
#include "qtransport/symfun/characters.hpp"

namespace qtransport::cli {

using algebra::Polynomial;
using algebra::Symbol;
using semiclassical::MSeries;
using symfun::Partition;

/// The requested statistic resolved from --moment, --basis and --named.
inline ensembles::MomentBasis resolve_basis(const RunConfig& c) {
  if (c.named) {
    if (*c.named == "conductance") return ensembles::NamedStatistic::Conductance;
    if (*c.named == "conductance-variance") return ensembles::NamedStatistic::ConductanceVariance;
    if (*c.named == "shot-noise") return ensembles::NamedStatistic::ShotNoise;
    throw ConfigError("named", "must be conductance, conductance-variance or shot-noise");
  }
  const Partition p = parse_partition_field("moment", c.moment);
  if (p.empty()) throw ConfigError("moment", "must be a nonempty partition");
  if (c.basis == "schur") return ensembles::SchurBasis{p};
  return ensembles::PowerSumBasis{p};
}

/// The basis as a combination of power sums p_mu.
inline std::map<Partition, mpq_class> power_sum_expansion(const ensembles::MomentBasis& b) {
  if (const auto* s = std::get_if<ensembles::SchurBasis>(&b)) return symfun::schur_to_powersum(s->lambda);
  if (const auto* p = std::get_if<ensembles::PowerSumBasis>(&b)) return {{p->mu, mpq_class(1)}};
  if (std::get<ensembles::NamedStatistic>(b) == ensembles::NamedStatistic::Conductance) return {{Partition{1}, mpq_class(1)}};
  throw UnsupportedError("only the conductance has a semiclassical series among the named statistics");
}

inline void require_ensemble(const RunConfig& c, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (c.ensemble == a) return;
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw ConfigError("ensemble", "must be one of " + list + " for " + c.subcommand);
}

inline exact::Channels channels_of(const RunConfig& c) {
  if (!c.n1) {
    if (c.m) throw ConfigError("m", "give --n1 and --n2 for transmission; M = N1 + N2");
    return exact::Channels::symbolic();
  }
  if (c.m && *c.m != *c.n1 + *c.n2) throw ConfigError("m", "must equal n1 + n2");
  return exact::Channels::numeric(*c.n1, *c.n2);
}

inline Polynomial m_of(const RunConfig& c) { return c.m ? Polynomial(static_cast<long>(*c.m)) : algebra::var(Symbol::M); }
inline RationalFunction tau_of(const RunConfig& c) { return c.tau_d ? parse_field("tau-d", *c.tau_d) : algebra::rvar(Symbol::TauD); }
inline RationalFunction r_of(const RunConfig& c) { return c.r ? parse_field("r", *c.r) : algebra::rvar(Symbol::R); }

inline double numeric_value(const std::string& field, const RationalFunction& f) {
  if (!f.is_constant() || !f.is_real()) throw ConfigError(field, "must be a real number here, got " + f.to_string());
  return f.constant_value().to_complex().real();
}

namespace detail {

/// <s_lambda(T)>; zero when lambda has more rows than T has nonzero
/// eigenvalues.
inline RationalFunction schur_T(const Partition& lambda, const exact::Channels& ch, const RunConfig& c) {
  if (c.n1 && lambda.length() > std::min(*c.n1, *c.n2)) return RationalFunction();
  return exact::schur_moment_T(lambda, ch);
}

inline RationalFunction schur_Q(const Partition& lambda, const RunConfig& c) {
  if (c.m && lambda.length() > *c.m) return RationalFunction();
  return exact::schur_moment_Q(lambda, m_of(c), tau_of(c));
}

template <class F>
RationalFunction in_schur_basis(const ensembles::MomentBasis& b, F&& schur) {
  if (const auto* s = std::get_if<ensembles::SchurBasis>(&b)) return schur(s->lambda);
  const auto& mu = std::get<ensembles::PowerSumBasis>(b).mu;
  RationalFunction total;
  for (const auto& [lambda, chi] : symfun::powersum_to_schur(mu)) total += RationalFunction(static_cast<long>(chi)) * schur(lambda);
  return total;
}

}  // namespace detail

/// Closed-form value of the requested moment.
inline RationalFunction exact_value(const RunConfig& c) {
  require_ensemble(c, {"transmission", "time-delay"});
  const auto basis = resolve_basis(c);
  if (c.variant == "energy") throw UnsupportedError("no closed form is provided for the energy correlators");
  if (c.ensemble == "transmission") {
    if (c.variant == "barrier") throw UnsupportedError("barrier transmission moments have no closed form here");
    const auto ch = channels_of(c);
    if (const auto* n = std::get_if<ensembles::NamedStatistic>(&basis)) {
      switch (*n) {
        case ensembles::NamedStatistic::Conductance: return detail::schur_T(Partition{1}, ch, c);
        case ensembles::NamedStatistic::ConductanceVariance: return exact::conductance_variance(ch).closed_form;
        case ensembles::NamedStatistic::ShotNoise:
          return detail::in_schur_basis(ensembles::PowerSumBasis{Partition{1}}, [&](const Partition& l) { return detail::schur_T(l, ch, c); }) -
                 detail::in_schur_basis(ensembles::PowerSumBasis{Partition{2}}, [&](const Partition& l) { return detail::schur_T(l, ch, c); });
      }
    }
    return detail::in_schur_basis(basis, [&](const Partition& l) { return detail::schur_T(l, ch, c); });
  }
  if (std::holds_alternative<ensembles::NamedStatistic>(basis))
    throw ConfigError("named", "named statistics refer to transmission");
  if (c.variant == "barrier") {
    const RationalFunction mt = RationalFunction(m_of(c)) * tau_of(c);
    const Partition lambda = std::holds_alternative<ensembles::SchurBasis>(basis) ? std::get<ensembles::SchurBasis>(basis).lambda
                                                                                 : std::get<ensembles::PowerSumBasis>(basis).mu;
    if (lambda == Partition{1}) return mt;
    if (lambda == Partition{1, 1} && std::holds_alternative<ensembles::PowerSumBasis>(basis))
      return mt * mt * exact::tau_w2_barrier(c.m, r_of(c)).value;
    throw UnsupportedError("with a barrier only <Tr Q> and <(Tr Q)^2> have closed forms");
  }
  return detail::in_schur_basis(basis, [&](const Partition& l) { return detail::schur_Q(l, c); });
}

/// A semiclassical series and the factor relating it to the physical moment.
struct SeriesResult {
  MSeries series;
  RationalFunction normalization = RationalFunction(1);
};

inline semiclassical::WickModel model_for(const RunConfig& c, const Partition& mu) {
  if (c.ensemble == "transmission") {
    if (c.variant == "barrier") return semiclassical::model_barrier_transmission(mu);
    if (c.variant == "energy") return semiclassical::model_energy(mu);
    return semiclassical::model_ideal_transmission(mu);
  }
  return semiclassical::model_time_delay(mu, c.variant == "barrier");
}

inline SeriesResult semiclassical_series(const RunConfig& c) {
  require_ensemble(c, {"transmission", "time-delay"});
  semiclassical::ExpandOptions opt;
  opt.threads = c.threads;
  const auto basis = resolve_basis(c);
  const bool barrier = c.variant == "barrier";
  auto finish = [&](MSeries s) { return barrier ? s.truncate_r(c.order_r) : s; };

  if (c.ensemble == "time-delay" && c.variant == "energy") {
    const auto* p = std::get_if<ensembles::PowerSumBasis>(&basis);
    if (!p || p->mu.length() != 1) throw UnsupportedError("the energy route gives <Tr Q^n> only; use --moment \"[n]\"");
    const int n = p->mu.weight();
    return {semiclassical::time_delay_from_energy(n, c.order, opt),
            algebra::rvar(Symbol::M) * algebra::pow(algebra::rvar(Symbol::TauD), n)};
  }

  const auto terms = power_sum_expansion(basis);
  int top = std::numeric_limits<int>::min();
  for (const auto& [mu, w] : terms) top = std::max(top, model_for(c, mu).reference_power);
  MSeries out(top - c.order, top);
  RationalFunction norm(1);
  for (const auto& [mu, w] : terms) {
    const auto model = model_for(c, mu);
    norm = model.normalization;
    const int k = c.order - (top - model.reference_power);
    if (k < 0) continue;
    const MSeries s = semiclassical::expand(model, k, opt);
    for (const auto& [p, coef] : s.coefficients()) out.add_term(p, coef * RationalFunction(w));
  }
  return {finish(out), norm};
}

/// One power of M in a series comparison.
struct CompareRow {
  int m_power = 0;
  RationalFunction semiclassical;
  RationalFunction exact;
  bool agree = false;
};

struct SampledLeg {
  ensembles::SampleStats stats;
  RationalFunction exact;
  double z = 0;
  bool agree = false;
};

struct Comparison {
  SeriesResult series;
  std::vector<CompareRow> rows;
  std::optional<SampledLeg> sampled;
  int mismatches = 0;
};

inline ensembles::SampleStats sample_moment(const RunConfig& c, std::vector<double>* raw = nullptr) {
  require_ensemble(c, {"cue", "inverse-laguerre", "transmission", "time-delay"});
  if (c.variant != "ideal") throw UnsupportedError("sampling is defined for the ideal ensembles only");
  ensembles::SamplingOptions opt;
  opt.seed = c.seed;
  opt.count = static_cast<std::size_t>(c.samples);
  opt.threads = c.threads;
  opt.raw = raw;
  const auto basis = resolve_basis(c);
  if (c.ensemble == "cue" || c.ensemble == "transmission") {
    if (!c.n1) throw ConfigError("n1", "sampling needs numeric channel numbers");
    if (c.m && *c.m != *c.n1 + *c.n2) throw ConfigError("m", "must equal n1 + n2");
    return ensembles::estimate_T_moment(basis, *c.n1, *c.n2, opt);
  }
  if (!c.m) throw ConfigError("m", "sampling needs a numeric channel number");
  const double tau = c.tau_d ? numeric_value("tau-d", tau_of(c)) : 1.0;
  return ensembles::estimate_Q_moment(basis, *c.m, tau, opt);
}

/// Exact versus semiclassical power by power, optionally with a sampled
/// check of the exact value at numeric parameters.
inline Comparison compare(const RunConfig& c) {
  require_ensemble(c, {"transmission", "time-delay"});
  if (c.variant == "energy") throw UnsupportedError("compare needs a closed form; the energy correlators have none");
  if (c.ensemble == "transmission" && c.variant == "barrier")
    throw UnsupportedError("compare needs a closed form; barrier transmission has none");

  RunConfig symbolic = c;
  symbolic.n1.reset();
  symbolic.n2.reset();
  symbolic.m.reset();
  symbolic.tau_d.reset();
  symbolic.r.reset();
  Comparison out;
  out.series = semiclassical_series(symbolic);
  const RationalFunction target = exact_value(symbolic) / out.series.normalization;
  const MSeries& s = out.series.series;
  const bool barrier = c.variant == "barrier";
  auto trunc = [&](const RationalFunction& f) { return barrier ? algebra::taylor_polynomial(f, Symbol::R, c.order_r) : f; };

  const auto e = algebra::expand_at_infinity(target, Symbol::M, s.lowest());
  std::map<int, RationalFunction> exact_terms;
  for (const auto& [p, coef] : e.coefficients) exact_terms[p] = trunc(coef);
  std::map<int, bool> powers;
  for (int p = s.lowest(); p <= s.highest(); ++p) powers[p] = true;
  for (const auto& [p, coef] : exact_terms)
    if (!coef.is_zero()) powers[p] = true;
  for (auto it = powers.rbegin(); it != powers.rend(); ++it) {
    CompareRow r;
    r.m_power = it->first;
    r.semiclassical = s.coefficient(it->first);
    r.exact = exact_terms.count(it->first) ? exact_terms[it->first] : RationalFunction();
    r.agree = r.semiclassical == r.exact;
    if (!r.agree) ++out.mismatches;
    out.rows.push_back(std::move(r));
  }

  if (c.with_samples) {
    if (barrier) throw UnsupportedError("sampling is defined for the ideal ensembles only");
    SampledLeg leg;
    leg.stats = sample_moment(c);
    RunConfig numeric = c;
    if (!numeric.tau_d) numeric.tau_d = "1";
    leg.exact = exact_value(numeric);
    const double x = numeric_value(c.ensemble == "transmission" ? "n1" : "m", leg.exact);
    leg.z = leg.stats.standard_error > 0 ? std::abs(leg.stats.mean - x) / leg.stats.standard_error : (leg.stats.mean == x ? 0.0 : INFINITY);
    leg.agree = leg.z <= 4.0;
    if (!leg.agree) ++out.mismatches;
    out.sampled = leg;
  }
  return out;
}

inline conjectures::ConjectureReport conjecture(const RunConfig& c) {
  if (c.id.empty()) throw ConfigError("id", "required");
  if (c.lambda.empty()) throw ConfigError("lambda", "required");
  const auto id = conjectures::conjecture_from_string(c.id);
  const Partition lambda = parse_partition_field("lambda", c.lambda);
  if (lambda.empty()) throw ConfigError("lambda", "must be nonempty");
  conjectures::ConjectureOptions o;
  o.order = c.order;
  o.r_order = c.order_r;
  o.expand.threads = c.threads;
  return conjectures::run_conjecture(id, lambda, o);
}

}  // namespace qtransport::cli
